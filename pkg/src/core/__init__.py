"""Core modules for state management, configuration, and graph definition."""


"""Utility modules for text processing and validation."""


"""Agent modules, one per pipeline stage."""

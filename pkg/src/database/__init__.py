"""Run-directory artifact storage."""

"""Test suite for the seed-driven text classifier."""

"""Configuration and persistence plumbing."""

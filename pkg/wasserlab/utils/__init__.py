"""Configuration, file formats and import helpers."""

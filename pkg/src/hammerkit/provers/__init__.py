"""Bundled provers."""

"""Shared assertions for golden shapes and CSV output."""

"""Command modules for the padic-bessel CLI."""

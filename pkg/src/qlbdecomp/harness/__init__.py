"""Verification cases, configuration and CLI."""

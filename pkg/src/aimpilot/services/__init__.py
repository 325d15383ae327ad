"""Service layer utilities."""

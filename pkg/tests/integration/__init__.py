"""Integration tests for the deposit auction toolkit."""

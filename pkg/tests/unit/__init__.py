"""Unit tests for the deposit auction toolkit."""

"""Test modules."""
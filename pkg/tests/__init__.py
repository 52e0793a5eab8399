"""Unit test package for utrx."""

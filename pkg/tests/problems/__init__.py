"""Tests for objective oracles and the problem suite."""

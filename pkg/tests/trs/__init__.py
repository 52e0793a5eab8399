"""Tests for the trust-region subproblem solvers."""

"""Internal helpers shared by the utrx modules."""

"""utrx tools."""

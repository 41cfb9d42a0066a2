"""Surface syntax, core terms, resolution and printing."""

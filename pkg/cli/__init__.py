"""Command-line interface for the hyperbolic verification toolkit."""

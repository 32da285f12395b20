"""Carbon Tables - figure-of-merit knowledge from annotated scientific tables."""

__version__ = "0.1.0"

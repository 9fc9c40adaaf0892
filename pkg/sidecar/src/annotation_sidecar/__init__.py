"""HTTP annotation service for French news text."""

__version__ = "0.1.0"

"""Figure scripts for fermionflow CSV artifacts."""

__version__ = "0.1.0"

"""Fine-grained fix localization over a small Java-like language."""

__version__ = "0.1.0"

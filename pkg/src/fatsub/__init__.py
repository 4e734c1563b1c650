"""Fat submersions over matrix Lie algebras."""

__version__ = "0.1.0"

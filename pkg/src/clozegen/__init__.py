"""Toolkit for building abstract-word cloze reading-comprehension datasets."""

__version__ = "0.1.0"

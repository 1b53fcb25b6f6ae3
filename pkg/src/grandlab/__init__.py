"""GRAND-family soft-decision decoders for binary linear block codes."""

__version__ = "0.1.0"

"""Desk-scale workbench for multimodal conversational stance detection."""

__version__ = "0.1.0"

from stancebench.labels import StanceLabel, Split

__all__ = ["StanceLabel", "Split", "__version__"]

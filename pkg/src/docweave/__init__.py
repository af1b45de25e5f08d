"""docweave: authoring and evaluation toolkit for interactive educational
documents."""

__version__ = "0.1.0"

"""The revivalkit package checks revival dynamics against scar bounds."""
__version__ = "0.1.0"

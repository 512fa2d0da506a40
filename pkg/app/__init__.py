__version__ = "2.0.1"
__date__ = "2026-10-18"

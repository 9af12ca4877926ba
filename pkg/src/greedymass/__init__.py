"""Greedy animals and paths over marked point processes."""
__version__ = "0.1.0"

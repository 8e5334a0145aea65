"""Determinantal dynamics of nonintersecting q-walks, PushASEP and GUE corner minima."""

__version__ = "0.1.0"

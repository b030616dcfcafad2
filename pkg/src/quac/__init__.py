"""Ambient design-feedback companion: persona-voiced, screenshot-grounded,
delivered by audio with a tiny on-screen footprint."""

__version__ = "0.1.0"

"""Clickbait screening from upload-time signals: title, thumbnail, keyframes, transcript."""

__version__ = "0.1.0"

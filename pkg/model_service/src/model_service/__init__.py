"""Embedding and sentiment model service speaking the /v1 JSON protocol."""

__version__ = "0.1.0"

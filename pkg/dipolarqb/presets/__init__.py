"""Shipped run configurations reproducing the published figures."""

"""Exact canonical-height machinery and effective height lower bounds
for elliptic curves over Q and over quadratic fields."""

__version__ = "0.1.0"

"""DIPQRB - routed Bell test randomness beacon toolkit."""

__version__ = "0.1.0"

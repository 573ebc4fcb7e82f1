"""Machinery for the nonexistence of additive quaternary [15,5,9] codes.

Bit conventions used throughout the package: a vector of width ``w`` is a
Python int whose most significant bit (``1 << (w - 1)``) is coordinate 0.
Reading such an int with ``format(v, f"0{w}b")`` gives the coordinates left to
right.
"""

__version__ = "0.1.0"

"""Exponential sums over finite fields, Newton polytopes and the prime-to-p
saturation lattice M_J: predictions of degrees, divisibility and weights,
and exact brute-force measurements to check them against."""

__version__ = "0.1.0"

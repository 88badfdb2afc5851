"""Finite-precision computer algebra for delta-log rings, prisms, envelopes,
and (q-)de Rham complexes over Z/p^n."""

__version__ = "0.1.0"

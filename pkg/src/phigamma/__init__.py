"""Explicit (phi, Gamma)-module arithmetic for rank-one modules over the
Robba ring: p-adic scalars, cyclotomic towers, Laurent windows, localization
to D_dif, the big exponential, Herr complexes and the Colmez transform."""

KERNEL_VERSION = "0.1.0"
__version__ = KERNEL_VERSION

"""specratio: spectral statistics of ratios of random matrices.

A library-plus-CLI laboratory for the eigenvalue statistics of M = A B^(-1)
with independent i.i.d.-entry matrices A and B: exact radial samplers and
determinantal kernels for the Gaussian case, heavy-tailed limit laws for the
scaled spectral radii, a from-scratch dense complex eigensolver, and a
reproducible Monte Carlo harness with goodness-of-fit gates.
"""

__version__ = "0.1.0"

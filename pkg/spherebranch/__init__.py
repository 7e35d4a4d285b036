"""
spherebranch

Spectra, degree certificates, solution branches and eigenpair maps for
perturbed eigenvalue problems Lx + sN(x) = λCx on the unit sphere.
"""

__version__ = "1.0.0"

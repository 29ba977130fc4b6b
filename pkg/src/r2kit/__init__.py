"""Self-perturbed R_II orthogonal polynomials, their tridiagonal pencils and zero interlacing."""

__version__ = "0.1.0"

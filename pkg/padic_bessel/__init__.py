"""p-adic generalized Bessel potentials: kernels, Green functions, heat kernels and their oracle."""

__all__ = ["__version__"]
__version__ = "0.1.0"

"""Class-group congruences and simple Hecke submodules of S_2(Gamma_0(N))."""

__version__ = "0.1.0"

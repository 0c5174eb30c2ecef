"""Exact computations for shifted quantum affine algebras: the q-parameter
field, Cartan data, l-weights, truncated q-characters, explicit module
realizations with relation checks, and Grothendieck-ring identities."""

__version__ = "0.1.0"

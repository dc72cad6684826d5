"""Exact computations with commuting matrices and modules over local Artinian algebras."""

__version__ = "0.1.0"
SCHEMA_VERSION = 1

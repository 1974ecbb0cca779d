"""Fitting-ideal and determinant computations over group rings and truncated Iwasawa algebras."""

__version__ = "0.1.0"

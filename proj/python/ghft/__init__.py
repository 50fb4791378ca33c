"""Lattice Green operators, causal propagators and CCR/CAR algebras."""

from ._core import ConfigError, IoError, PreconditionError, algebra, check, clifford_check, green, load_config

__all__ = ["ConfigError", "IoError", "PreconditionError", "algebra", "check", "clifford_check", "green", "load_config"]

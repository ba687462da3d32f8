"""Premise selection and first-order prover bridge for higher-order corpora."""

__version__ = "0.1.0"

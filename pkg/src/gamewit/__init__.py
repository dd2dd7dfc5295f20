"""Game-theoretic witnessing: proofs, strategies and games on finite structures."""
__version__ = "0.1.0"

"""Linear relations among height-pairing values forced by endomorphism algebras."""

__version__ = "0.1.0"

"""novcube: exact chain-level algebra of cubical diagrams over the Novikov ring."""

__version__ = "0.1.0"

"""hardylab: a numerical laboratory for sharp Gaussian-decay rigidity of
magnetic Schrodinger evolutions."""

__version__ = "0.1.0"

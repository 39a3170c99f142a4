"""Complex rational ODEs on the Riemann sphere."""

__version__ = "0.1.0"

"""Sequential empirical measure processes: exact statistics, covering-number
machinery, and Monte Carlo verification harnesses for uniform laws of large
numbers and functional central limit theorems."""

__version__ = "0.1.0"

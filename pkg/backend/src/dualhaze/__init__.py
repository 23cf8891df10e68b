"""
dualhaze: Retinex and image dehazing as dual operators.
"""

__version__ = "1.0.0"

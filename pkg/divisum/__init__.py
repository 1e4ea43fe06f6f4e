"""Verification toolkit for divisor-sum convolution identities and cusp forms"""

__version__ = "0.1.0"

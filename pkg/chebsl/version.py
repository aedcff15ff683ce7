"""The version number for chebsl is governed by this file."""

__version__ = "0.1.0"

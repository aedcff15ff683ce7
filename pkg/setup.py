"""Setuptools entry point for chebsl"""

from setuptools import setup

setup()

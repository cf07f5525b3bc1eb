"""Exact cohomology of finite categories and the algebra of their extensions."""

__version__ = "0.1.0"

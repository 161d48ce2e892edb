"""Proper colourings of graphs with bounded-diversity decompositions."""

__version__ = "0.1.0"

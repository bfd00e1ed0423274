"""
Social Image Tournament Lab

Equilibria of women's tournament entry under social image concerns,
a numeric oracle that checks them, and a Monte Carlo replication of the
entry experiment with its rate analysis.
"""

__version__ = "1.0.0"
__description__ = "Signaling model of tournament entry with an experiment simulator"

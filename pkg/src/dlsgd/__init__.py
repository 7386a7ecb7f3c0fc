"""Decentralized local SGD at desk scale.

Simulates SGD workers on an undirected communication graph that average their
iterates through a doubly stochastic mixing matrix at scheduled iterations,
and evaluates closed-form convergence bounds against the measured optimality
gap for path, complete and Erdos-Renyi topologies.
"""

from . import bounds, engine, harness, objectives, schedule, topology

__all__ = ["bounds", "engine", "harness", "objectives", "schedule", "topology"]

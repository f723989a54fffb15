"""Reliability-constrained latency analysis for ground-to-UAV links over
interference channels, with amplify-and-forward relaying."""
from .geometry import Position3D, distance, elevation_angle

__version__ = "0.1.0"

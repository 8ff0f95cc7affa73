"""Deterministic micro-simulator for VRU collision-avoidance test scenarios."""

__version__ = "0.1.0"

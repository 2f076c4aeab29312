"""Exposure-aware mmWave beam selection simulator.

Builds planar-array beam codebooks, applies head-avoidance beam
reselection, predicts far-field power density at pedestrian heads and
produces exposure maps plus exposure/SNR CDFs from seeded Monte-Carlo
sweeps over an outdoor LOS evaluation area.
"""

__version__ = "0.1.0"

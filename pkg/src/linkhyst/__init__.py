"""Neighbor-adjacency management for mobile mesh networks.

Two link-quality hysteresis schemes (Hello-loss based and signal-strength
based) running on a small deterministic discrete-event simulator, plus the
chain-topology mobility experiment used to compare them.
"""

__version__ = "0.1.0"

"""Gesture-teleoperation stack: tiny landmark classifier, compression,
debounced jog controller with safety envelope, simulated UR5, and a pub-sub
pipeline served over newline-delimited JSON."""

__version__ = "0.1.0"

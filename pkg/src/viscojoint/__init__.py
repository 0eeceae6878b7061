"""Viscoelastic robotic finger joint toolkit.

Submodules
----------
damper     Couette-flow concentric-fin damper model and design sweeps
pendulum   drop-test pendulum simulation and oscillation metrics
fitting    friction/damping parameter fits, bootstrap, Monte-Carlo bands
finger     tendon-driven three-link finger statics and dynamics
catching   closed-loop ball-catch trial simulation
tracker    tracker-CSV ingestion into angle trajectories
config     defaults, provenance tags and config file I/O
cli        command-line front end
"""

from .backend import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"

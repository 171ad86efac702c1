"""Drive-by-wire control stack and kinematic simulator for an
Ackermann-steered electric cart: steering-linkage geometry, wigwag speed
pipeline, serial wire protocol, layered safety supervisor, goal
navigation, and an operator gateway."""

__version__ = "0.1.0"

from .config import Config, load_config
from .stack import Stack

__all__ = ["Config", "load_config", "Stack", "__version__"]

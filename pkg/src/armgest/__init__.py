"""Motion-based gesture communication with a simulated 7-DoF arm."""

__version__ = "0.1.0"

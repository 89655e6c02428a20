"""cqbl - classical-quantum broadcast bounds

Numerical toolkit for classical-quantum degraded broadcast channels:
entropic region boundaries, second-order and exponential strong converse
bounds, and randomized certification of the inequalities behind them.
"""

__version__ = "0.1.0"
__author__ = "cqbl developers"
__description__ = "Converse bounds for classical-quantum degraded broadcast channels"

"""
Shifted monomial edge costs a*x^d + b.
"""

from dataclasses import dataclass

import numpy as np

from selfroute.core.errors import InvalidInstance


@dataclass(frozen=True)
class CostFunction:
    """
    Congestion cost of an edge.

    a scales the congestion-dependent term and is the only part an uncertain
    user perceives differently; b is the flow-independent cost.
    """

    a: float
    b: float
    d: int = 1

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise InvalidInstance(f"Cost coefficients must be nonnegative, got a={self.a}, b={self.b}")
        if int(self.d) != self.d or self.d < 1:
            raise InvalidInstance(f"Cost degree must be a positive integer, got {self.d}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "d", int(self.d))

    def evaluate(self, x):
        return self.a * np.power(x, self.d) + self.b

    def perceived(self, x, r: float):
        return r * self.a * np.power(x, self.d) + self.b

    def derivative(self, x):
        return self.d * self.a * np.power(x, self.d - 1)

    def integral(self, x):
        """Beckmann integral of the cost from 0 to x."""
        return self.a * np.power(x, self.d + 1) / (self.d + 1) + self.b * x

    def marginal(self, x):
        """Marginal social cost d/dx [C(x) x]."""
        return (self.d + 1) * self.a * np.power(x, self.d) + self.b

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "d": self.d}

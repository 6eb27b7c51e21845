"""
Exception hierarchy for ulamlab.

Every error raised on purpose by the core modules derives from
``UlamlabError`` so the CLI can report it with a single handler.
"""

from typing import Optional, Sequence


class UlamlabError(Exception):
    """Base class for ulamlab errors."""


class DomainError(UlamlabError, ValueError):
    """A parameter lies outside the domain of the formula being evaluated."""


class ResourceCapError(UlamlabError):
    """A configured size or enumeration cap would be exceeded."""

    def __init__(self, what: str, requested: int, cap: int):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what}: requested {requested} exceeds cap {cap}")


class MalformedPermutationError(DomainError):
    """Input is not a permutation of 1..n."""


class RootNotBracketedError(UlamlabError):
    """A bisection bracket does not contain a sign change."""

    def __init__(self, name: str, lo: float, hi: float, f_lo: float, f_hi: float):
        self.lo, self.hi, self.f_lo, self.f_hi = lo, hi, f_lo, f_hi
        super().__init__(
            f"{name}: no sign change on [{lo!r}, {hi!r}] (f={f_lo!r}, {f_hi!r})"
        )


class InfeasibleTargetError(DomainError):
    """An implicit equation's target lies outside the attainable range."""

    def __init__(self, message: str, target: float, supremum: float):
        self.target = target
        self.supremum = supremum
        super().__init__(f"{message} (target {target!r}, supremum {supremum!r})")


class ContourConvergenceError(UlamlabError):
    """Trapezoidal contour quadrature did not settle before the node cap."""

    def __init__(self, nodes: int, estimates: Sequence[complex], tol: Optional[float] = None):
        self.nodes = nodes
        self.estimates = tuple(estimates)
        super().__init__(
            f"contour quadrature not converged at {nodes} nodes "
            f"(last estimates {self.estimates}, tol {tol})"
        )

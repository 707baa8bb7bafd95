"""Cesaro means of trigonometric polynomials and amenable averaging studies.

The integer-group specialization of the coefficient-weighting maps: the
interval indicator {0..n} produces the triangular weights
(n+1-|k|)/(n+1), i.e. the n-th Cesaro (Fejer) mean of the Fourier series.
Uniform convergence is witnessed on a sampling grid; amenable groups get
exact symmetric-difference tables.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .errors import SpecMismatchError, UndersampledGridError
from .groups import Element, GroupSpec
from .posdef import folner_defect, folner_overlap


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite Fourier data: coefficient map k -> c_k."""

    coefficients: Dict[int, complex]

    def __post_init__(self):
        for k in self.coefficients:
            if not isinstance(k, int) or isinstance(k, bool):
                raise SpecMismatchError(f"frequency {k!r} is not an integer")

    def degree(self) -> int:
        support = [abs(k) for k, c in self.coefficients.items() if c != 0]
        return max(support, default=0)

    def __call__(self, theta: float) -> complex:
        return sum(
            c * cmath.exp(1j * k * theta) for k, c in self.coefficients.items()
        )

    def coefficient(self, k: int) -> complex:
        return complex(self.coefficients.get(k, 0))


def cesaro_weight(n: int, j: int) -> Fraction:
    """Triangular weight (n+1-|j|)/(n+1) inside the band, 0 outside."""
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if abs(j) > n:
        return Fraction(0)
    return Fraction(n + 1 - abs(j), n + 1)


def cesaro_mean(f: TrigPolynomial, n: int) -> TrigPolynomial:
    """Coefficientwise triangular damping: the n-th Cesaro mean."""
    out = {}
    for k, c in f.coefficients.items():
        w = cesaro_weight(n, k)
        if w:
            out[k] = complex(c) * float(w)
    return TrigPolynomial(out)


def sup_norm_grid(f: TrigPolynomial, g: TrigPolynomial, grid_points: int) -> float:
    """Max of |f - g| over a uniform grid on the circle.

    Requires at least 4*degree + 1 points; with that oversampling the
    grid value is within a factor 2 of the true sup norm for trig
    polynomials.
    """
    deg = max(f.degree(), g.degree())
    if grid_points < 4 * deg + 1:
        raise UndersampledGridError(
            f"need >= {4 * deg + 1} grid points for degree {deg}, "
            f"got {grid_points}"
        )
    step = 2.0 * cmath.pi / grid_points
    return max(abs(f(i * step) - g(i * step)) for i in range(grid_points))


@dataclass(frozen=True)
class FolnerRow:
    """One exact row of an amenable averaging study."""

    radius: int
    defect: Fraction
    value: Fraction


def folner_study(
    spec: GroupSpec, t: Element, radii: Sequence[int]
) -> List[FolnerRow]:
    """Exact (defect, overlap) rows for the built-in averaging sequence.

    Every row satisfies value = 1 - defect/2 by the partition of the
    averaging set into the overlap and half the symmetric difference.
    """
    spec.validate(t)
    rows = []
    for n in radii:
        defect = folner_defect(spec, n, t)
        value = folner_overlap(spec, n, t)
        assert value == 1 - defect / 2
        rows.append(FolnerRow(n, defect, value))
    return rows

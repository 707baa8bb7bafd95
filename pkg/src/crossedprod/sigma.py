"""Vector-averaged completely positive maps and expectation pairs.

The central map sends a window operator x to

    sum over g, h of  L_{g h^-1} Psi(alpha_h(pi(x_{(g,h)}))) conj(k_g) k_h

for a unit vector xi = (k_g).  It is unital, completely positive and
bimodular over the embedded algebra, and every translate L_t Psi(r) is an
eigenvector with eigenvalue chi_xi(t) = <translate of xi by t, xi>.

A strictly positive xi yields an expectation pair (chi, sigma): the
eigenvalue function together with the map, satisfying the diagonal bound
||Diag(L_{g^-1} sigma(x))|| <= chi(g) ||x||.  Inverting the eigenvalues
gives the idempotent pi_projection onto the crossed-product span.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import freecomb
from .crossed import (
    BlockMatrix,
    CrossedContext,
    fourier_coefficient,
    left_translation,
    op_norm,
    phi_hom,
    psi,
    theta_embed,
)
from .errors import (
    MarginError,
    NotInDomainError,
    SpecMismatchError,
)
from .groups import Cyclic, Element, FreeGroup, GroupSpec, IntegerLattice, Integers, ProductGroup
from .posdef import L2Vector, PdFunction, chi_from_vector, folner_overlap

UNITAL_TOL = 1e-12
CHI_FLOOR = 1e-14


def _window_support(ctx: CrossedContext, xi: L2Vector) -> List[Tuple[int, complex]]:
    idx = ctx.window.index_of
    out = []
    for g, v in xi.entries.items():
        v = complex(v)
        if v == 0:
            continue
        i = idx.get(g)
        if i is None:
            raise MarginError(
                f"vector entry at {ctx.group.format_element(g)} lies outside "
                f"the window"
            )
        out.append((i, v))
    return out


def _check_margin(ctx: CrossedContext, supp: Sequence[Tuple[int, complex]]):
    if ctx.group.is_finite():
        return
    rel = ctx.rel_table
    for i, _ in supp:
        for j, _ in supp:
            if rel[i, j] < 0:
                raise MarginError(
                    "support products leave the window; enlarge the window "
                    "or shrink the vector support"
                )


def sigma_coefficients(
    ctx: CrossedContext, xi: L2Vector, x: BlockMatrix
) -> np.ndarray:
    """Coefficient stack of the averaged map, aligned with the window."""
    supp = _window_support(ctx, xi)
    _check_margin(ctx, supp)
    rel = ctx.rel_table
    xblocks = x.blocks()
    pi = ctx.expectation.apply
    coeffs = np.zeros((ctx.nwin, ctx.d, ctx.d), dtype=complex)
    for i, ki in supp:
        for j, kj in supp:
            t = rel[i, j]
            weight = ki.conjugate() * kj
            coeffs[t] += weight * ctx.alpha_by_perm(
                ctx.perms[j], pi(np.asarray(xblocks[i, j]))
            )
    return coeffs


def sigma_xi(ctx: CrossedContext, xi: L2Vector, x: BlockMatrix) -> BlockMatrix:
    """Apply the averaged map; the result lies in the crossed-product span."""
    return theta_embed(ctx, sigma_coefficients(ctx, xi, x))


def tau_u(ctx: CrossedContext, xi: L2Vector, u: Element, x: BlockMatrix) -> BlockMatrix:
    """One term of the translation decomposition of the averaged map.

    Places conj(k_g) k_h alpha_u(pi(x_{(g,h)})) at block (g u^-1, h u^-1);
    summing over the whole group recovers sigma_xi.  Finite groups only.
    """
    if not ctx.group.is_finite():
        raise SpecMismatchError("the translation decomposition needs a finite group")
    ctx.group.validate(u)
    supp = _window_support(ctx, xi)
    idx = ctx.window.index_of
    uinv = ctx.group.inverse(u)
    pu = ctx.action.perm(u, ctx.d)
    pi = ctx.expectation.apply
    xblocks = x.blocks()
    out = ctx.zero()
    oblocks = out.blocks()
    for i, ki in supp:
        a = idx[ctx.group.multiply(ctx.window[i], uinv)]
        for j, kj in supp:
            b = idx[ctx.group.multiply(ctx.window[j], uinv)]
            oblocks[a, b] += (
                ki.conjugate()
                * kj
                * ctx.alpha_by_perm(pu, pi(np.asarray(xblocks[i, j])))
            )
    return out


def chi_of(ctx: CrossedContext, xi: L2Vector) -> PdFunction:
    """The eigenvalue function of the averaged map."""
    return chi_from_vector(ctx.group, xi)


def phi_t(
    ctx: CrossedContext,
    xi: L2Vector,
    t: Element,
    x: BlockMatrix,
    chi: Optional[PdFunction] = None,
) -> np.ndarray:
    """Normalized coefficient of the averaged map at translate t.

    Returns the algebra element chi(t)^-1 sum_h alpha_h(pi(x_{(th,h)}))
    conj(k_{th}) k_h; a contraction in the operator norm.
    """
    ctx.group.validate(t)
    if chi is None:
        chi = chi_of(ctx, xi)
    chival = complex(chi(t))
    if abs(chival) <= CHI_FLOOR:
        raise NotInDomainError(
            f"eigenvalue at {ctx.group.format_element(t)} vanishes"
        )
    supp = _window_support(ctx, xi)
    idx = ctx.window.index_of
    pi = ctx.expectation.apply
    xblocks = x.blocks()
    acc = np.zeros((ctx.d, ctx.d), dtype=complex)
    for j, kj in supp:
        h = ctx.window[j]
        i = idx.get(ctx.group.multiply(t, h))
        if i is None:
            continue
        kth = xi.entries.get(ctx.window[i])
        if kth is None:
            continue
        acc += (
            complex(kth).conjugate()
            * kj
            * ctx.alpha_by_perm(ctx.perms[j], pi(np.asarray(xblocks[i, j])))
        )
    return acc / chival


@dataclass(frozen=True)
class ExpectationPair:
    """A strictly positive eigenvalue function with its averaged map."""

    ctx: CrossedContext
    chi: PdFunction
    apply: Callable[[BlockMatrix], BlockMatrix]
    xi: Optional[L2Vector] = None

    def sigma(self, x: BlockMatrix) -> BlockMatrix:
        return self.apply(x)

    def chi_values(self) -> np.ndarray:
        return np.array([complex(self.chi(g)).real for g in self.ctx.window])


def make_pair(ctx: CrossedContext, xi: L2Vector) -> ExpectationPair:
    """Build an expectation pair from a strictly positive unit vector.

    Finite groups require the support to cover the whole group.  Infinite
    groups run in margin mode: support products must stay inside the
    window, and the eigenvalue function must be strictly positive there.
    """
    if not xi.is_strictly_positive():
        raise ValueError("vector entries must be strictly positive")
    supp = xi.support()
    if ctx.group.is_finite():
        if supp != frozenset(ctx.window.elements):
            raise ValueError(
                "support must cover the whole group for a finite-group pair"
            )
    else:
        _check_margin(ctx, _window_support(ctx, xi))
    chi = chi_of(ctx, xi)
    for g in ctx.window:
        val = complex(chi(g))
        if not val.real > CHI_FLOOR or abs(val.imag) > UNITAL_TOL:
            raise ValueError(
                f"eigenvalue at {ctx.group.format_element(g)} is not "
                f"strictly positive: {val}"
            )
    pair = ExpectationPair(
        ctx, chi, lambda x: sigma_xi(ctx, xi, x), xi=xi
    )
    defect = op_norm(pair.sigma(ctx.identity_matrix()) - ctx.identity_matrix())
    if defect > UNITAL_TOL:
        raise AssertionError(f"map is not unital: defect {defect:.3e}")
    return pair


def pair_convex(terms: Sequence[Tuple[float, ExpectationPair]]) -> ExpectationPair:
    """Convex combination of expectation pairs over one context."""
    if not terms:
        raise ValueError("no terms")
    weights = [w for w, _ in terms]
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > UNITAL_TOL:
        raise ValueError(f"weights must be nonnegative and sum to 1: {weights}")
    ctx = terms[0][1].ctx
    if any(p.ctx is not ctx for _, p in terms):
        raise SpecMismatchError("pairs live on different contexts")
    from .posdef import convex_combination

    chi = convex_combination([(w, p.chi) for w, p in terms])

    def apply(x):
        out = ctx.zero()
        for w, p in terms:
            out = out + w * p.sigma(x)
        return out

    return ExpectationPair(ctx, chi, apply, xi=None)


@dataclass(frozen=True)
class CpReport:
    """Numerical evidence record for the property suite of an averaged map."""

    amplification_level: int
    trials: int
    min_eigenvalue_seen: float
    max_bimodular_defect: float
    max_eigenrelation_defect: float
    condition_ii_margin: float
    verdict: str

    def to_json(self) -> dict:
        def clean(v):
            return None if isinstance(v, float) and v != v else v

        return {
            "amplification_level": self.amplification_level,
            "trials": self.trials,
            "min_eigenvalue_seen": clean(self.min_eigenvalue_seen),
            "max_bimodular_defect": clean(self.max_bimodular_defect),
            "max_eigenrelation_defect": clean(self.max_eigenrelation_defect),
            "condition_ii_margin": clean(self.condition_ii_margin),
            "verdict": self.verdict,
        }


def random_psd(rng: np.random.Generator, size: int) -> np.ndarray:
    a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return a.conj().T @ a


def random_window_operator(ctx: CrossedContext, rng: np.random.Generator) -> BlockMatrix:
    n = ctx.dim
    return ctx.wrap(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_crossed_element(ctx: CrossedContext, rng: np.random.Generator) -> BlockMatrix:
    """A random element of the crossed-product span (via coefficients)."""
    coeffs = np.stack([
        ctx.algebra.random_member(rng) for _ in range(ctx.nwin)
    ])
    return theta_embed(ctx, coeffs)


def cp_check(
    ctx: CrossedContext,
    apply: Callable[[BlockMatrix], BlockMatrix],
    chi: Optional[PdFunction] = None,
    amplification: int = 1,
    trials: int = 100,
    tol: float = 1e-10,
    seed: int = 0,
) -> CpReport:
    """Positivity, bimodularity, and eigenrelation sweep for an averaged map.

    Applies the amplified map entrywise to random PSD inputs of the
    amplified size and records the worst eigenvalue; bimodularity is
    checked against random algebra sandwiches, and the eigenrelation
    against every window translate when chi is supplied.
    """
    if amplification < 1:
        raise ValueError("amplification must be >= 1")
    rng = np.random.default_rng(seed)
    n = ctx.dim
    m = amplification
    min_eig = np.inf
    for _ in range(trials):
        z = random_psd(rng, m * n)
        out = np.empty((m * n, m * n), dtype=complex)
        for p in range(m):
            for q in range(m):
                blockin = ctx.wrap(z[p * n : (p + 1) * n, q * n : (q + 1) * n])
                out[p * n : (p + 1) * n, q * n : (q + 1) * n] = apply(blockin).data
        herm = (out + out.conj().T) / 2.0
        min_eig = min(min_eig, float(np.linalg.eigvalsh(herm)[0]))

    max_bimod = 0.0
    for _ in range(max(1, trials // 4)):
        r = ctx.algebra.random_member(rng)
        s = ctx.algebra.random_member(rng)
        x = random_window_operator(ctx, rng)
        pr = psi(ctx, r)
        ps = psi(ctx, s)
        lhs = apply(pr @ x @ ps)
        rhs = pr @ apply(x) @ ps
        max_bimod = max(max_bimod, op_norm(lhs - rhs))

    max_eigrel = 0.0
    if chi is not None:
        for g in ctx.window:
            r = ctx.algebra.random_member(rng)
            xg = left_translation(ctx, g) @ psi(ctx, r)
            defect = op_norm(apply(xg) - complex(chi(g)) * xg)
            max_eigrel = max(max_eigrel, defect)

    verdict = "Pass" if min_eig >= -tol else "Fail"
    return CpReport(
        amplification_level=m,
        trials=trials,
        min_eigenvalue_seen=float(min_eig),
        max_bimodular_defect=float(max_bimod),
        max_eigenrelation_defect=float(max_eigrel),
        condition_ii_margin=float("nan"),
        verdict=verdict,
    )


def check_condition_ii(
    pair: ExpectationPair,
    samples: Optional[Sequence[BlockMatrix]] = None,
    trials: int = 100,
    tol: float = 1e-10,
    seed: int = 0,
) -> CpReport:
    """Diagonal-compression bound sweep.

    For every window g and each sample x, the compressed diagonal norm
    ||Diag(L_{g^-1} sigma(x))|| must stay below chi(g) ||x||; the report
    carries the worst margin (bound minus value; negative = violation).
    """
    ctx = pair.ctx
    rng = np.random.default_rng(seed)
    if samples is None:
        samples = [random_window_operator(ctx, rng) for _ in range(trials)]
    margin = np.inf
    witness = None
    for si, x in enumerate(samples):
        sx = pair.sigma(x)
        xnorm = op_norm(x)
        for g in ctx.window:
            lhs = op_norm(fourier_coefficient(ctx, sx, g))
            bound = complex(pair.chi(g)).real * xnorm
            gap = bound - lhs
            if gap < margin:
                margin = gap
                witness = (si, g)
        if margin < -tol:
            break
    verdict = "Pass" if margin >= -tol else "Fail"
    if verdict == "Fail" and witness is not None:
        si, g = witness
        verdict = (
            f"Fail(sample={si}, g={ctx.group.format_element(g)}, "
            f"margin={margin:.3e})"
        )
    return CpReport(
        amplification_level=1,
        trials=len(samples),
        min_eigenvalue_seen=float("nan"),
        max_bimodular_defect=float("nan"),
        max_eigenrelation_defect=float("nan"),
        condition_ii_margin=float(margin),
        verdict=verdict,
    )


def pi_projection(
    pair: ExpectationPair, x: BlockMatrix, tol: float = 1e-10
) -> BlockMatrix:
    """The idempotent: invert the eigenvalues on the coefficient series.

    Identity on the crossed-product span.  Eigenvalues below the floor
    mean the windowed inversion is meaningless; that is the finite-scale
    analogue of falling outside the domain.
    """
    ctx = pair.ctx
    sx = pair.sigma(x)
    coeffs = phi_hom(ctx, sx, tol)
    scaled = np.empty_like(coeffs)
    for i, g in enumerate(ctx.window):
        val = complex(pair.chi(g))
        if abs(val) <= CHI_FLOOR:
            raise NotInDomainError(
                f"eigenvalue underflow at {ctx.group.format_element(g)}"
            )
        scaled[i] = coeffs[i] / val
    return theta_embed(ctx, scaled)


def pi_amplification(pair: ExpectationPair, x: BlockMatrix, tol: float = 1e-10) -> float:
    """Window-scale domain surrogate: the largest coefficient inflation.

    Reports max over window g of ||coefficient of sigma(x) at g|| / chi(g);
    boundedness of the idempotent is undecidable at a finite window, so
    the inflation factor is surfaced instead of a verdict.
    """
    ctx = pair.ctx
    coeffs = phi_hom(ctx, pair.sigma(x), tol)
    worst = 0.0
    for i, g in enumerate(ctx.window):
        val = abs(complex(pair.chi(g)))
        if val <= CHI_FLOOR:
            raise NotInDomainError(
                f"eigenvalue underflow at {ctx.group.format_element(g)}"
            )
        norm = float(np.linalg.norm(coeffs[i], 2))
        worst = max(worst, norm / val)
    return worst


@dataclass(frozen=True)
class StudyRow:
    """One (radius, element) row of an eigenvalue convergence study."""

    radius: int
    label: str
    value: Fraction
    bound: Fraction
    margin: Fraction

    def to_csv_fields(self) -> List[str]:
        return [
            str(self.radius),
            self.label,
            repr(float(self.value)),
            repr(float(self.bound)),
            repr(float(self.margin)),
        ]


@dataclass(frozen=True)
class StudyTable:
    rows: Tuple[StudyRow, ...]
    monotone: Dict[str, bool]

    CSV_HEADER = ("radius", "g_label", "value", "bound", "margin")


def sequence_limit_study(
    spec: GroupSpec,
    ball_radii: Sequence[int],
    targets: Sequence[Element],
) -> StudyTable:
    """Exact ball-indicator eigenvalues against their analytic limits.

    For each target translate t and each radius n the table holds the
    overlap eigenvalue chi_n(t), the limit value (1 on amenable groups,
    the even/odd closed form on free groups), and the distance to it.
    """
    amenable = _is_amenable(spec)
    if not amenable and not isinstance(spec, FreeGroup):
        raise SpecMismatchError(f"no limit study for {spec.label}")
    rows = []
    monotone: Dict[str, bool] = {}
    for t in targets:
        spec.validate(t)
        label = spec.format_element(t)
        if amenable:
            limit = Fraction(1)
            values = [folner_overlap(spec, n, t) for n in ball_radii]
        else:
            limit = freecomb.chi_limit_free(spec.k, spec.word_length(t))
            values = [freecomb.chi_ratio(spec.k, t, n) for n in ball_radii]
        errors = [abs(v - limit) for v in values]
        monotone[label] = all(b < a for a, b in zip(errors, errors[1:]))
        for n, v, err in zip(ball_radii, values, errors):
            rows.append(StudyRow(n, label, v, limit, err))
    return StudyTable(tuple(rows), monotone)


def _is_amenable(spec: GroupSpec) -> bool:
    if isinstance(spec, (Integers, IntegerLattice, Cyclic)):
        return True
    if isinstance(spec, ProductGroup):
        return all(_is_amenable(f) for f in spec.factors)
    return False

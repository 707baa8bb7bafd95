"""Truncated crossed products as dense block matrices.

A CrossedContext fixes a group, a finite window ball, a coefficient
algebra of d x d matrices, an action by coordinate permutations, and a
conditional expectation onto the algebra.  Operators live on
window x internal space and are stored dense (BlockMatrix).

Translation operators drop transitions that leave the window, so on
infinite groups most identities hold only for inputs with enough support
margin; on finite groups (window = whole group) everything is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    MarginError,
    NotInCrossedProductError,
    SpecMismatchError,
)
from .groups import (
    ORDERING_VERSION,
    Ball,
    Cyclic,
    Element,
    GroupSpec,
    ball,
    parse_group,
    whole_group_ball,
)
from .posdef import PdFunction

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class CoeffAlgebra:
    """The coefficient algebra: scalars, diagonal, or full d x d matrices."""

    kind: str
    internal_dim: int = 1

    _KINDS = ("scalars", "diagonal", "full")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise SpecMismatchError(f"unknown algebra kind {self.kind!r}")
        if self.internal_dim < 1:
            raise SpecMismatchError("internal dimension must be >= 1")
        if self.kind == "scalars" and self.internal_dim != 1:
            raise SpecMismatchError("scalar algebra has internal dimension 1")

    @staticmethod
    def scalars() -> "CoeffAlgebra":
        return CoeffAlgebra("scalars", 1)

    @staticmethod
    def diagonal(d: int) -> "CoeffAlgebra":
        return CoeffAlgebra("diagonal", d)

    @staticmethod
    def full(d: int) -> "CoeffAlgebra":
        return CoeffAlgebra("full", d)

    def identity(self) -> np.ndarray:
        return np.eye(self.internal_dim, dtype=complex)

    def contains(self, r: np.ndarray, tol: float = 0.0) -> bool:
        r = np.asarray(r)
        d = self.internal_dim
        if r.shape != (d, d):
            return False
        if self.kind == "diagonal":
            off = r - np.diag(np.diag(r))
            return bool(np.max(np.abs(off), initial=0.0) <= tol)
        return True

    def validate_member(self, r) -> np.ndarray:
        out = np.asarray(r, dtype=complex)
        if out.ndim == 0:
            out = out.reshape(1, 1)
        if not self.contains(out):
            raise SpecMismatchError(
                f"not a member of {self.kind}({self.internal_dim}): shape "
                f"{out.shape}"
            )
        return out

    def random_member(self, rng: np.random.Generator) -> np.ndarray:
        d = self.internal_dim
        m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        if self.kind == "diagonal":
            m = np.diag(np.diag(m))
        return m


@dataclass(frozen=True)
class ActionSpec:
    """Group action by permutations of the internal coordinates.

    perm_of maps a group element to a permutation tuple p, acting on basis
    vectors by e_i -> e_{p[i]}.  Multiplicativity over the generating set
    is verified when a context is built.
    """

    kind: str
    perm_of: Optional[Callable[[Element], Tuple[int, ...]]] = None

    def __post_init__(self):
        if self.kind not in ("trivial", "permutation"):
            raise SpecMismatchError(f"unknown action kind {self.kind!r}")
        if self.kind == "permutation" and self.perm_of is None:
            raise SpecMismatchError("permutation action needs perm_of")

    @staticmethod
    def trivial() -> "ActionSpec":
        return ActionSpec("trivial")

    @staticmethod
    def permutation(perm_of: Callable[[Element], Tuple[int, ...]]) -> "ActionSpec":
        return ActionSpec("permutation", perm_of)

    def perm(self, g: Element, d: int) -> Tuple[int, ...]:
        if self.kind == "trivial":
            return tuple(range(d))
        p = tuple(self.perm_of(g))
        if sorted(p) != list(range(d)):
            raise SpecMismatchError(
                f"perm_of({g!r}) = {p} is not a permutation of 0..{d - 1}"
            )
        return p


def swap_action(spec: Cyclic) -> ActionSpec:
    """Order-two coordinate swap on 2 internal dims, driven by parity.

    Only a homomorphism when the cyclic order is even.
    """
    if spec.n % 2:
        raise SpecMismatchError(f"swap is not multiplicative on C{spec.n}")

    def perm_of(g):
        return (1, 0) if g % 2 else (0, 1)

    return ActionSpec.permutation(perm_of)


def translation_action(spec: Cyclic) -> ActionSpec:
    """C_n cycling n internal coordinates: the matrix-algebra testbed.

    With the diagonal algebra of size n this realizes M_n as the crossed
    product of its diagonal by the cyclic shift.
    """
    n = spec.n

    def perm_of(g):
        return tuple((i + g) % n for i in range(n))

    return ActionSpec.permutation(perm_of)


@dataclass(frozen=True)
class ExpectationSpec:
    """Conditional expectation of the d x d matrices onto the algebra.

    trace: x -> (tr x / d) I (scalars target); diagonal: keep the diagonal;
    identity: the full algebra, no compression.  All three are unital,
    idempotent, and bimodular over the target algebra.
    """

    kind: str

    _TARGET = {"trace": "scalars", "diagonal": "diagonal", "identity": "full"}

    def __post_init__(self):
        if self.kind not in self._TARGET:
            raise SpecMismatchError(f"unknown expectation kind {self.kind!r}")

    @staticmethod
    def default_for(algebra: CoeffAlgebra) -> "ExpectationSpec":
        kind = {v: k for k, v in ExpectationSpec._TARGET.items()}[algebra.kind]
        return ExpectationSpec(kind)

    def target_kind(self) -> str:
        return self._TARGET[self.kind]

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        d = x.shape[0]
        if self.kind == "trace":
            return (np.trace(x) / d) * np.eye(d, dtype=complex)
        if self.kind == "diagonal":
            return np.diag(np.diag(x))
        return x.copy()


@dataclass(frozen=True)
class CrossedContext:
    """Everything needed to realize crossed-product operators on a window."""

    group: GroupSpec
    window: Ball
    algebra: CoeffAlgebra
    action: ActionSpec
    expectation: ExpectationSpec

    def __post_init__(self):
        if self.window.spec != self.group:
            raise SpecMismatchError("window was built for a different group")
        if len(self.window) == 0 or self.window[0] != self.group.identity():
            raise SpecMismatchError("window must start at the identity")
        if self.group.is_finite() and len(self.window) != self.group.order():
            raise SpecMismatchError(
                "finite-group contexts need the whole group as window"
            )
        if self.expectation.target_kind() != self.algebra.kind:
            raise SpecMismatchError(
                f"expectation targets {self.expectation.target_kind()}, "
                f"algebra is {self.algebra.kind}"
            )
        d = self.algebra.internal_dim
        ident = self.action.perm(self.group.identity(), d)
        if ident != tuple(range(d)):
            raise SpecMismatchError("action of the identity must be trivial")
        for s in self.group.generating_set():
            ps = self.action.perm(s, d)
            for h in self.window:
                lhs = self.action.perm(self.group.multiply(s, h), d)
                ph = self.action.perm(h, d)
                if lhs != tuple(ps[ph[i]] for i in range(d)):
                    raise SpecMismatchError(
                        f"action not multiplicative at ({s!r}, {h!r})"
                    )

    @property
    def d(self) -> int:
        return self.algebra.internal_dim

    @property
    def nwin(self) -> int:
        return len(self.window)

    @property
    def dim(self) -> int:
        return self.nwin * self.d

    @cached_property
    def mul_table(self) -> np.ndarray:
        """index of g_i g_j in the window, or -1."""
        n = self.nwin
        out = np.full((n, n), -1, dtype=np.int64)
        idx = self.window.index_of
        for i, a in enumerate(self.window):
            for j, b in enumerate(self.window):
                out[i, j] = idx.get(self.group.multiply(a, b), -1)
        return out

    @cached_property
    def inv_table(self) -> np.ndarray:
        idx = self.window.index_of
        return np.array(
            [idx.get(self.group.inverse(a), -1) for a in self.window],
            dtype=np.int64,
        )

    @cached_property
    def rel_table(self) -> np.ndarray:
        """index of g_i g_j^-1 in the window, or -1."""
        n = self.nwin
        out = np.full((n, n), -1, dtype=np.int64)
        idx = self.window.index_of
        for j, b in enumerate(self.window):
            binv = self.group.inverse(b)
            for i, a in enumerate(self.window):
                out[i, j] = idx.get(self.group.multiply(a, binv), -1)
        return out

    @cached_property
    def perms(self) -> List[Tuple[int, ...]]:
        return [self.action.perm(g, self.d) for g in self.window]

    @cached_property
    def inv_perms(self) -> List[Tuple[int, ...]]:
        return [
            self.action.perm(self.group.inverse(g), self.d) for g in self.window
        ]

    def alpha(self, g: Element, r: np.ndarray) -> np.ndarray:
        """The automorphism alpha_g applied to a coefficient matrix."""
        r = np.asarray(r, dtype=complex)
        p = self.action.perm(g, self.d)
        return _permute(r, p)

    def alpha_by_perm(self, p: Tuple[int, ...], r: np.ndarray) -> np.ndarray:
        return _permute(np.asarray(r, dtype=complex), p)

    def zero(self) -> "BlockMatrix":
        return BlockMatrix(
            self.window, self.d, np.zeros((self.dim, self.dim), dtype=complex)
        )

    def identity_matrix(self) -> "BlockMatrix":
        return BlockMatrix(self.window, self.d, np.eye(self.dim, dtype=complex))

    def wrap(self, data: np.ndarray) -> "BlockMatrix":
        return BlockMatrix(self.window, self.d, np.asarray(data, dtype=complex))


def _permute(r: np.ndarray, p: Tuple[int, ...]) -> np.ndarray:
    d = len(p)
    if p == tuple(range(d)):
        return r.copy()
    pinv = [0] * d
    for i, pi in enumerate(p):
        pinv[pi] = i
    return r[np.ix_(pinv, pinv)]


def make_context(
    group: GroupSpec,
    radius: Optional[int] = None,
    algebra: Optional[CoeffAlgebra] = None,
    action: Optional[ActionSpec] = None,
    expectation: Optional[ExpectationSpec] = None,
) -> CrossedContext:
    """Assemble a context with sensible defaults.

    Finite groups take the whole group as window (radius ignored);
    infinite groups require a radius.
    """
    if algebra is None:
        algebra = CoeffAlgebra.scalars()
    if action is None:
        action = ActionSpec.trivial()
    if expectation is None:
        expectation = ExpectationSpec.default_for(algebra)
    if group.is_finite():
        window = whole_group_ball(group)
    else:
        if radius is None:
            raise SpecMismatchError(f"{group.label} needs an explicit radius")
        window = ball(group, radius)
    return CrossedContext(group, window, algebra, action, expectation)


@dataclass(frozen=True)
class BlockMatrix:
    """Dense operator on window x internal space; block (i,j) is d x d."""

    window: Ball
    block_dim: int
    data: np.ndarray

    def __post_init__(self):
        n = len(self.window) * self.block_dim
        if self.data.shape != (n, n):
            raise SpecMismatchError(
                f"data shape {self.data.shape} does not match window "
                f"({len(self.window)} x {self.block_dim})"
            )

    def block(self, i: int, j: int) -> np.ndarray:
        d = self.block_dim
        return self.data[i * d : (i + 1) * d, j * d : (j + 1) * d]

    def blocks(self) -> np.ndarray:
        """(n, n, d, d) view of the data."""
        n = len(self.window)
        d = self.block_dim
        return self.data.reshape(n, d, n, d).swapaxes(1, 2)

    def adjoint(self) -> "BlockMatrix":
        return BlockMatrix(self.window, self.block_dim, self.data.conj().T.copy())

    def _check_compatible(self, other: "BlockMatrix"):
        if self.window != other.window or self.block_dim != other.block_dim:
            raise SpecMismatchError("window or block dimension mismatch")

    def __add__(self, other):
        self._check_compatible(other)
        return BlockMatrix(self.window, self.block_dim, self.data + other.data)

    def __sub__(self, other):
        self._check_compatible(other)
        return BlockMatrix(self.window, self.block_dim, self.data - other.data)

    def __mul__(self, scalar):
        return BlockMatrix(self.window, self.block_dim, self.data * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check_compatible(other)
        return BlockMatrix(self.window, self.block_dim, self.data @ other.data)

    def to_json(self) -> str:
        pairs = [
            [float(z.real), float(z.imag)] for z in self.data.ravel(order="C")
        ]
        return json.dumps(
            {
                "group": self.window.spec.label,
                "radius": self.window.radius,
                "ordering": ORDERING_VERSION,
                "block_dim": self.block_dim,
                "data": pairs,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "BlockMatrix":
        doc = json.loads(text)
        if doc["ordering"] != ORDERING_VERSION:
            raise SpecMismatchError(
                f"serialized with ordering {doc['ordering']!r}, "
                f"this build uses {ORDERING_VERSION!r}"
            )
        spec = parse_group(doc["group"])
        window = ball(spec, doc["radius"])
        d = doc["block_dim"]
        n = len(window) * d
        flat = np.array(
            [complex(re, im) for re, im in doc["data"]], dtype=complex
        )
        if flat.size != n * n:
            raise SpecMismatchError("serialized data size mismatch")
        return BlockMatrix(window, d, flat.reshape(n, n))


def op_norm(x: BlockMatrix) -> float:
    """Operator norm: sqrt of the top eigenvalue of x* x."""
    m = x.data
    eigs = np.linalg.eigvalsh(m.conj().T @ m)
    return float(np.sqrt(max(0.0, float(eigs[-1]))))


def left_translation(ctx: CrossedContext, g: Element) -> BlockMatrix:
    """The translation operator: block (a, b) = I exactly when a = g b.

    Unitary when the group is finite; a partial isometry on windows.
    """
    ctx.group.validate(g)
    out = ctx.zero()
    blocks = out.blocks()
    eye = np.eye(ctx.d, dtype=complex)
    idx = ctx.window.index_of
    for j, b in enumerate(ctx.window):
        i = idx.get(ctx.group.multiply(g, b))
        if i is not None:
            blocks[i, j] = eye
    return out


def psi(ctx: CrossedContext, r) -> BlockMatrix:
    """Block-diagonal embedding of an algebra element: block (g,g) is
    the coefficient twisted by the inverse-element automorphism."""
    r = ctx.algebra.validate_member(r)
    out = ctx.zero()
    blocks = out.blocks()
    for i in range(ctx.nwin):
        blocks[i, i] = ctx.alpha_by_perm(ctx.inv_perms[i], r)
    return out


def diag(x: BlockMatrix) -> BlockMatrix:
    """Keep the diagonal blocks, zero the rest."""
    n = len(x.window)
    d = x.block_dim
    out = np.zeros_like(x.data)
    for i in range(n):
        s = slice(i * d, (i + 1) * d)
        out[s, s] = x.data[s, s]
    return BlockMatrix(x.window, d, out)


def fourier_coefficient(ctx: CrossedContext, x: BlockMatrix, g: Element) -> BlockMatrix:
    """The diagonal operator Diag(L_g^* x); block (h,h) = x_{(gh, h)}."""
    ctx.group.validate(g)
    out = ctx.zero()
    oblocks = out.blocks()
    xblocks = x.blocks()
    idx = ctx.window.index_of
    for j, b in enumerate(ctx.window):
        i = idx.get(ctx.group.multiply(g, b))
        if i is not None:
            oblocks[j, j] = xblocks[i, j]
    return out


def reconstruct(
    ctx: CrossedContext, x: BlockMatrix, approximate: bool = False
) -> BlockMatrix:
    """Sum of translates of the coefficient diagonals.

    Exact reproduction of x on finite groups; on windows it is a truncated
    resummation and must be requested with approximate=True.
    """
    if not ctx.group.is_finite() and not approximate:
        raise SpecMismatchError(
            "window reconstruction is approximate; pass approximate=True"
        )
    out = ctx.zero()
    oblocks = out.blocks()
    idx = ctx.window.index_of
    for g in ctx.window:
        coeff = fourier_coefficient(ctx, x, g).blocks()
        for j, b in enumerate(ctx.window):
            i = idx.get(ctx.group.multiply(g, b))
            if i is not None:
                oblocks[i, j] += coeff[j, j]
    return out


def schur_product(a: BlockMatrix, b: BlockMatrix) -> BlockMatrix:
    """Blockwise product: block (i,j) of the result is a_ij b_ij."""
    a._check_compatible(b)
    ab = np.einsum("ijkl,ijlm->ijkm", a.blocks(), b.blocks())
    n = len(a.window)
    d = a.block_dim
    data = ab.swapaxes(1, 2).reshape(n * d, n * d)
    return BlockMatrix(a.window, d, data)


def hadamard_multiplier(
    ctx: CrossedContext, chi: PdFunction, x: BlockMatrix
) -> BlockMatrix:
    """Scale block (g,h) by chi(g h^-1)."""
    n = ctx.nwin
    scale = np.empty((n, n), dtype=complex)
    rel = ctx.rel_table
    cache: Dict[int, complex] = {}
    for i in range(n):
        for j in range(n):
            t = rel[i, j]
            if t >= 0:
                val = cache.get(t)
                if val is None:
                    val = chi(ctx.window[t])
                    cache[t] = val
            else:
                val = chi(
                    ctx.group.multiply(
                        ctx.window[i], ctx.group.inverse(ctx.window[j])
                    )
                )
            scale[i, j] = val
    full = np.kron(scale, np.ones((ctx.d, ctx.d)))
    return BlockMatrix(ctx.window, ctx.d, x.data * full)


def p_seminorm(x: BlockMatrix, xi: np.ndarray) -> float:
    """Seminorm ||Diag(x* x)^(1/2) xi|| for a vector on window x internal."""
    d = x.block_dim
    n = len(x.window)
    xi = np.asarray(xi, dtype=complex).ravel()
    if xi.size != n * d:
        raise SpecMismatchError(f"vector length {xi.size}, expected {n * d}")
    m = x.data.conj().T @ x.data
    total = 0.0
    for i in range(n):
        s = slice(i * d, (i + 1) * d)
        blockm = (m[s, s] + m[s, s].conj().T) / 2.0
        w, v = np.linalg.eigh(blockm)
        root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
        total += float(np.sum(np.abs(root @ xi[s]) ** 2))
    return float(np.sqrt(total))


def phi_hom(
    ctx: CrossedContext, x: BlockMatrix, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Coefficient extraction: stack of algebra elements, one per window slot.

    Slot t holds the unique r with translate-diagonal Diag(L_{t^-1} x)
    equal to the block-diagonal embedding of r.  Raises when no such r
    exists (x is outside the crossed-product span) within tol.
    """
    n = ctx.nwin
    d = ctx.d
    xblocks = x.blocks()
    mul = ctx.mul_table
    coeffs = np.zeros((n, d, d), dtype=complex)
    for ti in range(n):
        r = xblocks[ti, 0].copy()
        for j in range(1, n):
            i = mul[ti, j]
            if i < 0:
                continue
            cand = ctx.alpha_by_perm(ctx.perms[j], np.asarray(xblocks[i, j]))
            defect = float(np.max(np.abs(cand - r)))
            if defect > tol:
                raise NotInCrossedProductError(
                    f"coefficient at window slot {ti} inconsistent across the "
                    f"diagonal (defect {defect:.3e})"
                )
        if not ctx.algebra.contains(r, tol):
            raise NotInCrossedProductError(
                f"coefficient at window slot {ti} leaves the "
                f"{ctx.algebra.kind} algebra"
            )
        if ctx.algebra.kind == "diagonal":
            r = np.diag(np.diag(r))
        coeffs[ti] = r
    return coeffs


def theta_embed(
    ctx: CrossedContext,
    coeffs: Union[np.ndarray, Dict[Element, np.ndarray]],
) -> BlockMatrix:
    """Assemble the operator with the given coefficient series.

    Entry (i, j) is the coefficient at g_i g_j^-1, twisted by the
    inverse-of-g_j automorphism.  Accepts a (n, d, d) stack aligned with
    the window or a dict keyed by group elements.
    """
    n = ctx.nwin
    d = ctx.d
    out = ctx.zero()
    oblocks = out.blocks()
    if isinstance(coeffs, dict):
        idx = ctx.window.index_of
        for t, r in coeffs.items():
            r = ctx.algebra.validate_member(r)
            for j, b in enumerate(ctx.window):
                i = idx.get(ctx.group.multiply(t, b))
                if i is not None:
                    oblocks[i, j] += ctx.alpha_by_perm(ctx.inv_perms[j], r)
        return out
    stack = np.asarray(coeffs, dtype=complex)
    if stack.shape != (n, d, d):
        raise SpecMismatchError(f"coefficient stack must be ({n},{d},{d})")
    rel = ctx.rel_table
    for j in range(n):
        pj = ctx.inv_perms[j]
        for i in range(n):
            t = rel[i, j]
            if t >= 0:
                oblocks[i, j] = ctx.alpha_by_perm(pj, stack[t])
    return out


def hadamard_product(
    ctx: CrossedContext, x: BlockMatrix, y: BlockMatrix, tol: float = DEFAULT_TOL
) -> BlockMatrix:
    """Coefficientwise product: the coefficient series multiply slotwise."""
    cx = phi_hom(ctx, x, tol)
    cy = phi_hom(ctx, y, tol)
    cz = np.einsum("tab,tbc->tac", cx, cy)
    return theta_embed(ctx, cz)

"""Exact and numerical linear algebra on skew adjacency matrices.

Rationals are :class:`fractions.Fraction` throughout (always normalised, so
equality is structural).  Kernel dimensions and determinants are computed
with fraction-free Bareiss elimination over the integers; the smallest
nonzero singular value is numeric and is cross-checked against the exact
kernel dimension.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from semigame.errors import InputError, InternalError
from semigame.graph import Digraph

ZERO_TOL = 1e-9


def fmt_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


@dataclass(frozen=True)
class SkewMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.rows)
        for i, row in enumerate(self.rows):
            if len(row) != k:
                raise InputError("skew matrix must be square")
            if row[i] != 0:
                raise InputError(f"nonzero diagonal entry at {i}")
            for j, x in enumerate(row):
                if x not in (-1, 0, 1) or self.rows[j][i] != -x:
                    raise InputError(f"entry ({i},{j}) breaks antisymmetry or is not in {{-1,0,1}}")

    @property
    def k(self) -> int:
        return len(self.rows)

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.k, self.k)

    def apply(self, p: Sequence) -> list[Fraction]:
        """Exact product ``A p``."""
        return [sum((Fraction(x) * y for x, y in zip(row, p) if x), Fraction(0)) for row in self.rows]


def skew_adjacency(D: Digraph) -> SkewMatrix:
    return SkewMatrix(D.table)


def _bareiss(rows: Sequence[Sequence[int]]) -> tuple[int, int]:
    """Return ``(rank, det)`` by fraction-free elimination; ``det`` is 0 unless full rank."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 0, 1
    ncols = len(m[0])
    rank = 0
    prev = 1
    sign = 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, n) if m[r][col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
            sign = -sign
        p = m[rank][col]
        for r in range(rank + 1, n):
            for c in range(col + 1, ncols):
                m[r][c] = (m[r][c] * p - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = p
        rank += 1
        if rank == n:
            break
    det = sign * m[n - 1][ncols - 1] if rank == n == ncols else 0
    return rank, det


def rank(M: SkewMatrix | Sequence[Sequence[int]]) -> int:
    rows = M.rows if isinstance(M, SkewMatrix) else M
    return _bareiss(rows)[0]


def nullspace_dimension(M: SkewMatrix) -> int:
    return M.k - rank(M)


def determinant(M: SkewMatrix | Sequence[Sequence[int]]) -> int:
    rows = M.rows if isinstance(M, SkewMatrix) else M
    if not rows:
        return 1
    return _bareiss(rows)[1]


def det_parity(M: SkewMatrix) -> str:
    return "odd" if determinant(M) % 2 else "even"


@dataclass(frozen=True)
class SpectralReport:
    k: int
    nullspace_dimension: int
    lambda2: float
    alpha: float
    determinant: int
    det_parity: str | None

    def to_json(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "nullspace_dimension": self.nullspace_dimension,
                "lambda2": float(f"{self.lambda2:.17g}"),
                "alpha": float(f"{self.alpha:.17g}"),
                "determinant": fmt_rational(self.determinant),
                "det_parity": self.det_parity,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SpectralReport":
        d = json.loads(text)
        det = parse_rational(d["determinant"])
        return cls(d["k"], d["nullspace_dimension"], d["lambda2"], d["alpha"], int(det), d["det_parity"])


def singular_values(M: SkewMatrix) -> np.ndarray:
    """Singular values of ``A``, ascending.

    Taken from an SVD of ``A`` directly: square roots of the eigenvalues of
    ``A^T A`` turn rounding noise of 1e-16 into 1e-8, which would cross the
    zero threshold.
    """
    if M.k == 0:
        return np.zeros(0)
    return np.sort(np.linalg.svd(M.array().astype(float), compute_uv=False))


def spectral_report(D: Digraph) -> SpectralReport:
    M = skew_adjacency(D)
    k = D.k
    r, det = _bareiss(M.rows) if k else (0, 1)
    nullity = k - r
    sv = singular_values(M)
    zero = sv < ZERO_TOL * max(k, 1)
    if int(zero.sum()) != nullity:
        raise InternalError(
            f"numeric zero count {int(zero.sum())} disagrees with exact kernel dimension {nullity}"
        )
    nonzero = sv[~zero]
    lam2 = float(nonzero.min()) if nonzero.size else 0.0
    return SpectralReport(
        k=k,
        nullspace_dimension=nullity,
        lambda2=lam2,
        alpha=lam2 / k**2 if k else 0.0,
        determinant=det,
        det_parity=("odd" if det % 2 else "even") if D.is_tournament() else None,
    )


def _as_probability(p: Sequence, k: int) -> list[Fraction]:
    p = [Fraction(x) for x in p]
    if len(p) != k:
        raise InputError(f"distribution has length {len(p)}, expected {k}")
    if any(x < 0 for x in p) or sum(p) != 1:
        raise InputError("not a probability vector (negative entry or sum != 1)")
    return p


def punish_gap(D: Digraph, p: Sequence, report: SpectralReport | None = None) -> tuple[Fraction, float]:
    """Return ``(max_v (A p)_v, alpha_D * max_v |p_v - 1/k|)``; the first is exact."""
    p = _as_probability(p, D.k)
    lhs = max(skew_adjacency(D).apply(p))
    report = report or spectral_report(D)
    dev = max(abs(float(x - Fraction(1, D.k))) for x in p)
    return lhs, report.alpha * dev


def punish_gap_weights(D: Digraph, weights: np.ndarray, report: SpectralReport | None = None):
    """Vectorised :func:`punish_gap` for rows of non-negative integer weights.

    Row ``w`` stands for ``p = w / sum(w)``.  Returns ``(num, den, rhs)``
    with the exact left side equal to ``num / den`` (integer arrays).
    """
    W = np.asarray(weights, dtype=np.int64)
    if W.ndim != 2 or W.shape[1] != D.k or (W < 0).any():
        raise InputError("weights must be a non-negative integer array of shape (m, k)")
    den = W.sum(axis=1)
    if (den <= 0).any():
        raise InputError("every weight row needs a positive total")
    num = (W @ skew_adjacency(D).array().T).max(axis=1)
    report = report or spectral_report(D)
    dev = np.abs(W / den[:, None] - 1.0 / D.k).max(axis=1)
    return num, den, report.alpha * dev

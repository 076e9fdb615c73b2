"""Growth statistics, moment-matched distribution fits and exact quasi-polynomial fitting."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import pi, sqrt
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import stats

EULER_GAMMA = float(np.euler_gamma)


def _layer_sizes(growth) -> np.ndarray:
    sizes = getattr(growth, "layer_sizes", growth)
    sizes = np.asarray(sizes, dtype=np.float64)
    if sizes.ndim != 1 or len(sizes) == 0:
        raise ValueError("growth must be a non-empty sequence of layer sizes")
    if (sizes < 0).any() or sizes.sum() <= 0:
        raise ValueError("layer sizes must be non-negative with a positive total")
    return sizes


@dataclass(frozen=True)
class StatsSummary:
    mean: float
    mode: int
    variance: float
    skewness: float
    excess_kurtosis: float
    total: int

    def to_dict(self) -> dict:
        return asdict(self)


def describe(growth) -> StatsSummary:
    """Moments of the layer index weighted by layer size.

    Central moments are accumulated in exact integers, so symmetric growth
    gives a skewness of exactly zero. Skewness and kurtosis are ``nan`` for a
    one-point distribution.
    """
    if getattr(growth, "truncated", False):
        raise ValueError("cannot describe a truncated growth run")
    sizes = [int(x) for x in getattr(growth, "layer_sizes", growth)]
    _layer_sizes(sizes)
    total = sum(sizes)
    first = sum(k * a for k, a in enumerate(sizes))
    # (k - mean) * total, kept integral
    dev = [k * total - first for k in range(len(sizes))]
    m2, m3, m4 = (Fraction(sum(a * d**p for a, d in zip(sizes, dev)), total ** (p + 1)) for p in (2, 3, 4))
    var = float(m2)
    if m2 > 0:
        skew = float(m3) / var**1.5
        kurt = float(m4 / (m2 * m2)) - 3.0
    else:
        skew = kurt = float("nan")
    mode = max(range(len(sizes)), key=lambda k: (sizes[k], -k))
    return StatsSummary(first / total, mode, var, skew, kurt, total)


class DistributionFit(NamedTuple):
    family: str
    loc: float
    scale: float
    max_abs_error: float


def _binned_error(sizes: np.ndarray, dist) -> float:
    pmf = sizes / sizes.sum()
    k = np.arange(len(sizes), dtype=np.float64)
    mass = dist.cdf(k + 0.5) - dist.cdf(k - 0.5)
    return float(np.max(np.abs(pmf - mass)))


def gaussian_fit(growth) -> DistributionFit:
    """Moment-matched normal; error is the max gap to the normal mass of each layer."""
    sizes = _layer_sizes(growth)
    summary = describe(sizes)
    if summary.variance <= 0:
        raise ValueError("degenerate growth: zero variance")
    sigma = sqrt(summary.variance)
    dist = stats.norm(summary.mean, sigma)
    return DistributionFit("normal", summary.mean, sigma, _binned_error(sizes, dist))


def gumbel_fit(growth) -> DistributionFit:
    """Moment-matched Gumbel, mirrored to the left tail for negatively skewed growth."""
    sizes = _layer_sizes(growth)
    summary = describe(sizes)
    if summary.variance <= 0:
        raise ValueError("degenerate growth: zero variance")
    scale = sqrt(6 * summary.variance) / pi
    if summary.skewness < 0:
        loc = summary.mean + EULER_GAMMA * scale
        return DistributionFit("gumbel_l", loc, scale, _binned_error(sizes, stats.gumbel_l(loc, scale)))
    loc = summary.mean - EULER_GAMMA * scale
    return DistributionFit("gumbel_r", loc, scale, _binned_error(sizes, stats.gumbel_r(loc, scale)))


# ------------------------------------------------------------ quasi-polynomials


@dataclass(frozen=True)
class QuasiPolynomial:
    """``f(n) = constituents[n % s](n)``; coefficients ascend in powers of ``n``.

    A constituent is ``None`` for residues the fit was not asked to cover.
    """

    s: int
    constituents: tuple[tuple[Fraction, ...] | None, ...]
    domain_min: int = 0
    verified_points: int = 0

    def __post_init__(self):
        if self.s < 1 or len(self.constituents) != self.s:
            raise ValueError("need one constituent per residue class")

    @property
    def degree(self) -> int:
        return max((len(c) - 1 for c in self.constituents if c), default=0)

    def __call__(self, n: int) -> Fraction:
        return quasipoly_eval(self, n)

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "constituents": [
                None if c is None else [[x.numerator, x.denominator] for x in c]
                for c in self.constituents
            ],
            "domain_min": self.domain_min,
            "verified_points": self.verified_points,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuasiPolynomial":
        cons = tuple(
            None if c is None else tuple(Fraction(num, den) for num, den in c)
            for c in data["constituents"]
        )
        return cls(int(data["s"]), cons, int(data.get("domain_min", 0)), int(data.get("verified_points", 0)))

    def describe_constituent(self, r: int, var: str = "n") -> str:
        coeffs = self.constituents[r]
        if coeffs is None:
            return "undetermined"
        parts = []
        for power in range(len(coeffs) - 1, -1, -1):
            c = coeffs[power]
            if c == 0:
                continue
            mono = "" if power == 0 else var if power == 1 else f"{var}^{power}"
            parts.append(f"({c}){mono}" if mono else f"({c})")
        return " + ".join(parts) or "0"


def _horner(coeffs: Sequence[Fraction], n: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


def quasipoly_eval(qp: QuasiPolynomial, n: int) -> Fraction:
    if n < qp.domain_min:
        raise ValueError(f"n={n} is below the fitted domain (n >= {qp.domain_min})")
    coeffs = qp.constituents[n % qp.s]
    if coeffs is None:
        raise ValueError(f"residue {n % qp.s} mod {qp.s} was not fitted")
    return _horner(coeffs, n)


def interpolate(xs: Sequence[int], ys: Sequence) -> tuple[Fraction, ...]:
    """Exact monomial coefficients of the unique polynomial through the points."""
    coeffs = [Fraction(0)] * len(xs)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        # Lagrange basis polynomial for node i, built as ascending coefficients
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        scale = Fraction(yi) / denom
        for k, b in enumerate(basis):
            coeffs[k] += scale * b
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def quasipoly_fit(points: Iterable[tuple[int, object]], s_max: int = 6, deg_max: int = 2,
                  min_verify: int = 1, residues: Sequence[int] | None = None) -> QuasiPolynomial | None:
    """Smallest modulus, then smallest degree, whose constituents fit every point exactly.

    Each fitted residue class must hold at least ``degree + 1 + min_verify``
    points: the first ``degree + 1`` determine the constituent and the rest
    check it. ``residues`` restricts which classes must be fitted (for sweeps
    that sample, say, only even ``n``); it is read modulo each candidate ``s``.
    """
    pts = sorted((int(n), Fraction(v)) for n, v in points)
    if not pts:
        return None
    ns = [n for n, _ in pts]
    if len(set(ns)) != len(ns):
        raise ValueError("points must have distinct n")
    for s in range(1, s_max + 1):
        wanted = range(s) if residues is None else sorted({r % s for r in residues})
        classes = {r: [(n, v) for n, v in pts if n % s == r] for r in wanted}
        if residues is not None and any(n % s not in classes for n in ns):
            continue
        for deg in range(deg_max + 1):
            need = deg + 1 + min_verify
            if any(len(c) < need for c in classes.values()):
                break
            cons: list = [None] * s
            verified = 0
            ok = True
            for r, cls in classes.items():
                xs = [n for n, _ in cls[: deg + 1]]
                ys = [v for _, v in cls[: deg + 1]]
                coeffs = interpolate(xs, ys)
                if any(_horner(coeffs, n) != v for n, v in cls[deg + 1:]):
                    ok = False
                    break
                cons[r] = coeffs
                verified += len(cls) - deg - 1
            if ok:
                return QuasiPolynomial(s, tuple(cons), ns[0], verified)
    return None

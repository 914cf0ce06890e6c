"""Small-factor and longest-factor statistics, the Dickman function and random permutations."""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime, primerange

from .bounds import CharpolySource, hecke_charpolys
from .modsym.space import DEFAULT_SIZE_CAP, genus_x0
from .poly import IntPoly, factor_over_Z, largest_irreducible_degree_mod_p, reduce_mod
from .poly.integer import DEFAULT_CERT_PRIMES, DEFAULT_DEGREE_CAP, DEFAULT_SMALL_DEGREE

DELTA_FIELDS = [
    "N",
    "ell",
    "dim_plus",
    "dim_minus",
    "degstar_plus",
    "degstar_minus",
    "delta_plus",
    "delta_minus",
    "certified",
]
YSTAT_FIELDS = ["p", "ell", "D", "degstar", "Y"]
CDF_FIELDS = ["y", "empirical", "predicted"]


class GenusZero(ValueError):
    """The space S_2(Gamma_0(p)) is zero, so Y is undefined."""


# --- small Hecke factors over Q ---


@dataclass
class SideDegstar:
    dim: int
    degstar: int  # lower end when uncertified
    degstar_upper: int
    certified: bool

    @property
    def delta(self) -> int:
        return self.dim - self.degstar

    @property
    def delta_interval(self) -> tuple[int, int]:
        return (self.dim - self.degstar_upper, self.dim - self.degstar)


def _degstar_Q(f: IntPoly, degree_cap: int, small_degree: int, n_primes: int) -> SideDegstar:
    if f.degree <= 0:
        return SideDegstar(0, 0, 0, True)
    F = factor_over_Z(f, degree_cap=degree_cap, small_degree=small_degree, n_primes=n_primes)
    if F.certified:
        d = F.largest_degree()
        return SideDegstar(f.degree, d, d, True)
    # unresolved pieces have no factor of degree <= small_degree
    lower = max(F.largest_certified_degree(), small_degree + 1)
    return SideDegstar(f.degree, lower, F.largest_degree(), False)


@dataclass
class DeltaRecord:
    N: int
    ell: int
    plus: SideDegstar
    minus: SideDegstar

    @property
    def certified(self) -> bool:
        return self.plus.certified and self.minus.certified

    def row(self) -> dict:
        return {
            "N": self.N,
            "ell": self.ell,
            "dim_plus": self.plus.dim,
            "dim_minus": self.minus.dim,
            "degstar_plus": self.plus.degstar,
            "degstar_minus": self.minus.degstar,
            "delta_plus": self.plus.delta,
            "delta_minus": self.minus.delta,
            "certified": self.certified,
        }


def delta(
    N: int,
    ell: int,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    small_degree: int = DEFAULT_SMALL_DEGREE,
    size_cap: int = DEFAULT_SIZE_CAP,
    n_primes: int = DEFAULT_CERT_PRIMES,
    source: CharpolySource = hecke_charpolys,
) -> DeltaRecord:
    """delta^+- = dim - deg*_Q of the characteristic polynomial of T_ell on each side."""
    plus, minus = source(N, ell, size_cap)
    return DeltaRecord(
        N,
        ell,
        _degstar_Q(plus, degree_cap, small_degree, n_primes),
        _degstar_Q(minus, degree_cap, small_degree, n_primes),
    )


def delta_histogram(records: list[DeltaRecord]) -> tuple[dict[int, int], int]:
    """Counts of delta values over both sides of certified records, and the uncertified tally."""
    hist: dict[int, int] = {}
    skipped = 0
    for rec in records:
        for side in (rec.plus, rec.minus):
            if not side.certified:
                skipped += 1
                continue
            hist[side.delta] = hist.get(side.delta, 0) + 1
    return dict(sorted(hist.items())), skipped


# --- longest factors mod p ---


@dataclass
class YRecord:
    p: int
    ell: int
    D: int
    D_plus: int
    D_minus: int
    degstar: int
    degstar_plus: int
    degstar_minus: int

    @property
    def Y(self) -> float:
        return self.degstar / self.D

    @property
    def Y_plus(self) -> float | None:
        return self.degstar_plus / self.D_plus if self.D_plus else None

    @property
    def Y_minus(self) -> float | None:
        return self.degstar_minus / self.D_minus if self.D_minus else None

    @property
    def alpha_proxy(self) -> float:
        """Proxy for alpha_p: Y itself."""
        return self.Y

    def row(self) -> dict:
        return {"p": self.p, "ell": self.ell, "D": self.D, "degstar": self.degstar, "Y": repr(self.Y)}


def _degstar_mod(f: IntPoly, p: int) -> int:
    if f.degree <= 0:
        return 0
    return largest_irreducible_degree_mod_p(reduce_mod(f, p))


def y_stat(
    p: int,
    ell: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    source: CharpolySource = hecke_charpolys,
) -> YRecord:
    """Y_ell(p) from the distinct-degree factorization of Phi_{p,ell} mod p."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if ell == p:
        raise ValueError("ell must differ from p")
    D = genus_x0(p)
    if D == 0:
        raise GenusZero(f"S_2(Gamma_0({p})) is zero")
    plus, minus = source(p, ell, size_cap)
    dp = _degstar_mod(plus, p)
    dm = _degstar_mod(minus, p)
    full = _degstar_mod(plus * minus, p)
    if full != max(dp, dm):
        raise ArithmeticError(f"deg* of Phi mod {p} is {full}, sides give {dp}, {dm}")
    return YRecord(p, ell, D, plus.degree, minus.degree, full, dp, dm)


def maeda_bound(
    p: int,
    ell: int = 2,
    size_cap: int = DEFAULT_SIZE_CAP,
    source: CharpolySource = hecke_charpolys,
) -> int:
    """Lower bound for the largest simple rational Hecke module in S_{p+1}(SL_2(Z))."""
    return y_stat(p, ell, size_cap, source).degstar


# --- Dickman function ---

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


class _DickmanGrid:
    """rho on [0, K] as piecewise polynomials on panels aligned with the integers.

    On [k, k+1], rho(x) = rho(k) - int_k^x rho(t - 1) / t dt.  The panel of
    [k, k+1] containing x lies one unit to the right of a panel of [k-1, k],
    so the integrand is a polynomial interpolant divided by t and Gauss
    quadrature on each panel is accurate to rounding.
    """

    def __init__(self, panels: int):
        self.panels = panels
        self.h = 1.0 / panels
        self.nodes = (_GL_NODES + 1) / 2  # on [0, 1]
        n = len(self.nodes)
        # barycentric weights for the node set
        w = np.ones(n)
        for i in range(n):
            for j in range(n):
                if i != j:
                    w[i] /= self.nodes[i] - self.nodes[j]
        self.bary = w
        # values[k] has shape (panels, nodes); starts[k] = rho at panel left ends
        self.values = [np.ones((panels, n))]
        self.starts = [np.ones(panels)]
        self._ends = {0: 1.0, 1: 1.0}
        self.lock = threading.Lock()

    def _interp(self, k: int, s: np.ndarray) -> np.ndarray:
        """rho(k + s) for s in [0, 1] (vectorized), using interval k's panels."""
        s = np.asarray(s, dtype=float)
        j = np.minimum((s * self.panels).astype(np.int64), self.panels - 1)
        local = s * self.panels - j  # in [0, 1]
        diff = local[..., None] - self.nodes
        exact = np.isclose(diff, 0.0, atol=1e-15)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.bary / diff
            out = (terms * self.values[k][j]).sum(-1) / terms.sum(-1)
        hit = exact.any(-1)
        if hit.any():
            idx = np.argmax(exact, axis=-1)
            out = np.where(hit, self.values[k][j, idx], out)
        return out

    def _extend(self, K: int) -> None:
        with self.lock:
            while len(self.values) <= K:
                k = len(self.values)
                a = k + np.arange(self.panels) * self.h  # panel left ends

                # integral over the whole panel and up to each node
                def integral(lo: np.ndarray, width: np.ndarray) -> np.ndarray:
                    t = lo[..., None] + width[..., None] * (_GL_NODES + 1) / 2
                    f = self._interp(k - 1, t - k) / t
                    return (f * _GL_WEIGHTS).sum(-1) * width / 2

                full = integral(a, np.full(self.panels, self.h))
                rho_k = self._ends[k]
                starts = rho_k - np.concatenate(([0.0], np.cumsum(full)[:-1]))
                lo = np.repeat(a[:, None], len(self.nodes), axis=1)
                width = self.nodes[None, :] * self.h * np.ones((self.panels, 1))
                vals = starts[:, None] - integral(lo, width)
                self.values.append(vals)
                self.starts.append(starts)
                self._ends[k + 1] = float(starts[-1] - full[-1])

    def __call__(self, u: float) -> float:
        if u <= 1:
            return 1.0
        k = int(math.floor(u))
        self._extend(k)
        if u == k:
            return self._ends[k]
        return float(self._interp(k, np.array(u - k)))


_GRIDS: dict[int, _DickmanGrid] = {}
_GRIDS_LOCK = threading.Lock()
DEFAULT_PANELS = 2**10


def _grid(panels: int) -> _DickmanGrid:
    with _GRIDS_LOCK:
        if panels not in _GRIDS:
            _GRIDS[panels] = _DickmanGrid(panels)
        return _GRIDS[panels]


def dickman(u: float, tol: float = 1e-9) -> float:
    """The Dickman function rho(u) to absolute accuracy tol.

    The value on the default grid is compared with a grid of half the panel
    count; the panel count doubles until the two agree to within tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if u < 0:
        raise ValueError("u must be nonnegative")
    if u <= 1:
        return 1.0
    panels = DEFAULT_PANELS
    coarse = _grid(panels // 2)(u)
    fine = _grid(panels)(u)
    while abs(fine - coarse) > tol and panels < 2**16:
        panels *= 2
        coarse, fine = fine, _grid(panels)(u)
    return fine


def predicted_cdf(y: float) -> float:
    """rho(1 / (2y))^2, the model's probability that Y <= y."""
    if not 0 < y <= 1:
        raise ValueError("y must lie in (0, 1]")
    return dickman(1 / (2 * y)) ** 2


# --- random permutations ---


def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def perm_longest_cycle(n: int, rng: np.random.Generator | int | None = None) -> int:
    """Longest cycle of a uniform random permutation of n points (Feller coupling).

    With independent B_i ~ Bernoulli(1/i), the gaps between consecutive ones in
    B_1 ... B_n 1 are distributed as the cycle lengths.
    """
    return int(perm_longest_cycles(n, 1, rng)[0])


def perm_longest_cycles(n: int, trials: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)
    out = np.empty(trials, dtype=np.int64)
    inv = 1.0 / np.arange(1, n + 1)
    chunk = max(1, 2**22 // n)
    for start in range(0, trials, chunk):
        m = min(chunk, trials - start)
        ones = rng.random((m, n)) < inv
        ones[:, 0] = True
        pos = np.arange(1, n + 2)
        marks = np.concatenate([ones, np.ones((m, 1), dtype=bool)], axis=1)
        # distance to the next one, evaluated at each one
        nxt = np.where(marks, pos, n + 2)
        nxt = np.minimum.accumulate(nxt[:, ::-1], axis=1)[:, ::-1]
        following = np.concatenate([nxt[:, 1:], np.full((m, 1), n + 2)], axis=1)
        gaps = np.where(marks[:, :n], following[:, :n] - pos[:n], 0)
        out[start : start + m] = gaps.max(axis=1)
    return out


# --- Y against the Dickman model ---


@dataclass
class CdfComparison:
    ell: int
    primes: list[int]
    records: list[YRecord]
    rows: list[tuple[float, float, float]] = field(default_factory=list)
    distance: float | None = None

    @property
    def defined(self) -> bool:
        return self.distance is not None


def ystat_primes(lo: int, hi: int, ell: int) -> list[int]:
    """Primes in [lo, hi] where Y_ell(p) is defined."""
    return [p for p in primerange(lo, hi + 1) if p != ell and genus_x0(p) > 0]


def y_cdf_compare(
    lo: int,
    hi: int,
    ell: int = 2,
    size_cap: int = DEFAULT_SIZE_CAP,
    source: CharpolySource = hecke_charpolys,
) -> CdfComparison:
    """Empirical CDF of Y_ell(p) over primes p in [lo, hi] against rho(1/(2y))^2."""
    records = [y_stat(p, ell, size_cap, source) for p in ystat_primes(lo, hi, ell)]
    return compare_records(records, ell)


def compare_records(records: list[YRecord], ell: int) -> CdfComparison:
    out = CdfComparison(ell, [r.p for r in records], records)
    if not records:
        return out
    ys = np.sort(np.array([r.Y for r in records]))
    n = len(ys)
    dist = 0.0
    for y in np.unique(ys):
        below = np.searchsorted(ys, y, side="left") / n
        upto = np.searchsorted(ys, y, side="right") / n
        pred = predicted_cdf(float(y))
        out.rows.append((float(y), float(upto), pred))
        dist = max(dist, abs(upto - pred), abs(below - pred))
    out.distance = float(dist)
    return out


def write_csv(rows: list[dict], fields: list[str], stream: io.TextIOBase | None = None) -> str:
    buf = stream or io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue() if stream is None else ""

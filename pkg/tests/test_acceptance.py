"""Acceptance criteria 1-9, each run at its stated tolerance and time budget.

Every test records one PASS/FAIL line, listed again in the terminal summary.
Criterion 3 is research-scale and runs only with HECKE_NIGHTLY=1.
"""

import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from acceptance_log import record
from oracles import dickman_trapezoid
from sympy import primerange

from heckecong.bounds import detected_lower_bound, hecke_charpolys, theorem_bound
from heckecong.dihedral import dihedral_charpoly, find_l0, half_cyclotomic
from heckecong.modsym import al_split, build_space
from heckecong.modsym.space import is_squarefree
from heckecong.poly import (
    IntPoly,
    certify_irreducible,
    factor_mod_p,
    factor_over_Z,
    poly_divides_mod_p,
    rational_roots,
    reduce_mod,
)
from heckecong.quadforms import class_number, form_order, group_structure, order_in_unit_quotient, prime_form
from heckecong.stats import dickman, make_rng, perm_longest_cycles, y_cdf_compare

X = IntPoly.x()
NIGHTLY = os.environ.get("HECKE_NIGHTLY") == "1"

QUINTIC = X**5 + 2 * X**4 - 4 * X**3 - 9 * X**2 - 2 * X + 1
DECIC = X**10 - 11 * X**8 + 2 * X**7 + 39 * X**6 - 12 * X**5 - 52 * X**4 + 16 * X**3 + 24 * X**2 - 5 * X - 1
MOD2_QUINTICS = ["X^5 + X^2 + 1", "X^5 + X^3 + 1", "X^5 + X^4 + X^3 + X^2 + 1"]


class Checks:
    """Named boolean checks; the detail line lists the ones that failed."""

    def __init__(self):
        self.items: list[tuple[str, bool]] = []

    def __call__(self, name: str, ok: bool) -> None:
        self.items.append((name, bool(ok)))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.items)

    def detail(self, elapsed: float) -> str:
        bad = [n for n, ok in self.items if not ok]
        head = f"{len(self.items) - len(bad)}/{len(self.items)} checks, {elapsed:.1f}s"
        return head + (f"; failed: {', '.join(bad)}" if bad else "")


def _finish(key: str, checks: Checks, t0: float, budget: float) -> None:
    elapsed = time.perf_counter() - t0
    checks(f"time <= {budget:g}s", elapsed <= budget)
    record(key, checks.ok, checks.detail(elapsed))
    assert checks.ok, checks.detail(elapsed)


# --- 1. the level 719 example ---


def test_criterion_1_example_719():
    t0 = time.perf_counter()
    c = Checks()
    c("h(-719) = 31", class_number(-719) == 31)
    psi = factor_mod_p(reduce_mod(half_cyclotomic(31), 2))
    c(
        "psi_31 mod 2",
        [str(g) for g, _ in psi.factors] == MOD2_QUINTICS and all(m == 1 for _, m in psi.factors),
    )
    S = build_space(719)
    c("dim 60", S.cuspidal_dimension == 60)
    c("split (45, 15)", al_split(S).dims == (45, 15))
    plus, minus = hecke_charpolys(719, 2)
    F = factor_over_Z(minus)
    c(
        "Phi^- = quintic * decic",
        F.certified and sorted(F.factors, key=lambda t: t[0].degree) == [(QUINTIC, 1), (DECIC, 1)],
    )
    c("deg P = 45", plus.degree == 45)
    full = reduce_mod(plus * minus, 2)
    c("quintics divide Phi mod 2", all(poly_divides_mod_p(g, full) for g, _ in psi.factors))
    c("theorem_bound = 5", theorem_bound(719, 2).theorem == 5)
    c("detected >= 5", detected_lower_bound(719, 2).degstar >= 5)
    _finish("1", c, t0, 120)


# --- 2. the class group table ---

TABLE_2 = [(81799, 127, 7), (81839, 377, 42), (81847, 183, 60), (81883, 35, 12), (81899, 101, 50)]


def test_criterion_2_class_group_table():
    t0 = time.perf_counter()
    c = Checks()
    slowest = 0.0
    for N, h, m in TABLE_2:
        t = time.perf_counter()
        G = group_structure(-N)
        rep = theorem_bound(N, 2)
        c(f"{N}: C_{h}, m = {m}", G.elementary_divisors == (h,) and rep.r == h and rep.m == m)
        slowest = max(slowest, time.perf_counter() - t)
    c("each row < 60s", slowest < 60)
    _finish("2", c, t0, 5 * 60)


# --- 3. large levels (nightly) ---


@pytest.mark.slow
@pytest.mark.nightly
@pytest.mark.skipif(not NIGHTLY, reason="research-scale; set HECKE_NIGHTLY=1")
def test_criterion_3_large_levels():
    t0 = time.perf_counter()
    c = Checks()
    t = time.perf_counter()
    plus, minus = hecke_charpolys(10007, 2)
    c("10007 dims (455, 379)", (plus.degree, minus.degree) == (455, 379))
    c("10007 within 30 min", time.perf_counter() - t <= 1800)
    t = time.perf_counter()
    plus, minus = hecke_charpolys(10061, 2)
    c("10061 dim 838", plus.degree + minus.degree == 838)
    roots = rational_roots(minus)
    cofactor = minus
    for a in roots:
        cofactor = cofactor // (X - a)
    resolved = len(roots) == 1 and certify_irreducible(cofactor)
    c(
        "10061 minus side [383][1]" if resolved else "10061 minus side unresolved",
        resolved and cofactor.degree == 383,
    )
    c("10061 within 30 min", time.perf_counter() - t <= 1800)
    _finish("3", c, t0, 3600)


def test_criterion_3_reported_when_skipped():
    if not NIGHTLY:
        record("3", None, "nightly only (set HECKE_NIGHTLY=1); not run")


# --- 4. prime levels 7 mod 8 ---


def test_criterion_4_prime_levels_7_mod_8():
    t0 = time.perf_counter()
    violations = []
    levels = [N for N in primerange(7, 5001) if N % 8 == 7]
    for N in levels:
        h = class_number(-N)
        try:
            f = prime_form(-N, 2)
        except ValueError:
            violations.append((N, "no prime form"))
            continue
        r = form_order(f)
        m = order_in_unit_quotient(2, r)
        if h % 2 == 0:
            violations.append((N, "h even"))
        if r < math.log2(N / 4):
            violations.append((N, "r small"))
        if r >= 3 and m < math.log2(r - 1) - 1:
            violations.append((N, "m small"))
    c = Checks()
    c(f"{len(levels)} levels, {len(violations)} violations", not violations)
    _finish("4", c, t0, 300)


# --- 5. the congruence and detection property up to 600 ---


def _theorem_levels(limit: int) -> list[tuple[int, int, int]]:
    out = []
    for N in range(3, limit + 1):
        if N % 4 == 3 and is_squarefree(N):
            rep = theorem_bound(N, 2)
            if rep.m is not None and rep.m > 2:
                out.append((N, rep.r, rep.m))
    return out


def _property_violations(levels, ells_for, degree_ells_for) -> list[tuple[int, int, str]]:
    bad = []
    for N, r, m in levels:
        for ell in ells_for(N, r):
            dpoly = reduce_mod(dihedral_charpoly(N, r, ell), 2)
            plus, minus = hecke_charpolys(N, ell)
            full = reduce_mod(plus * minus, 2)
            if not all(poly_divides_mod_p(g, full) for g, _ in factor_mod_p(dpoly).factors):
                bad.append((N, ell, "factor"))
        for ell in degree_ells_for(N, r):
            if detected_lower_bound(N, ell).degstar < m:
                bad.append((N, ell, "degree"))
    return bad


@pytest.mark.xfail(
    strict=True,
    reason="with ell = 2 = p the weight-raised form need not keep the weight-one a_2; "
    "19 of 37 levels violate the literal statement",
)
def test_criterion_5_literal_ell_2():
    t0 = time.perf_counter()
    levels = _theorem_levels(600)
    bad = _property_violations(levels, lambda N, r: [2], lambda N, r: [2])
    failing = sorted({N for N, _, _ in bad})
    c = Checks()
    c(f"{len(levels)} levels with m > 2, {len(failing)} violating ({', '.join(map(str, failing))})", not bad)
    _finish("5", c, t0, 600)


def test_criterion_5_generating_primes():
    # divisibility at ell in {l0, 3, 5, 7} prime to 2N; the degree bound only at
    # l0, the least prime whose Frobenius generates the cyclic quotient (a
    # non-generating Frobenius puts the eigenvalue in a proper subfield)
    t0 = time.perf_counter()
    levels = _theorem_levels(600)

    def ells(N, r):
        base = {find_l0(N, r, p=2)} | {q for q in (3, 5, 7) if N % q}
        return sorted(base)

    bad = _property_violations(levels, ells, lambda N, r: [find_l0(N, r, p=2)])
    c = Checks()
    c(f"{len(levels)} levels, {len(bad)} violations", not bad)
    _finish("5b", c, t0, 600)


# --- 6. the Dickman function ---


def test_criterion_6_dickman():
    t0 = time.perf_counter()
    c = Checks()
    c("rho(1) = 1", dickman(1.0) == 1.0)
    err2 = abs(dickman(2.0) - (1 - math.log(2)))
    c(f"|rho(2) - (1 - ln 2)| = {err2:.1e}", err2 <= 1e-8)
    for u in (2.5, 3.0, 4.0):
        err = abs(dickman(u) - dickman_trapezoid(u))
        c(f"|rho({u}) - oracle| = {err:.1e}", err <= 1e-6)
    _finish("6", c, t0, 60)


# --- 7. the permutation model ---


def test_criterion_7_permutations():
    t0 = time.perf_counter()
    draws = perm_longest_cycles(1000, 20_000, make_rng(20240607))
    freq = float(np.mean(draws <= 500))
    gap = abs(freq - dickman(2.0))
    c = Checks()
    c(f"P(longest <= 500) = {freq:.4f}, gap {gap:.4f}", gap <= 0.015)
    _finish("7", c, t0, 60)


# --- 8. the longest-factor distribution ---


@pytest.fixture(scope="module")
def ycdf_2000():
    t0 = time.perf_counter()
    cmp = y_cdf_compare(100, 2000, 2)
    return cmp, time.perf_counter() - t0


@pytest.mark.xfail(
    strict=True,
    reason="finite-size effect: D+ exceeds D/2, so about 20% of Y values lie above 1/2 "
    "where rho(1/(2y))^2 is already 1",
)
def test_criterion_8_ycdf(ycdf_2000):
    cmp, elapsed = ycdf_2000
    t0 = time.perf_counter() - elapsed
    c = Checks()
    above = float(np.mean([r.Y >= 0.5 for r in cmp.records]))
    c(
        f"{len(cmp.primes)} primes, sup distance {cmp.distance:.4f} (share of Y >= 1/2: {above:.4f})",
        cmp.distance <= 0.10,
    )
    _finish("8", c, t0, 900)


def test_criterion_8_finite_size_model(ycdf_2000):
    # Same data against the model it approximates at finite size: the longest
    # cycle of independent random permutations of D+ and D- points, over D.
    cmp, _ = ycdf_2000
    t0 = time.perf_counter()
    rng = make_rng(8)
    sims = []
    for rec in cmp.records:
        a = perm_longest_cycles(rec.D_plus, 400, rng) if rec.D_plus else np.zeros(400)
        b = perm_longest_cycles(rec.D_minus, 400, rng) if rec.D_minus else np.zeros(400)
        sims.append(np.maximum(a, b) / rec.D)
    sims = np.sort(np.concatenate(sims))
    ys = np.sort([r.Y for r in cmp.records])
    grid = np.unique(np.concatenate([ys, sims]))
    emp = np.searchsorted(ys, grid, side="right") / len(ys)
    mod = np.searchsorted(sims, grid, side="right") / len(sims)
    dist = float(np.abs(emp - mod).max())
    c = Checks()
    c(f"sup distance to the finite-size model {dist:.4f}", dist <= 0.10)
    _finish("8b", c, t0, 120)


# --- 9. property suites ---

PROPERTY_SUITES = [
    "tests/test_poly.py::test_factor_mod_p_roundtrip",
    "tests/test_poly.py::test_factor_over_Z_roundtrip",
    "tests/test_quadforms.py::test_group_axioms",
    "tests/test_modsym.py::test_genus_all_levels_up_to_300",
    "tests/test_modsym.py::test_hecke_operators_commute",
    "tests/test_modsym.py::test_weil_bound",
]


def test_criterion_9_property_suites_standalone():
    t0 = time.perf_counter()
    root = Path(__file__).resolve().parent.parent
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_SUITES],
        cwd=root,
        check=False,
        capture_output=True,
        text=True,
    )
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    c = Checks()
    c(tail, proc.returncode == 0)
    _finish("9", c, t0, 900)

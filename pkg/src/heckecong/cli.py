"""Command-line interface: ``heckecong <command> [options]``.

Exit codes: 0 success, 2 hypothesis refusal, 3 budget refusal, 4 internal
inconsistency.
"""

from __future__ import annotations

import functools
import hashlib
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import click
from sympy import isprime

from . import __version__
from .bounds import HypothesisRefusal, congruence_check, detected_lower_bound, theorem_bound
from .cache import CachedCharpolys, ResultCache
from .dihedral import RamifiedPrime, SearchExhausted, dihedral_charpoly, find_l0
from .modsym.space import DEFAULT_SIZE_CAP, BudgetError, LevelError, genus_x0, is_squarefree
from .poly import CharpolyError, factor_mod_p, factor_over_Z, reduce_mod
from .poly.integer import DEFAULT_CERT_PRIMES, DEFAULT_DEGREE_CAP
from .quadforms import DiscriminantError, InertPrime, group_structure
from .stats import (
    CDF_FIELDS,
    DELTA_FIELDS,
    YSTAT_FIELDS,
    GenusZero,
    compare_records,
    delta,
    dickman,
    maeda_bound,
    make_rng,
    perm_longest_cycles,
    y_stat,
    ystat_primes,
)

EXIT_OK = 0
EXIT_REFUSAL = 2
EXIT_BUDGET = 3
EXIT_INCONSISTENT = 4

log = logging.getLogger("heckecong")


@dataclass(frozen=True)
class RunConfig:
    cache_dir: str | None = None
    size_cap: int = DEFAULT_SIZE_CAP
    degree_cap: int = DEFAULT_DEGREE_CAP
    cert_primes: int = DEFAULT_CERT_PRIMES
    seed: int = 0
    fmt: str = "json"
    verbosity: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("size_cap", "degree_cap", "cert_primes", "workers"):
            if getattr(self, name) <= 0:
                raise click.BadParameter(f"{name} must be positive")

    def config_hash(self) -> str:
        # only settings that can change results; paths, logging and pool size cannot
        keys = {
            "size_cap": self.size_cap,
            "degree_cap": self.degree_cap,
            "cert_primes": self.cert_primes,
            "seed": self.seed,
            "format": self.fmt,
        }
        return hashlib.sha256(json.dumps(keys, sort_keys=True).encode()).hexdigest()[:16]

    def meta(self) -> dict:
        return {
            "tool": "heckecong",
            "version": __version__,
            "config_hash": self.config_hash(),
            "seed": self.seed,
        }

    def source(self):
        return CachedCharpolys(ResultCache(self.cache_dir))


# --- emitters ---


def _flatten(obj, prefix: str = "") -> dict:
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
        return out
    if isinstance(obj, list):
        return {prefix[:-1]: json.dumps(obj, sort_keys=True)}
    return {prefix[:-1]: obj}


def _csv_text(rows: list[dict], fields: list[str], cfg: RunConfig, footer: list[str] = ()) -> str:
    import csv

    buf = io.StringIO()
    m = cfg.meta()
    buf.write(f"# tool={m['tool']} version={m['version']} config_hash={m['config_hash']} seed={m['seed']}\n")
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def emit_report(cfg: RunConfig, report: dict) -> None:
    if cfg.fmt == "csv":
        flat = _flatten(report)
        click.echo(_csv_text([flat], list(flat), cfg), nl=False)
    else:
        click.echo(json.dumps({"meta": cfg.meta(), **report}, sort_keys=True, indent=2))


def emit_rows(cfg: RunConfig, rows: list[dict], fields: list[str], summary: dict | None = None) -> None:
    summary = summary or {}
    if cfg.fmt == "json":
        click.echo(json.dumps({"meta": cfg.meta(), "rows": rows, **summary}, sort_keys=True, indent=2))
    else:
        footer = [f"{k}={_footer_value(v)}" for k, v in sorted(summary.items())]
        click.echo(_csv_text(rows, fields, cfg, footer), nl=False)


def _footer_value(v) -> str:
    if isinstance(v, dict):
        return " ".join(f"{k}:{x}" for k, x in v.items())
    return "undefined" if v is None else str(v)


# --- options and error handling ---


def _config_options(default_fmt: str):
    def wrap(f):
        @click.option(
            "--cache",
            "cache_dir",
            type=click.Path(file_okay=False),
            default=None,
            help="Cache directory (HECKE_CACHE overrides).",
        )
        @click.option("--seed", type=int, default=0, show_default=True, help="RNG seed recorded in outputs.")
        @click.option(
            "--format", "fmt", type=click.Choice(["csv", "json"]), default=default_fmt, show_default=True
        )
        @click.option(
            "--size-cap",
            type=int,
            default=DEFAULT_SIZE_CAP,
            show_default=True,
            help="Largest level for modular symbols.",
        )
        @click.option(
            "--degree-cap",
            type=int,
            default=DEFAULT_DEGREE_CAP,
            show_default=True,
            help="Largest factor degree tried by recombination.",
        )
        @click.option(
            "--cert-primes",
            type=int,
            default=DEFAULT_CERT_PRIMES,
            show_default=True,
            help="Primes used for irreducibility certificates.",
        )
        @click.option("--workers", type=int, default=1, show_default=True, help="Worker processes for scans.")
        @click.option("-v", "--verbose", "verbosity", count=True)
        @functools.wraps(f)
        def inner(cache_dir, seed, fmt, size_cap, degree_cap, cert_primes, workers, verbosity, **kw):
            cache_dir = os.environ.get("HECKE_CACHE") or cache_dir
            cfg = RunConfig(cache_dir, size_cap, degree_cap, cert_primes, seed, fmt, verbosity, workers)
            logging.basicConfig(
                level=logging.WARNING - 10 * min(verbosity, 2),
                stream=sys.stderr,
                format="%(levelname)s %(name)s: %(message)s",
            )
            return _guarded(f, cfg, **kw)

        return inner

    return wrap


_REFUSALS = (
    HypothesisRefusal,
    RamifiedPrime,
    InertPrime,
    DiscriminantError,
    LevelError,
    GenusZero,
    SearchExhausted,
)


def _guarded(f, cfg: RunConfig, **kw):
    try:
        code = f(cfg, **kw)
    except _REFUSALS as exc:
        click.echo(f"refused: {exc}", err=True)
        sys.exit(EXIT_REFUSAL)
    except BudgetError as exc:
        click.echo(f"budget: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    except (ArithmeticError, CharpolyError) as exc:
        click.echo(f"internal inconsistency: {exc}", err=True)
        sys.exit(EXIT_INCONSISTENT)
    sys.exit(code or EXIT_OK)


level_opt = click.option("-N", "--level", "N", type=int, required=True, help="Level N.")
ell_opt = click.option("--ell", type=int, default=2, show_default=True, help="Hecke prime ell.")


def _range_opt(f):
    return click.option(
        "--range", "rng", type=(int, int), required=True, metavar="A B", help="Inclusive range."
    )(f)


def _check_ell(ell: int) -> None:
    if not isprime(ell):
        raise HypothesisRefusal("ELL_NOT_PRIME", f"{ell} is not prime")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="heckecong")
def main():
    """Class-group bounds and Hecke statistics for S_2(Gamma_0(N))."""


# --- single-level commands ---


@main.command()
@level_opt
@click.option("-p", "--prime", "p", type=int, default=2, show_default=True)
@click.option(
    "--verify/--no-verify", default=False, help="Also run the mod-2 congruence and detection checks."
)
@ell_opt
@_config_options("json")
def bound(cfg: RunConfig, N: int, p: int, verify: bool, ell: int):
    """Class-group lower bound for the largest simple Hecke submodule."""
    rep = theorem_bound(N, p)
    out = rep.to_dict()
    out["congruence"] = {"checked": False, "pass": None, "factors": []}
    out["detected"] = None
    if verify and not rep.refused:
        _check_ell(ell)
        src = cfg.source()
        res = congruence_check(N, ell, cfg.size_cap, src)
        out["congruence"] = res.to_dict()
        det = detected_lower_bound(N, ell, p, cfg.size_cap, src)
        out["detected"] = {"degstar": det.degstar, "certified": det.certified}
    emit_report(cfg, out)
    return EXIT_REFUSAL if rep.refused else EXIT_OK


@main.command()
@level_opt
@_config_options("json")
def classgroup(cfg: RunConfig, N: int):
    """Structure of the class group of discriminant -N."""
    G = group_structure(-N)
    emit_report(cfg, {"N": N, **G.to_dict()})


@main.command()
@level_opt
@ell_opt
@click.option("--side", type=click.Choice(["plus", "minus", "full"]), default="full", show_default=True)
@click.option("--factor/--no-factor", default=False, help="Factor the polynomial over Z.")
@_config_options("json")
def charpoly(cfg: RunConfig, N: int, ell: int, side: str, factor: bool):
    """Characteristic polynomial of T_ell on S_2(Gamma_0(N)) or one Atkin-Lehner side."""
    _check_ell(ell)
    if N % ell == 0:
        raise HypothesisRefusal("ELL_DIVIDES_N", f"{ell} divides {N}")
    plus, minus = cfg.source()(N, ell, cfg.size_cap)
    f = {"plus": plus, "minus": minus, "full": plus * minus}[side]
    out = {
        "N": N,
        "ell": ell,
        "side": side,
        "degree": f.degree,
        "coefficients": [str(c) for c in f.coeffs],
        "polynomial": str(f),
    }
    if factor and f.degree > 0:
        F = factor_over_Z(f, degree_cap=cfg.degree_cap, n_primes=cfg.cert_primes)
        out["factors"] = [{"degree": g.degree, "multiplicity": m, "polynomial": str(g)} for g, m in F.factors]
        out["certified"] = F.certified
    emit_report(cfg, out)


@main.command()
@level_opt
@click.option("--ell", type=int, default=None, help="Hecke prime (default: least split prime of order r).")
@click.option(
    "-r", "r", type=int, default=None, help="Order of the cyclic quotient (default: from the bound)."
)
@click.option("-p", "--prime", "p", type=int, default=2, show_default=True)
@_config_options("json")
def dihedral(cfg: RunConfig, N: int, ell: int | None, r: int | None, p: int):
    """Characteristic polynomial of T_ell on a dihedral eigenvalue system, and its reduction mod p."""
    if r is None:
        r = theorem_bound(N, p).r
        if r is None or r < 3:
            raise HypothesisRefusal("R_AT_MOST_2", f"no cyclic quotient of order > 2 prime to {p}")
    if ell is None:
        ell = find_l0(N, r, p=p)
    f = dihedral_charpoly(N, r, ell)
    fac = factor_mod_p(reduce_mod(f, p))
    emit_report(
        cfg,
        {
            "N": N,
            "r": r,
            "ell": ell,
            "p": p,
            "charpoly": str(f),
            "factors_mod_p": [
                {"degree": g.degree, "multiplicity": m, "polynomial": str(g)} for g, m in fac.factors
            ],
        },
    )


@main.command()
@level_opt
@click.option("--ell", type=int, default=None, help="Hecke prime (default: least split prime of order r).")
@_config_options("json")
def congruence(cfg: RunConfig, N: int, ell: int | None):
    """Check that the mod-2 dihedral factors divide the Hecke characteristic polynomial."""
    if ell is None:
        ell = _default_ell(N)
    _check_ell(ell)
    res = congruence_check(N, ell, cfg.size_cap, cfg.source())
    emit_report(cfg, res.to_dict())


def _default_ell(N: int) -> int:
    rep = theorem_bound(N, 2)
    if rep.r is None or rep.r < 3:
        raise HypothesisRefusal("R_AT_MOST_2", f"no cyclic quotient of odd order > 2 for {N}")
    return find_l0(N, rep.r, p=2)


@main.command()
@level_opt
@ell_opt
@click.option("-p", "--prime", "p", type=int, default=2, show_default=True)
@_config_options("json")
def detect(cfg: RunConfig, N: int, ell: int, p: int):
    """Largest degree of an irreducible factor of Phi_{N,ell} mod p."""
    _check_ell(ell)
    det = detected_lower_bound(N, ell, p, cfg.size_cap, cfg.source())
    emit_report(cfg, det.to_dict())


@main.command("delta")
@level_opt
@ell_opt
@_config_options("csv")
def delta_cmd(cfg: RunConfig, N: int, ell: int):
    """Small-factor defect on both Atkin-Lehner sides."""
    _check_ell(ell)
    rec = _delta_row(cfg, N, ell)
    emit_rows(cfg, [rec], DELTA_FIELDS)


def _delta_row(cfg: RunConfig, N: int, ell: int) -> dict:
    if N % ell == 0:
        raise HypothesisRefusal("ELL_DIVIDES_N", f"{ell} divides {N}")
    return delta(
        N,
        ell,
        degree_cap=cfg.degree_cap,
        size_cap=cfg.size_cap,
        n_primes=cfg.cert_primes,
        source=cfg.source(),
    ).row()


@main.command()
@click.option("-p", "--prime", "p", type=int, required=True)
@ell_opt
@_config_options("csv")
def ystat(cfg: RunConfig, p: int, ell: int):
    """Longest mod-p factor of Phi_{p,ell}, normalized by the genus."""
    _check_ell(ell)
    rec = _ystat_record(cfg, p, ell)
    emit_rows(cfg, [rec.row()], YSTAT_FIELDS)


def _ystat_record(cfg: RunConfig, p: int, ell: int):
    if not isprime(p):
        raise HypothesisRefusal("P_NOT_PRIME", f"{p} is not prime")
    if p == ell:
        raise HypothesisRefusal("ELL_DIVIDES_N", "ell must differ from p")
    return y_stat(p, ell, cfg.size_cap, cfg.source())


@main.command()
@click.option("-p", "--prime", "p", type=int, required=True)
@ell_opt
@_config_options("json")
def maeda(cfg: RunConfig, p: int, ell: int):
    """Lower bound for the largest simple Hecke module in level-one weight p+1."""
    _check_ell(ell)
    if not isprime(p) or p == ell:
        raise HypothesisRefusal("P_NOT_PRIME", f"need a prime p different from {ell}")
    b = maeda_bound(p, ell, cfg.size_cap, cfg.source())
    emit_report(cfg, {"p": p, "ell": ell, "weight": p + 1, "D": genus_x0(p), "bound": b})


# --- ranges ---


@main.command()
@_range_opt
@ell_opt
@_config_options("csv")
def ycdf(cfg: RunConfig, rng: tuple[int, int], ell: int):
    """Empirical CDF of Y_ell(p) over a prime range against rho(1/(2y))^2."""
    _check_ell(ell)
    lo, hi = rng
    rows = _run_scan(cfg, "ystat", lo, hi, ell, {})
    from .stats import YRecord

    cmp = compare_records([YRecord(**r) for r in rows], ell)
    out = [{"y": repr(y), "empirical": repr(e), "predicted": repr(q)} for y, e, q in cmp.rows]
    emit_rows(cfg, out, CDF_FIELDS, {"primes": len(cmp.primes), "sup_distance": cmp.distance})


SCAN_FIELDS = {
    "bounds": ["N", "p", "h", "elementary_divisors", "r", "m", "theorem", "cor13", "refusals"],
    "delta": DELTA_FIELDS,
    "ystat": YSTAT_FIELDS,
    "congruence": ["N", "ell", "r", "m", "checked", "pass", "factor_degrees", "detected_degstar"],
}


@main.command()
@_range_opt
@click.option("--mode", type=click.Choice(sorted(SCAN_FIELDS)), required=True)
@click.option("--ell", type=int, default=None, help="Hecke prime (default 2; congruence: least split prime).")
@click.option("-p", "--prime", "p", type=int, default=2, show_default=True, help="Prime p for bounds mode.")
@_config_options("csv")
def scan(cfg: RunConfig, rng: tuple[int, int], mode: str, ell: int | None, p: int):
    """One row per admissible level in a range, in increasing order."""
    if ell is not None:
        _check_ell(ell)
    lo, hi = rng
    rows = _run_scan(cfg, mode, lo, hi, ell, {"p": p})
    summary = {}
    if mode == "delta":
        summary = _delta_summary(rows)
    fields = SCAN_FIELDS[mode]
    if mode == "ystat":
        rows = [
            {k: r[k] for k in ("p", "ell", "D", "degstar")} | {"Y": repr(r["degstar"] / r["D"])} for r in rows
        ]
    emit_rows(cfg, rows, fields, summary)


def _delta_summary(rows: list[dict]) -> dict:
    hist: dict[int, int] = {}
    skipped = 0
    for r in rows:
        if not r["certified"]:
            skipped += 1
            continue
        for d in (r["delta_plus"], r["delta_minus"]):
            hist[d] = hist.get(d, 0) + 1
    return {"histogram": dict(sorted(hist.items())) or None, "uncertified_levels": skipped}


def _levels(mode: str, lo: int, hi: int, ell: int | None) -> list[int]:
    if mode in ("delta", "ystat"):
        e = 2 if ell is None else ell
        return ystat_primes(lo, hi, e)
    return [N for N in range(max(lo, 1), hi + 1) if N % 4 == 3 and is_squarefree(N)]


def _scan_one(cfg: RunConfig, mode: str, N: int, ell: int | None, extra: dict) -> dict | None:
    try:
        if mode == "bounds":
            rep = theorem_bound(N, extra.get("p", 2))
            G = rep.class_group
            return {
                "N": N,
                "p": rep.p,
                "h": G.h if G else None,
                "elementary_divisors": " ".join(map(str, G.elementary_divisors)) if G else None,
                "r": rep.r,
                "m": rep.m,
                "theorem": rep.theorem,
                "cor13": None if rep.cor13 is None else repr(rep.cor13),
                "refusals": " ".join(rep.refusals),
            }
        if mode == "delta":
            return _delta_row(cfg, N, 2 if ell is None else ell)
        if mode == "ystat":
            return asdict(_ystat_record(cfg, N, 2 if ell is None else ell))
        e = _default_ell(N) if ell is None else ell
        res = congruence_check(N, e, cfg.size_cap, cfg.source())
        if not res.applicable:
            return None
        det = detected_lower_bound(N, e, 2, cfg.size_cap, cfg.source())
        return {
            "N": N,
            "ell": e,
            "r": res.r,
            "m": res.m,
            "checked": res.applicable,
            "pass": res.passed,
            "factor_degrees": " ".join(str(f.degree) for f in res.factors),
            "detected_degstar": det.degstar,
        }
    except (HypothesisRefusal, RamifiedPrime, GenusZero) as exc:
        log.info("skipping %d: %s", N, exc)
        return None


def _run_scan(cfg: RunConfig, mode: str, lo: int, hi: int, ell: int | None, extra: dict) -> list[dict]:
    levels = _levels(mode, lo, hi, ell)
    job = functools.partial(_scan_one, cfg, mode, ell=ell, extra=extra)
    if cfg.workers > 1 and len(levels) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map keeps input order, so output does not depend on scheduling
            results = list(pool.map(job, levels))
    else:
        results = [job(N) for N in levels]
    return [r for r in results if r is not None]


# --- Dickman and permutations ---


@main.command("dickman")
@click.option("--u", "u", type=float, required=True)
@click.option("--digits", type=int, default=6, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
def dickman_cmd(u: float, digits: int, tol: float):
    """The Dickman function rho(u)."""
    if u < 0:
        click.echo("refused: u must be nonnegative", err=True)
        sys.exit(EXIT_REFUSAL)
    click.echo(f"{dickman(u, tol=tol):.{digits}f}")


@main.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--trials", type=int, required=True)
@_config_options("csv")
def permsim(cfg: RunConfig, n: int, trials: int):
    """Longest cycle lengths of uniform random permutations of n points."""
    if n < 1 or trials < 0:
        raise HypothesisRefusal("BAD_SIZE", "need n >= 1 and trials >= 0")
    lengths = perm_longest_cycles(n, trials, make_rng(cfg.seed))
    emit_rows(cfg, [{"longest": int(x)} for x in lengths], ["longest"])


if __name__ == "__main__":
    main()

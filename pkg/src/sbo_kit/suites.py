"""Verification suites: case generation, execution and deterministic ordering."""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from sbo_kit import gegenbauer as geg
from sbo_kit.indices import OperatorSignature, index_sets
from sbo_kit.kernels import component_identity_check, kernel_entry, PRINTED_KAPPA1_NUMERATOR
from sbo_kit.numeric import (
    TestForm,
    apply_at_origin_exact,
    apply_at_origin_numeric,
    direct_component_rhs,
    direct_entry,
    homogeneity_ratio,
    integrate_pairing,
    relative_difference,
    scalar_gaussian_closed_form,
)
from sbo_kit.operators import (
    branson_lemma_entry,
    branson_operator,
    juhl_closed_form_corrected,
    juhl_symbol,
    knapp_stein_lemma_entry,
    knapp_stein_lhs_entry,
    knapp_stein_residue_check,
    knapp_stein_vanishes,
    knapp_stein_vanishes_bruteforce,
)
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.report import VerificationReport, compare
from sbo_kit.residue import (
    entry_pairs,
    juhl_weyl_reports,
    kappa_chain_check,
    main_theorem_check,
    proposition_gC_check,
    scalar_collapse_check,
)
from sbo_kit.vanishing import isolated_zero_check, vanish_grid_check
from sbo_kit.weyl import commutation_identities, reduction_identities

SUITES = ("weyl", "gegenbauer", "knapp-stein", "components", "prop-gc", "main-theorem", "vanish", "numeric")


class ConfigError(ValueError):
    """Invalid suite configuration (exit code 2 at the command line)."""


def parse_range(text: str | None, default: list[int]) -> list[int]:
    """'3', '2..5', '1,3,4' or '-5..5'."""
    if text is None:
        return list(default)
    out: list[int] = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise ConfigError(f"empty range {part!r}")
                out.extend(range(lo_i, hi_i + 1))
            else:
                out.append(int(part))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse range {text!r}") from exc
    return out


@dataclass
class SuiteConfig:
    n: list[int] | None = None
    i: list[int] | None = None
    j: list[int] | None = None
    l: list[int] | None = None
    m: list[int] | None = None
    k: list[int] | None = None
    kappa: list[int] | None = None
    grid: tuple[int, int] = (-5, 5)
    tol: float = 1e-6
    jobs: int = 1
    mode: str = "symbolic"
    kappa1_numerator: Fraction = field(default_factory=lambda: PRINTED_KAPPA1_NUMERATOR)

    def validate(self) -> "SuiteConfig":
        if self.tol <= 0:
            raise ConfigError("tolerance must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.mode not in ("symbolic", "numeric", "both"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        for name in ("n", "l", "m", "k"):
            vals = getattr(self, name)
            if vals is not None and any(v < 0 for v in vals):
                raise ConfigError(f"--{name} values must be non-negative")
        if self.n is not None and any(v < 1 for v in self.n):
            raise ConfigError("--n values must be at least 1")
        if self.kappa is not None and any(v not in (0, 1) for v in self.kappa):
            raise ConfigError("--kappa values must be 0 or 1")
        return self


def jobs_from_env(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    try:
        return max(1, int(os.environ.get("SBO_KIT_JOBS", "1")))
    except ValueError as exc:
        raise ConfigError("SBO_KIT_JOBS must be an integer") from exc


# -- case generation ------------------------------------------------------


def _sigs(n: int, cfg: SuiteConfig, kappas=(0, 1)) -> list[OperatorSignature]:
    out = []
    for kappa in cfg.kappa if cfg.kappa is not None else kappas:
        for i in range(n + 1):
            if cfg.i is not None and i not in cfg.i:
                continue
            for j in (i, i - 1):
                if not 0 <= j <= n - 1 or (cfg.j is not None and j not in cfg.j):
                    continue
                out.append(OperatorSignature(n, i, j, kappa))
    return out


def cases(suite: str, cfg: SuiteConfig) -> list[tuple]:
    """Picklable case descriptors in a fixed order."""
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    pick = lambda name, default: getattr(cfg, name) if getattr(cfg, name) is not None else default  # noqa: E731
    if suite == "weyl":
        ns, ks = pick("n", list(range(1, 6))), pick("k", list(range(7)))
        out = [("lemma", n, k) for n in ns for k in ks]
        lmax = max(pick("l", [8]))
        out += [("juhl", n, lmax) for n in ns if n >= 2]
        return out
    if suite == "gegenbauer":
        out = [("relations", l) for l in pick("l", list(range(11)))]
        out += [("juhl-corrected", n, max(pick("l", [10]))) for n in pick("n", [2, 3, 4, 5])]
        return out
    if suite == "knapp-stein":
        out = []
        for n in pick("n", [2, 3, 4, 5]):
            for l in pick("l", [1, 2, 3]):
                for i in pick("i", list(range(n + 1))):
                    if 0 <= i <= n:
                        out.append(("residue", n, i, l))
            out.append(("readings", n, tuple(pick("l", [1, 2, 3]))))
            out.append(("vanishing", n))
        return out
    if suite == "components":
        return [("entry", sig, cfg.kappa1_numerator) for n in pick("n", [1, 2, 3, 4]) for sig in _sigs(n, cfg)]
    if suite == "prop-gc":
        return [("prop", sig, l) for n in pick("n", [1, 2, 3, 4]) for sig in _sigs(n, cfg, (0,)) for l in pick("l", list(range(5)))]
    if suite == "main-theorem":
        out = []
        ms = pick("m", [0, 1, 2])
        for n in pick("n", [3, 4]):
            for sig in _sigs(n, cfg):
                out += [("theorem", sig, m) for m in ms]
                if sig.kappa == 1:
                    out += [("chain", sig, m) for m in ms]
            out += [("scalar", n, m) for m in ms]
        return out
    if suite == "vanish":
        lo, hi = cfg.grid
        out = [("grid", n, lo, hi) for n in pick("n", [2, 3, 4])]
        out += [("isolated", n) for n in pick("n", [2, 3, 4])]
        return out
    # numeric
    return [
        ("pairing", 2, 1, 1, 0, (1,), (1,), 12.3, 0.7, cfg.tol, float(cfg.kappa1_numerator)),
        ("pairing", 2, 1, 0, 1, (2,), (), 11.5, 0.25, cfg.tol, float(cfg.kappa1_numerator)),
        ("gaussian", 2, 9.0, 0.5),
        ("homogeneity", 20),
        ("differentiation", 12),
    ]


# -- case execution -------------------------------------------------------


def _three(suite, case, triples) -> list[VerificationReport]:
    out = []
    for name, lhs, rhs in triples:
        start = time.perf_counter()
        out.append(compare(suite, f"{case} {name}", lhs, rhs, start))
    return out


def run_case(suite: str, case: tuple) -> list[VerificationReport]:
    kind = case[0]
    if suite == "weyl":
        if kind == "lemma":
            _, n, k = case
            triples = list(reduction_identities(n, k)) + list(commutation_identities(n, k))
            return _three("weyl", f"n={n} k={k}", triples)
        _, n, lmax = case
        return juhl_weyl_reports(n, lmax)
    if suite == "gegenbauer":
        if kind == "relations":
            l = case[1]
            triples = [
                ("lowering", *geg.lowering_relation(l)),
                ("raising", *geg.raising_relation(l)),
                ("three-term", *geg.three_term_relation(l)),
                ("inflation ∂_s", *geg.inflation_s_relation(l, geg.gegenbauer_renormalized(l))),
                ("inflation ∂_t", *geg.inflation_t_relation(l, geg.gegenbauer_renormalized(l))),
            ]
            return _three("gegenbauer", f"l={l}", triples)
        _, n, lmax = case
        triples = [(f"l={l}", juhl_closed_form_corrected(n, l), juhl_symbol(n, l)) for l in range(lmax + 1)]
        return _three("gegenbauer", f"juhl product form n={n}", triples)
    if suite == "knapp-stein":
        if kind == "residue":
            _, n, i, l = case
            return [knapp_stein_residue_check(n, i, l)]
        if kind == "readings":
            _, n, ls = case
            out = []
            for l in ls:
                start = time.perf_counter()
                bad = 0
                for i in range(n + 1):
                    for I in index_sets(n, i):
                        for J in index_sets(n, i):
                            if knapp_stein_lemma_entry(n, i, l, I, J, "full") != knapp_stein_lhs_entry(n, l, I, J):
                                bad += 1
                            if l and branson_lemma_entry(n, i, l, I, J, "full") != branson_operator(n, i, l).entry(I, J):
                                bad += 1
                out.append(
                    VerificationReport(
                        "knapp-stein", f"closed forms n={n} l={l}", bad == 0, "" if not bad else f"{bad} mismatches",
                        "", (time.perf_counter() - start) * 1000,
                    )
                )
            return out
        _, n = case
        start = time.perf_counter()
        bad = []
        for i in range(n + 1):
            for twice in range(-4, 2 * n + 3):
                lam = Fraction(twice, 2)
                if knapp_stein_vanishes(n, i, lam) != knapp_stein_vanishes_bruteforce(n, i, lam):
                    bad.append((i, lam))
        return [
            VerificationReport(
                "knapp-stein", f"vanishing n={n}", not bad, str(bad[:3]) if bad else "", "",
                (time.perf_counter() - start) * 1000,
            )
        ]
    if suite == "components":
        _, sig, numerator = case
        return [component_identity_check(sig, I, J, numerator) for I, J in entry_pairs(sig)]
    if suite == "prop-gc":
        _, sig, l = case
        return [proposition_gC_check(sig, l, I, J) for I, J in entry_pairs(sig)]
    if suite == "main-theorem":
        if kind == "theorem":
            return [main_theorem_check(case[1], case[2])]
        if kind == "chain":
            _, sig, m = case
            return [kappa_chain_check(sig, m, I, J) for I, J in entry_pairs(sig)]
        return [scalar_collapse_check(case[1], case[2])]
    if suite == "vanish":
        if kind == "grid":
            _, n, lo, hi = case
            return vanish_grid_check(n, lo, hi)
        return isolated_zero_check(case[1])
    if suite == "numeric":
        return _numeric_case(case)
    raise ConfigError(f"unknown suite {suite!r}")


def _numeric_case(case) -> list[VerificationReport]:
    kind = case[0]
    start = time.perf_counter()
    if kind == "pairing":
        _, n, i, j, kappa, I, J, lam, nu, tol, numerator = case
        sig = OperatorSignature(n, i, j, kappa)
        f = TestForm.gaussian(n)
        x0 = (0.35,) + (0.0,) * (n - 1)
        quad_tol = min(tol, 1e-6) * 1e-2
        lhs = integrate_pairing(direct_entry(sig, I, J, lam, nu), f, lam, nu, quad_tol, x0)
        rhs = integrate_pairing(direct_component_rhs(sig, I, J, lam, nu, numerator), f, lam, nu, quad_tol, x0)
        rel = relative_difference(lhs.value, rhs.value)
        ok = rel <= tol and lhs.status == rhs.status == "converged"
        return [
            VerificationReport(
                "numeric", f"pairing n={n} i={i} j={j} κ={kappa} (λ,ν)=({lam},{nu})", ok,
                f"{lhs.value.real:.12g}", f"{rhs.value.real:.12g}", (time.perf_counter() - start) * 1000,
                f"relative difference {rel:.3g}",
            )
        ]
    if kind == "gaussian":
        _, n, lam, nu = case
        from sbo_kit.kernels import scalar_kernel

        got = integrate_pairing(scalar_kernel(n), TestForm.gaussian(n), lam, nu, 1e-10)
        want = scalar_gaussian_closed_form(n, lam, nu)
        rel = relative_difference(got.value, want)
        return [
            VerificationReport(
                "numeric", f"scalar gaussian n={n} (λ,ν)=({lam},{nu})", rel <= 1e-8,
                f"{got.value.real:.14g}", f"{want.real:.14g}", (time.perf_counter() - start) * 1000,
            )
        ]
    if kind == "homogeneity":
        rng = random.Random(20261015)
        out = []
        for idx in range(case[1]):
            n = rng.choice([2, 3, 4])
            kappa = rng.choice([0, 1])
            i = rng.randint(0, n)
            js = [j for j in (i, i - 1) if 0 <= j <= n - 1]
            sig = OperatorSignature(n, i, rng.choice(js), kappa)
            I = rng.choice(index_sets(n, sig.i))
            J = rng.choice(index_sets(n - 1, sig.j))
            entry = kernel_entry(sig, I, J)
            lam, nu = rng.uniform(8, 14), rng.uniform(-1, 1)
            x = [rng.uniform(0.2, 1.0) * rng.choice([-1, 1]) for _ in range(n)]
            if entry.terms and abs(entry.terms[0].poly(x)) < 1e-3:
                x = [v * 1.1 + 0.05 for v in x]
            t0 = time.perf_counter()
            if not entry.terms:
                out.append(VerificationReport("numeric", f"homogeneity #{idx} {sig} zero entry", True))
                continue
            ratio = homogeneity_ratio(entry, x, lam, nu)
            want = 2.0 ** (lam - nu - n)
            rel = abs(ratio - want) / want
            out.append(
                VerificationReport(
                    "numeric", f"homogeneity #{idx} {sig} I={I} J={J}", rel <= 1e-12,
                    f"{ratio.real:.16g}", f"{want:.16g}", (time.perf_counter() - t0) * 1000,
                )
            )
        return out
    # differentiation: exact Taylor evaluation against mpmath
    rng = random.Random(7)
    out = []
    for idx in range(case[1]):
        n = rng.choice([2, 3])
        l = rng.randint(0, 4)
        D = juhl_symbol(n, l)
        poly = MultiPolynomial.zero(n)
        for _ in range(3):
            e = [rng.randint(0, 2) for _ in range(n)]
            poly = poly + MultiPolynomial.monomial(n, e, rng.randint(-3, 3))
        lam = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
        t0 = time.perf_counter()
        exact = float(apply_at_origin_exact(D, poly, lam=lam).to_fraction())
        approx = apply_at_origin_numeric(D, poly, lam=lam)
        rel = relative_difference(exact, approx)
        ok = rel <= 1e-6 or (abs(exact) < 1e-12 and abs(approx) < 1e-9)
        out.append(
            VerificationReport(
                "numeric", f"differentiation #{idx} n={n} l={l} λ={lam}", ok,
                f"{exact:.12g}", f"{approx:.12g}", (time.perf_counter() - t0) * 1000,
            )
        )
    return out


def _run_one(args):
    suite, case = args
    return run_case(suite, case)


def run_suite(suite: str, cfg: SuiteConfig | None = None) -> list[VerificationReport]:
    """All reports of a suite, in case order, regardless of worker count."""
    cfg = (cfg or SuiteConfig()).validate()
    todo = [(suite, c) for c in cases(suite, cfg)]
    if cfg.jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_run_one, todo))
    else:
        chunks = [_run_one(t) for t in todo]
    return [r for chunk in chunks for r in chunk]


def with_defaults(cfg: SuiteConfig | None, **kw) -> SuiteConfig:
    return replace(cfg or SuiteConfig(), **kw)

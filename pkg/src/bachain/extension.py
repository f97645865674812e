"""Dimension-extension experiments: padded chains, the degeneracy
criterion, slab measure bounds, and seeded Monte Carlo probes.

A base chain in dimension r is padded with k zero coordinates; each padded
vector is a candidate best approximation of any (r+k)-dimensional form that
extends the base constants by (b_1, ..., b_k).  The per-index criterion
checked here is the exhaustive one: no integer vector with a nonzero
extension part and coordinates bounded by the successor norm may produce a
form value smaller than the base record's.  Slab measure bounds quantify,
via an explicit union bound with fully spelled-out constants, how much of
the (b_1, ..., b_k)-cube can violate the criterion at each index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt
from typing import Iterator, Optional, Sequence

from .enumerator import (
    BAChain,
    BestApprox,
    canonical_shell_tails,
    enumerate_chain,
)
from .errors import (
    ChainTooShort,
    PrecisionExhausted,
    SearchTooLarge,
)
from .linform import LinearForm
from .realnum import (
    PRECISION_CAP,
    START_PRECISION,
    Dyadic,
    DyadicInterval,
    RealExpr,
    _eval_at,
    _Inconclusive,
    _root_down,
    _root_up,
    eval_interval,
    rational,
    root,
)

DEFAULT_BUDGET = 10 ** 7


# ---------------------------------------------------------------------------
# Experiment configuration files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment description.

    Constants stay as grammar text here (the CLI owns expression parsing);
    everything a run needs is explicit, so a config file plus a seed fully
    reproduces an experiment.
    """

    version: int
    alphas: tuple[str, ...]
    k: int
    samples: int
    seed: int
    max_norm: int
    precision_cap: int = PRECISION_CAP
    budget: int = DEFAULT_BUDGET


def load_experiment_config(text: str) -> ExperimentConfig:
    """Parse the line-oriented ``key value`` config format ('#' comments).

    Required keys: version (must be 1), alpha (repeatable), k, samples,
    seed, max-norm.  Optional: precision-cap, budget.
    """
    fields: dict = {"alpha": []}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        value = value.strip()
        if not value:
            raise ValueError(f"config line needs a value: {raw!r}")
        if key == "alpha":
            fields["alpha"].append(value)
        else:
            fields[key] = value
    try:
        version = int(fields["version"])
        if version != 1:
            raise ValueError(f"unsupported config version {version}")
        return ExperimentConfig(
            version=version,
            alphas=tuple(fields["alpha"]),
            k=int(fields["k"]),
            samples=int(fields["samples"]),
            seed=int(fields["seed"]),
            max_norm=int(fields["max-norm"]),
            precision_cap=int(fields.get("precision-cap", PRECISION_CAP)),
            budget=int(fields.get("budget", DEFAULT_BUDGET)),
        )
    except KeyError as exc:
        raise ValueError(f"config missing key {exc.args[0]!r}") from None


# ---------------------------------------------------------------------------
# Padding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PaddedVector:
    """A base record extended by k zero coordinates."""

    base: BestApprox
    k: int
    vector: tuple[int, ...]

    def __post_init__(self):
        if self.vector != self.base.m + (0,) * self.k:
            raise ValueError("padded vector must be the base plus k zeros")


def pad_chain(chain: BAChain, k: int) -> list[PaddedVector]:
    """Extend every record by k zero coordinates, order preserved."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return [PaddedVector(base=rec, k=k, vector=rec.m + (0,) * k)
            for rec in chain.records]


# ---------------------------------------------------------------------------
# Sampled extension constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaSample:
    """k extension constants in (0, 1), irrational by construction, with
    the seed and recipe that produced them."""

    values: tuple[RealExpr, ...]
    seed: Optional[int]
    recipe: str

    @property
    def k(self) -> int:
        return len(self.values)


def _primes() -> Iterator[int]:
    out: list[int] = []
    n = 2
    while True:
        if all(n % p for p in out):
            out.append(n)
            yield n
        n += 1


def _certified_floor(expr: RealExpr, cap: int = PRECISION_CAP) -> int:
    w = START_PRECISION
    while True:
        try:
            iv = _eval_at(expr, w)
        except _Inconclusive:
            iv = None
        if iv is not None:
            f_lo = iv.lo.floor_int()
            if f_lo == iv.hi.floor_int() and not iv.hi.is_integer():
                return f_lo
        if w >= cap:
            raise PrecisionExhausted("floor does not certify", cap)
        w = min(w * 2, cap)


def _certify_unit_interval(expr: RealExpr, cap: int) -> None:
    """Refine until the enclosure lies strictly inside (0, 1)."""
    w = START_PRECISION
    while True:
        iv = _eval_at(expr, w)
        if iv.lo.man > 0 and iv.hi < Dyadic(1):
            return
        if w >= cap:
            raise PrecisionExhausted(
                "sampled constant does not certify inside (0, 1)", cap)
        w = min(w * 2, cap)


def sample_betas(form: LinearForm, k: int, seed: int,
                 cap: int = PRECISION_CAP) -> BetaSample:
    """Seeded constants b_i = frac(u_i * sqrt(p_i)) with rational u_i and
    distinct primes p_i.

    The primes avoid every prime factor of a square-root radicand already
    present in the form, so a sample can never be trivially dependent on
    the base constants.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = random.Random(seed)
    avoid: set[int] = set()
    for alpha in form.alphas:
        for rad in alpha.square_root_radicands():
            d = 2
            n = rad
            while d * d <= n:
                while n % d == 0:
                    avoid.add(d)
                    n //= d
                d += 1
            if n > 1:
                avoid.add(n)
    values = []
    picked = []
    gen = _primes()
    while len(values) < k:
        p = next(gen)
        if p in avoid:
            continue
        avoid.add(p)
        u = Fraction(2 * rng.randrange(1, 1 << 20) + 1, 1 << 21)
        x = rational(u) * root(p)
        beta = x - rational(_certified_floor(x, cap))
        _certify_unit_interval(beta, cap)
        values.append(beta)
        picked.append((u, p))
    recipe = "frac(u*sqrt(p)) with " + ", ".join(
        f"u={u} p={p}" for u, p in picked)
    return BetaSample(values=tuple(values), seed=seed, recipe=recipe)


# ---------------------------------------------------------------------------
# Degeneracy criterion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionVerdict:
    """Outcome of the exhaustive per-index scan."""

    nu: int
    passed: bool
    witness: Optional[tuple[int, ...]] = None
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"nu": self.nu, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.detail:
            out["detail"] = self.detail
        return out


def _mixed_tails(r: int, k: int, bound: int):
    """Canonical representatives of vectors (base tail, extension tail)
    with coordinates bounded by ``bound`` and a nonzero extension part;
    one per +-pair (first nonzero coordinate positive)."""
    zero_base = (0,) * r
    for M in range(1, bound + 1):
        for bt in canonical_shell_tails(k, M):
            yield zero_base + bt
    nonzero_ext = [t for t in product(range(-bound, bound + 1), repeat=k)
                   if any(t)]
    for M in range(1, bound + 1):
        for at in canonical_shell_tails(r, M):
            for bt in nonzero_ext:
                yield at + bt


def mixed_scan_volume(r: int, k: int, bound: int) -> int:
    """Number of canonical mixed vectors the criterion scan visits."""
    ext = (2 * bound + 1) ** k - 1
    base_nonzero = ((2 * bound + 1) ** r - 1) // 2
    return ext // 2 + base_nonzero * ext


def _scaled_constants(exprs: Sequence[RealExpr], w: int, grid: int,
                      cap: int) -> tuple[list[int], list[int]]:
    los, his = [], []
    for e in exprs:
        iv = eval_interval(e, w, cap)
        lo, hi = iv.lo, iv.hi
        los.append(lo.man << (lo.exp + grid) if lo.exp + grid >= 0
                   else lo.man >> -(lo.exp + grid))
        his.append(-((-hi.man) >> -(hi.exp + grid)) if hi.exp + grid < 0
                   else hi.man << (hi.exp + grid))
    return los, his


def degeneracy_criterion(chain: BAChain, beta: BetaSample, nu: int,
                         budget: int = DEFAULT_BUDGET,
                         cap: int = PRECISION_CAP) -> CriterionVerdict:
    """Exhaustively test whether any integer vector with nonzero extension
    part and coordinates bounded by M_{nu+1} achieves a form value below
    zeta_nu under the extended constants.

    Passing at every index is exactly what keeps the padded chain equal to
    the extended form's chain from that point on.  The free coefficient is
    chosen optimally per tail and clamped to |m_0| <= (r+k+1) * M_{nu+1},
    the widest value that can matter for constants of this size.
    """
    if nu < 1 or nu + 1 > len(chain.records):
        raise ChainTooShort(f"criterion at {nu} needs record {nu + 1}")
    r = chain.r
    k = beta.k
    bound = chain.records[nu].M  # M_{nu+1}, successor norm
    rec = chain.records[nu - 1]
    if mixed_scan_volume(r, k, bound) > budget:
        raise SearchTooLarge(
            f"criterion scan at nu={nu} needs "
            f"{mixed_scan_volume(r, k, bound)} evaluations > budget {budget}")
    exprs = tuple(chain.form.alphas) + beta.values
    m0_cap = (r + k + 1) * bound

    w = START_PRECISION + (2 * (r + k) * bound).bit_length()
    w_max = max(START_PRECISION, cap // 2)
    while True:
        grid = w + 2
        a_lo, a_hi = _scaled_constants(exprs, w, grid, cap)
        T = 1 << grid
        T2 = T << 1
        # zeta bounds on the same scale, rounded away from the comparison
        z = rec.zeta
        z_hi_scaled = -((-z.hi.man) >> -(z.hi.exp + grid)) \
            if z.hi.exp + grid < 0 else z.hi.man << (z.hi.exp + grid)
        z_lo_scaled = z.lo.man >> -(z.lo.exp + grid) \
            if z.lo.exp + grid < 0 else z.lo.man << (z.lo.exp + grid)
        ambiguous = None
        witness = None
        for tail in _mixed_tails(r, k, bound):
            s_lo = 0
            s_hi = 0
            for c, al, ah in zip(tail, a_lo, a_hi):
                if c > 0:
                    s_lo += c * al
                    s_hi += c * ah
                elif c < 0:
                    s_lo += c * ah
                    s_hi += c * al
            n_lo = (2 * s_lo + T) // T2
            n_hi = (2 * s_hi + T) // T2
            if n_lo != n_hi:
                ambiguous = tail
                break
            n = min(m0_cap, max(-m0_cap, n_lo))
            r_lo = s_lo - n * T
            r_hi = s_hi - n * T
            if r_lo >= 0:
                abs_lo, abs_hi = r_lo, r_hi
            elif r_hi <= 0:
                abs_lo, abs_hi = -r_hi, -r_lo
            else:
                abs_lo, abs_hi = 0, max(-r_lo, r_hi)
            if abs_lo >= z_hi_scaled:
                continue  # certified no smaller than zeta_nu
            if abs_hi < z_lo_scaled:
                witness = (-n,) + tail
                break
            ambiguous = tail
            break
        if witness is not None:
            return CriterionVerdict(nu=nu, passed=False, witness=witness,
                                    detail="form value certifiably below "
                                           f"zeta_{nu}")
        if ambiguous is None:
            return CriterionVerdict(nu=nu, passed=True,
                                    detail=f"scan bound {bound}, "
                                           f"{mixed_scan_volume(r, k, bound)} vectors")
        if w >= w_max:
            raise PrecisionExhausted(
                f"criterion at nu={nu}: vector {ambiguous} does not separate "
                "from zeta", cap)
        w = min(w * 2, w_max)


# ---------------------------------------------------------------------------
# Slab measure bounds
# ---------------------------------------------------------------------------


def _tree_sum(terms: list[Fraction]) -> Fraction:
    """Balanced summation: far fewer large-gcd reductions than a left fold."""
    if not terms:
        return Fraction(0)
    work = terms
    while len(work) > 1:
        nxt = [work[i] + work[i + 1] for i in range(0, len(work) - 1, 2)]
        if len(work) % 2:
            nxt.append(work[-1])
        work = nxt
    return work[0]


def lattice_inv_norm_sum(M: int, k: int, precision: int = 64,
                         budget: int = DEFAULT_BUDGET) -> tuple[Fraction, Fraction]:
    """Bounds on sum of 1/sqrt(m_1^2 + ... + m_k^2) over nonzero integer
    vectors with max-norm <= M, by direct enumeration.

    Terms with a perfect-square norm (always, for k = 1) contribute
    exactly; the rest contribute outward-rounded dyadic bounds, so for
    k = 1 the two returned rationals coincide and equal twice the M-th
    harmonic number.
    """
    if M < 1 or k < 1:
        raise ValueError("M and k must be >= 1")
    count = (2 * M + 1) ** k - 1
    if count > budget:
        raise SearchTooLarge(f"{count} lattice points > budget {budget}")
    lo_terms: list[Fraction] = []
    hi_terms: list[Fraction] = []
    for shell in range(1, M + 1):
        for tail in canonical_shell_tails(k, shell):
            n = sum(c * c for c in tail)
            s = isqrt(n)
            if s * s == n:
                term = Fraction(1, s)
                lo_terms.append(term)
                hi_terms.append(term)
            else:
                d = Dyadic(n)
                r_lo = _root_down(d, 2, precision)
                r_hi = _root_up(d, 2, precision)
                lo_terms.append(1 / r_hi.as_fraction())
                hi_terms.append(1 / r_lo.as_fraction())
    # canonical tails cover one of each +-pair
    return 2 * _tree_sum(lo_terms), 2 * _tree_sum(hi_terms)


def omega_bound(zeta_nu: DyadicInterval, M_next: int, r: int, k: int,
                precision: int = 64,
                budget: int = DEFAULT_BUDGET) -> DyadicInterval:
    """Explicit union bound on the measure of extension constants that
    violate the criterion at one index:

        2*(k+r+1) * k**(k/2) * zeta_nu * (2*M_next+1)**(r+1)
            * sum over 0 < max|m| <= M_next of 1/sqrt(m_1^2+...+m_k^2)

    with the lattice sum enumerated exactly.  All constants are spelled
    out; nothing hides in an unspecified factor.
    """
    if M_next < 1 or r < 1 or k < 1:
        raise ValueError("inputs must be positive")
    if zeta_nu.lo.man <= 0:
        raise ValueError("zeta must be a certified positive enclosure")
    s_lo, s_hi = lattice_inv_norm_sum(M_next, k, precision, budget)
    sum_iv = DyadicInterval.from_fractions(s_lo, s_hi, precision + 16)
    if k % 2 == 0:
        k_pow = DyadicInterval.point(k ** (k // 2))
    else:
        k_pow = DyadicInterval.point(k ** k).nth_root(2, precision + 16)
    scale = 2 * (k + r + 1) * (2 * M_next + 1) ** (r + 1)
    return zeta_nu.mul_int(scale) * k_pow * sum_iv


# ---------------------------------------------------------------------------
# Extended-form comparison and Monte Carlo aggregation
# ---------------------------------------------------------------------------


@dataclass
class ExtensionReport:
    """Alignment of an extended form's chain against the padded base chain."""

    k: int
    search_bound: int
    beta: BetaSample
    base_chain: BAChain
    extended_chain: BAChain
    criterion_verdicts: dict[int, CriterionVerdict] = field(default_factory=dict)
    skipped_criteria: dict[int, str] = field(default_factory=dict)
    extras: list[tuple[int, ...]] = field(default_factory=list)
    missing: list[int] = field(default_factory=list)  # base indices
    nu_match: Optional[int] = None
    omega_table: dict[int, DyadicInterval] = field(default_factory=dict)
    regime_note: str = ""

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "k": self.k,
            "search_bound": self.search_bound,
            "beta_seed": self.beta.seed,
            "beta_recipe": self.beta.recipe,
            "criterion": {str(nu): v.to_dict()
                          for nu, v in sorted(self.criterion_verdicts.items())},
            "criterion_skipped": {str(nu): why
                                  for nu, why in sorted(self.skipped_criteria.items())},
            "extra_records": [list(v) for v in self.extras],
            "missing_base_indices": self.missing,
            "match_horizon": self.nu_match,
            "omega_bounds": {str(nu): [iv.lo.to_hex(), iv.hi.to_hex()]
                             for nu, iv in sorted(self.omega_table.items())},
            "regime_note": self.regime_note,
        }


def compare_extended(form: LinearForm, beta: BetaSample, M_max: int,
                     base_chain: Optional[BAChain] = None,
                     budget: int = DEFAULT_BUDGET,
                     cap: int = PRECISION_CAP) -> ExtensionReport:
    """Enumerate the extended form's chain, align it against the padded
    base chain, and run the per-index criterion scans.

    The match horizon is the smallest base index from which the two
    sequences agree exactly through the search bound (None when no suffix
    agrees).
    """
    r = form.r
    k = beta.k
    if (2 * M_max + 1) ** (r + k) > budget:
        raise SearchTooLarge(
            f"extended enumeration in dimension {r + k} at bound {M_max} "
            f"exceeds budget {budget}")
    if base_chain is None or base_chain.search_bound < M_max:
        base_chain = enumerate_chain(form, M_max, cap)
    ext_form = LinearForm(tuple(form.alphas) + beta.values)
    ext_chain = enumerate_chain(ext_form, M_max, cap)

    padded = pad_chain(base_chain, k)
    padded_vectors = {pv.vector for pv in padded}
    ext_vectors = {rec.m for rec in ext_chain.records}

    extras = [rec.m for rec in ext_chain.records
              if rec.m not in padded_vectors]
    missing = [pv.base.index for pv in padded
               if pv.vector not in ext_vectors]

    max_extra_norm = max((max(abs(c) for c in v[1:]) for v in extras),
                         default=0)
    bad_pad = max(missing, default=0)
    nu_match: Optional[int] = None
    for s, pv in enumerate(padded, start=1):
        if s > bad_pad and pv.base.M > max_extra_norm:
            nu_match = s
            break

    report = ExtensionReport(k=k, search_bound=M_max, beta=beta,
                             base_chain=base_chain, extended_chain=ext_chain,
                             extras=extras, missing=missing,
                             nu_match=nu_match)
    for nu in range(1, len(base_chain.records)):
        try:
            report.criterion_verdicts[nu] = degeneracy_criterion(
                base_chain, beta, nu, budget=budget, cap=cap)
        except SearchTooLarge as exc:
            report.skipped_criteria[nu] = str(exc)
        report.omega_table[nu] = omega_bound(
            base_chain.records[nu - 1].zeta, base_chain.records[nu].M,
            r, k, budget=budget)

    bounds = [iv.hi for iv in report.omega_table.values()]
    small = sum(1 for b in bounds if b.cmp_int(1) < 0)
    report.regime_note = (
        f"{small} of {len(bounds)} per-index measure bounds are below 1; "
        "the bounds control violations only where their tail sum is small, "
        "so for generic base constants this table is diagnostic rather "
        "than a proof of eventual matching.")
    return report


@dataclass
class MonteCarloResult:
    """Aggregate of seeded extension comparisons for one base chain."""

    samples: int
    seed: int
    k: int
    search_bound: int
    sample_seeds: list[int]
    horizons: list[Optional[int]]
    matched_beyond: dict[int, int]   # base index -> samples matching from it
    omega_table: dict[int, DyadicInterval]
    regime_note: str

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "samples": self.samples,
            "seed": self.seed,
            "k": self.k,
            "search_bound": self.search_bound,
            "sample_seeds": self.sample_seeds,
            "match_horizons": self.horizons,
            "matched_beyond": {str(i): c
                               for i, c in sorted(self.matched_beyond.items())},
            "omega_bounds": {str(nu): [iv.lo.to_hex(), iv.hi.to_hex()]
                             for nu, iv in sorted(self.omega_table.items())},
            "regime_note": self.regime_note,
        }


def monte_carlo(form: LinearForm, chain: BAChain, k: int, samples: int,
                seed: int, M_max: int, budget: int = DEFAULT_BUDGET,
                cap: int = PRECISION_CAP) -> MonteCarloResult:
    """Run compare_extended over ``samples`` seeded extension tuples and
    aggregate how many match the padded chain from each index on.

    Fully deterministic for a fixed seed: per-sample seeds derive from one
    generator, and every numeric step is exact or certified.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    sample_seeds = [rng.randrange(1 << 30) for _ in range(samples)]
    horizons: list[Optional[int]] = []
    omega_table: dict[int, DyadicInterval] = {}
    regime = ""
    for s in sample_seeds:
        beta = sample_betas(form, k, s, cap)
        rep = compare_extended(form, beta, M_max, base_chain=chain,
                               budget=budget, cap=cap)
        horizons.append(rep.nu_match)
        omega_table = rep.omega_table
        regime = rep.regime_note
    matched_beyond = {
        nu: sum(1 for h in horizons if h is not None and h <= nu)
        for nu in range(1, len(chain.records) + 1)
    }
    return MonteCarloResult(samples=samples, seed=seed, k=k,
                            search_bound=M_max, sample_seeds=sample_seeds,
                            horizons=horizons, matched_beyond=matched_beyond,
                            omega_table=omega_table, regime_note=regime)

"""Certified checks and diagnostics over best-approximation chains.

Two kinds of checks live here.  Unconditional ones (monotonicity, the
convex-body bound, the doubling-step growth bound, the polytope volume
bound on full-rank windows) must hold for every correctly enumerated
chain, so a failure indicates an enumerator bug.  Conditional ones
(psi-singularity, the exponent-gap estimate) describe special tuples and
are expected to fail on generic input; their failure is informative
output, not an error.

Every verdict is backed by exact integer comparisons or certified dyadic
intervals; no check ever decides anything through floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .enumerator import BAChain
from .errors import ChainTooShort, DomainError, HypothesisUnmet
from .realnum import (
    PRECISION_CAP,
    DyadicInterval,
    ln_interval,
    pow_rational,
)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
UNDECIDED = "undecided"

#: Checks that are theorems about every chain: a failure fails the build.
THEOREM_CHECKS = ("monotonic", "minkowski", "growth", "polytope")


@dataclass(frozen=True)
class Verdict:
    """Outcome of one check with its machine-readable evidence."""

    check: str
    status: str
    witness_index: Optional[int] = None
    margin: Optional[DyadicInterval] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        out = {"check": self.check, "status": self.status}
        if self.witness_index is not None:
            out["witness_index"] = self.witness_index
        if self.margin is not None:
            out["margin"] = [self.margin.lo.to_hex(), self.margin.hi.to_hex()]
        if self.detail:
            out["detail"] = self.detail
        return out

    def __str__(self) -> str:
        parts = [f"{self.check}: {self.status}"]
        if self.witness_index is not None:
            parts.append(f"at index {self.witness_index}")
        if self.detail:
            parts.append(f"({self.detail})")
        return " ".join(parts)


# ---------------------------------------------------------------------------
# Unconditional checks
# ---------------------------------------------------------------------------


def check_monotonic(chain: BAChain) -> Verdict:
    """Strictly increasing norms and strictly decreasing form values,
    the latter certified by disjoint stored enclosures."""
    if not chain.records:
        raise ChainTooShort("empty chain")
    prev = None
    for rec in chain.records:
        if prev is not None:
            if not (prev.M < rec.M):
                return Verdict("monotonic", FAIL, witness_index=rec.index,
                               detail="norm did not increase")
            if not (rec.zeta.hi < prev.zeta.lo):
                return Verdict("monotonic", FAIL, witness_index=rec.index,
                               detail="form value not certifiably smaller")
        prev = rec
    return Verdict("monotonic", PASS,
                   detail=f"{len(chain.records)} records")


def check_minkowski(chain: BAChain) -> Verdict:
    """zeta_nu * M_{nu+1}**r <= 1 for every consecutive pair (the final
    record has no known successor and is skipped)."""
    if len(chain.records) < 2:
        raise ChainTooShort("need at least 2 records")
    r = chain.r
    worst: Optional[DyadicInterval] = None
    for rec, nxt in zip(chain.records, chain.records[1:]):
        product = rec.zeta.mul_int(nxt.M ** r)
        if product.hi.cmp_int(1) > 0:
            return Verdict("minkowski", FAIL, witness_index=rec.index,
                           margin=product,
                           detail=f"zeta_{rec.index} * {nxt.M}^{r} > 1")
        if worst is None or product.hi > worst.hi:
            worst = product
    return Verdict("minkowski", PASS, margin=worst,
                   detail=f"largest certified product {float(worst.hi):.6f}")


def growth_offset(r: int) -> int:
    """Index step after which norms are guaranteed to have doubled."""
    return 2 ** (2 * r + 1) - 2 ** (r + 1)


def check_growth(chain: BAChain) -> Verdict:
    """M_{nu+s} >= 2*M_nu with s = growth_offset(r); exact integers."""
    s = growth_offset(chain.r)
    n = len(chain.records)
    if n <= s:
        raise ChainTooShort(
            f"need more than {s} records for r={chain.r}, have {n}")
    tightest: Optional[Fraction] = None
    witness = None
    for i in range(n - s):
        m_lo = chain.records[i].M
        m_hi = chain.records[i + s].M
        ratio = Fraction(m_hi, 2 * m_lo)
        if tightest is None or ratio < tightest:
            tightest = ratio
            witness = chain.records[i].index
        if m_hi < 2 * m_lo:
            return Verdict("growth", FAIL, witness_index=chain.records[i].index,
                           detail=f"M_{i + 1 + s}={m_hi} < 2*M_{i + 1}={2 * m_lo}")
    return Verdict("growth", PASS,
                   detail=f"offset {s}, tightest ratio {tightest} at index {witness}")


# ---------------------------------------------------------------------------
# Exact determinants and ranks
# ---------------------------------------------------------------------------


def det_bareiss(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    m = [list(row) for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det_cofactor(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant by first-row cofactor expansion; the slow
    cross-check twin of det_bareiss."""
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    if n == 1:
        return rows[0][0]
    total = 0
    for j, coeff in enumerate(rows[0]):
        if coeff == 0:
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        total += (-1) ** j * coeff * det_cofactor(minor)
    return total


def window_matrix(chain: BAChain, nu: int) -> list[tuple[int, ...]]:
    """Coordinate rows of records nu .. nu+r (1-based indices)."""
    r = chain.r
    if nu < 1 or nu + r > len(chain.records):
        raise ChainTooShort(
            f"window {nu}..{nu + r} outside chain of length {len(chain.records)}")
    return [chain.records[i - 1].m for i in range(nu, nu + r + 1)]


def determinant(chain: BAChain, nu: int) -> int:
    """Exact determinant of the (r+1)x(r+1) window starting at record nu."""
    return det_bareiss(window_matrix(chain, nu))


def rank_rational(rows: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals by exact Gaussian elimination."""
    work = [[Fraction(x) for x in row] for row in rows if any(row)]
    if not work:
        return 0
    cols = len(work[0])
    rank = 0
    row = 0
    for col in range(cols):
        pivot = next((i for i in range(row, len(work)) if work[i][col] != 0),
                     None)
        if pivot is None:
            continue
        work[row], work[pivot] = work[pivot], work[row]
        p = work[row][col]
        for i in range(row + 1, len(work)):
            f = work[i][col] / p
            if f:
                work[i] = [a - f * b for a, b in zip(work[i], work[row])]
        rank += 1
        row += 1
        if row == len(work):
            break
    return rank


def tail_rank(chain: BAChain, nu_0: int) -> int:
    """Rank of the integer matrix whose rows are all records with index
    >= nu_0; the dimension actually spanned by the late chain."""
    if nu_0 < 1 or nu_0 > len(chain.records):
        raise ChainTooShort(f"no records from index {nu_0}")
    return rank_rational([rec.m for rec in chain.records[nu_0 - 1:]])


def check_polytope_bound(chain: BAChain, nu: int) -> Verdict:
    """zeta_nu * (r+1)! * M_{nu+r}**r >= 1 on a window of full rank;
    degenerate windows are reported as skipped, not failed."""
    r = chain.r
    rows = window_matrix(chain, nu)
    if det_bareiss(rows) == 0:
        return Verdict("polytope", SKIPPED, witness_index=nu,
                       detail="degenerate window (zero determinant)")
    rec = chain.records[nu - 1]
    m_far = chain.records[nu - 1 + r].M
    scale = math.factorial(r + 1) * m_far ** r
    product = rec.zeta.mul_int(scale)
    if product.lo.cmp_int(1) >= 0:
        return Verdict("polytope", PASS, witness_index=nu, margin=product)
    return Verdict("polytope", FAIL, witness_index=nu, margin=product,
                   detail=f"zeta_{nu} * {scale} < 1")


def check_polytope_all(chain: BAChain) -> Verdict:
    """Aggregate polytope verdict over every available window."""
    r = chain.r
    if len(chain.records) < r + 1:
        raise ChainTooShort(f"need at least {r + 1} records")
    skipped = 0
    worst: Optional[DyadicInterval] = None
    for nu in range(1, len(chain.records) - r + 1):
        v = check_polytope_bound(chain, nu)
        if v.status == FAIL:
            return v
        if v.status == SKIPPED:
            skipped += 1
            continue
        if worst is None or v.margin.lo < worst.lo:
            worst = v.margin
    detail = f"{skipped} degenerate window(s) skipped" if skipped else "all windows full rank"
    return Verdict("polytope", PASS, margin=worst, detail=detail)


# ---------------------------------------------------------------------------
# psi families and conditional checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsiSpec:
    """Parametric decay target psi(y) for singularity testing.

    Families:
      power       psi(y) = coeff * y**(-power_exp)
      log         psi(y) = 1 / (y**(r+k) * (log y)**(delta_k + 1 + eps))
      loglog      psi(y) = 1 / (y**(r+k) * (log y)**delta_k
                                * (log log y)**(1 + eps))
    Logarithms are natural; the choice only shifts constants and is
    recorded here once.
    """

    family: str
    r: int
    k: int = 1
    eps: Fraction = Fraction(0)
    coeff: Fraction = Fraction(1)
    power_exp: Fraction = Fraction(0)

    def __post_init__(self):
        if self.family not in ("power", "log", "loglog"):
            raise ValueError(f"unknown psi family {self.family!r}")
        if self.r < 1 or self.k < 1:
            raise ValueError("r and k must be positive")
        if self.family in ("log", "loglog") and self.eps <= 0:
            raise ValueError("eps must be positive for logarithmic families")
        if self.family == "power" and self.coeff <= 0:
            raise ValueError("coeff must be positive")

    @property
    def delta_k(self) -> int:
        return 1 if self.k == 1 else 0

    @property
    def y_min(self) -> int:
        # smallest integer argument with a positive, finite value
        if self.family == "log":
            return 2
        if self.family == "loglog":
            return 3  # needs log y > 1
        return 1

    def value(self, y: int, precision: int = 96) -> DyadicInterval:
        """Certified enclosure of psi(y) for integer y >= y_min."""
        if y < self.y_min:
            raise DomainError(f"psi undefined below y = {self.y_min}")
        p = precision
        if self.family == "power":
            base = DyadicInterval.point(y)
            powered = pow_rational(base, self.power_exp, p)
            inv = powered.reciprocal(p)
            c = DyadicInterval.from_fractions(self.coeff, self.coeff, p)
            return c * inv
        ypow = y ** (self.r + self.k)
        log_y = ln_interval(y, p)
        if self.family == "log":
            exponent = Fraction(self.delta_k + 1) + self.eps
            denom = pow_rational(log_y, exponent, p).mul_int(ypow)
            return denom.reciprocal(p)
        # loglog
        loglog_y = ln_interval(log_y, p)
        if loglog_y.lo.man <= 0:
            raise DomainError("log log y not certifiably positive")
        denom = pow_rational(loglog_y, Fraction(1) + self.eps, p)
        if self.delta_k:
            denom = denom * log_y
        denom = denom.mul_int(ypow)
        return denom.reciprocal(p)

    def describe(self) -> str:
        if self.family == "power":
            return f"psi(y) = {self.coeff} * y^-({self.power_exp})"
        if self.family == "log":
            return (f"psi(y) = 1/(y^{self.r + self.k} "
                    f"(log y)^({self.delta_k}+1+{self.eps}))")
        return (f"psi(y) = 1/(y^{self.r + self.k} (log y)^{self.delta_k} "
                f"(log log y)^(1+{self.eps}))")


def check_psi_singular(chain: BAChain, psi: PsiSpec,
                       precision: int = 96) -> Verdict:
    """zeta_nu <= psi(M_{nu+1}) for every applicable nu.

    Most chains fail this: singularity at a prescribed rate is a property
    of special tuples, so a first-violation report is the informative
    outcome, not a defect.
    """
    if len(chain.records) < 2:
        raise ChainTooShort("need at least 2 records")
    skipped = 0
    for rec, nxt in zip(chain.records, chain.records[1:]):
        y = nxt.M
        if y < psi.y_min:
            skipped += 1
            continue
        p = precision
        while True:
            psi_iv = psi.value(y, p)
            if rec.zeta.hi <= psi_iv.lo:
                break  # certified pass at this index
            if psi_iv.hi < rec.zeta.lo:
                return Verdict("psi-singular", FAIL, witness_index=rec.index,
                               margin=psi_iv,
                               detail=f"zeta_{rec.index} > psi({y}) certified; "
                                      f"{psi.describe()}")
            if p >= PRECISION_CAP // 2:
                return Verdict("psi-singular", UNDECIDED,
                               witness_index=rec.index,
                               detail="enclosures never separated")
            p *= 2
    note = f"{skipped} index(es) below y_min skipped; " if skipped else ""
    return Verdict("psi-singular", PASS,
                   detail=note + psi.describe())


def series_partial_sums(chain: BAChain, k: int,
                        precision: int = 96) -> list[DyadicInterval]:
    """Certified partial sums S_N of the convergence diagnostic series
    sum_nu M_{nu+1}**(r+k) * (log M_{nu+1})**delta_k * zeta_nu.

    delta_k is 1 for k = 1 and 0 for k >= 2; logs are natural.  Terms are
    positive, so the sums are strictly increasing.
    """
    if len(chain.records) < 2:
        raise ChainTooShort("need at least 2 records")
    if k < 1:
        raise ValueError("k must be >= 1")
    delta_k = 1 if k == 1 else 0
    r = chain.r
    sums: list[DyadicInterval] = []
    total = DyadicInterval.point(0)
    for rec, nxt in zip(chain.records, chain.records[1:]):
        term = rec.zeta.mul_int(nxt.M ** (r + k))
        if delta_k:
            term = term * ln_interval(nxt.M, precision)
        total = total + term
        sums.append(total)
    return sums


def check_norm_gap(chain: BAChain, psi: PsiSpec) -> Verdict:
    """Eventual norm gap M_{nu+r}**r >= M_{nu+1}**(r+k) under the loglog
    psi-singularity and full-rank-window hypotheses.

    The exponent inequality M_{nu+r} >= M_{nu+1}**(1 + k/r) is checked in
    the equivalent integer form, and the smallest index from which it
    holds through the end of the chain is reported.
    """
    r = chain.r
    k = psi.k
    if len(chain.records) < r + 1:
        raise HypothesisUnmet(f"need at least {r + 1} records")
    psi_verdict = check_psi_singular(chain, psi)
    if not psi_verdict.passed:
        raise HypothesisUnmet(
            f"chain is not singular for {psi.describe()}: {psi_verdict}")
    for nu in range(1, len(chain.records) - r + 1):
        if determinant(chain, nu) == 0:
            raise HypothesisUnmet(f"window {nu} is degenerate")
    last_fail = 0
    applicable = range(1, len(chain.records) - r + 1)
    for nu in applicable:
        m_far = chain.records[nu - 1 + r].M
        m_next = chain.records[nu].M
        if m_far ** r < m_next ** (r + k):
            last_fail = nu
    if last_fail >= applicable[-1]:
        return Verdict("norm-gap", FAIL, witness_index=last_fail,
                       detail="gap inequality fails through the end")
    return Verdict("norm-gap", PASS,
                   detail=f"holds for all nu >= {last_fail + 1}")


# ---------------------------------------------------------------------------
# Aggregate report
# ---------------------------------------------------------------------------


@dataclass
class ChainReport:
    """All verdicts and tables for one chain, serializable via to_dict."""

    verdicts: dict[str, Verdict] = field(default_factory=dict)
    determinants: dict[int, int] = field(default_factory=dict)
    tail_ranks: dict[int, int] = field(default_factory=dict)
    series_sums: list[DyadicInterval] = field(default_factory=list)
    series_k: Optional[int] = None
    notes: list[str] = field(default_factory=list)

    @property
    def theorem_checks_pass(self) -> bool:
        return all(v.status in (PASS, SKIPPED)
                   for name, v in self.verdicts.items()
                   if name in THEOREM_CHECKS)

    def to_dict(self) -> dict:
        out = {
            "version": 1,
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "determinants": {str(k): v for k, v in self.determinants.items()},
            "tail_ranks": {str(k): v for k, v in self.tail_ranks.items()},
            "notes": self.notes,
        }
        if self.series_k is not None:
            out["series_k"] = self.series_k
            out["series_partial_sums"] = [
                [s.lo.to_hex(), s.hi.to_hex()] for s in self.series_sums]
        return out


def run_checks(chain: BAChain, psi: Optional[PsiSpec] = None,
               series_k: Optional[int] = None,
               selected: Optional[set[str]] = None) -> ChainReport:
    """Run the selected checks (default: all applicable) and collect the
    evidence tables."""
    report = ChainReport()

    def wanted(name: str) -> bool:
        return selected is None or name in selected

    def run(name: str, fn) -> None:
        try:
            report.verdicts[name] = fn()
        except ChainTooShort as exc:
            report.verdicts[name] = Verdict(name, SKIPPED, detail=str(exc))
            report.notes.append(f"{name}: {exc}")

    if wanted("monotonic"):
        run("monotonic", lambda: check_monotonic(chain))
    if wanted("minkowski"):
        run("minkowski", lambda: check_minkowski(chain))
    if wanted("growth"):
        run("growth", lambda: check_growth(chain))
    if wanted("polytope"):
        run("polytope", lambda: check_polytope_all(chain))
    if wanted("determinants"):
        r = chain.r
        for nu in range(1, len(chain.records) - r + 1):
            report.determinants[nu] = determinant(chain, nu)
    if wanted("ranks"):
        for nu0 in range(1, len(chain.records) + 1):
            report.tail_ranks[nu0] = tail_rank(chain, nu0)
    if psi is not None and wanted("psi"):
        run("psi-singular", lambda: check_psi_singular(chain, psi))
        if "psi-singular" in report.verdicts and \
                report.verdicts["psi-singular"].passed:
            try:
                report.verdicts["norm-gap"] = \
                    check_norm_gap(chain, psi)
            except HypothesisUnmet as exc:
                report.verdicts["norm-gap"] = Verdict(
                    "norm-gap", SKIPPED, detail=str(exc))
    if series_k is not None and wanted("series"):
        try:
            report.series_sums = series_partial_sums(chain, series_k)
            report.series_k = series_k
        except ChainTooShort as exc:
            report.notes.append(f"series: {exc}")
    return report

"""Exact best-approximation chains for linear forms, with certified checks."""

from .errors import (
    AmbiguousRounding,
    BachainError,
    ChainTooShort,
    DependenceSuspected,
    DomainError,
    HypothesisUnmet,
    PrecisionExhausted,
    SearchTooLarge,
    WidthTooLarge,
)
from .realnum import (
    GREATER,
    LESS,
    PRECISION_CAP,
    Dyadic,
    DyadicInterval,
    RealExpr,
    Undecided,
    compare,
    eval_interval,
    ln_interval,
    nearest_integer,
    rational,
    root,
)
from .linform import IntVector, LinearForm, best_m0, canonicalize_sign, zeta
from .enumerator import (
    BAChain,
    BestApprox,
    brute_force_oracle,
    cf_convergents,
    convergent_denominators,
    enumerate_chain,
)
from .analysis import (
    ChainReport,
    PsiSpec,
    Verdict,
    check_growth,
    check_minkowski,
    check_monotonic,
    check_norm_gap,
    check_polytope_bound,
    check_psi_singular,
    determinant,
    run_checks,
    series_partial_sums,
    tail_rank,
)
from .extension import (
    BetaSample,
    CriterionVerdict,
    ExperimentConfig,
    ExtensionReport,
    MonteCarloResult,
    PaddedVector,
    compare_extended,
    degeneracy_criterion,
    lattice_inv_norm_sum,
    load_experiment_config,
    monte_carlo,
    omega_bound,
    pad_chain,
    sample_betas,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"

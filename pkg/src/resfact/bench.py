"""Monte-Carlo capacity benchmark for the factorizer variants.

A sweep runs seeded trials at a series of search-space sizes.  Each
trial builds fresh codebooks, plants a ground-truth index per factor,
binds the product vector, and scores the decoder against the planted
truth.  Per size the harness reports accuracy with a Wilson 95%
interval and the mean iteration count; the report's operational
capacity is the largest swept size still decoded with at least 99%
accuracy.

Scoring rules: a trial counts as accurate only if the decoder both
converged and matched the truth; unconverged trials contribute the full
iteration budget to the mean.  Trial seeds are derived from
(master_seed, size index, trial index), so results do not depend on
scheduling order and a sweep is byte-reproducible at any parallelism.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import fmean
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .factorizer import (
    DEFAULT_ITER_CAP,
    FactorizerConfig,
    VariantSpec,
    VARIANT_KINDS,
    run,
)
from .presets import PRESET_FACTOR_COUNTS, load_preset_table, lookup_preset
from .vsa import Codebook, bind_product, generate_codebook

#: Refuse exhaustive search above this many index combinations.
DEFAULT_ORACLE_CAP = 10**6
#: Accuracy level defining operational capacity.
CAPACITY_ACCURACY = 0.99


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one factorization trial.

    ``correct`` records whether all decoded indices matched the planted
    truth, independent of convergence; accuracy aggregation additionally
    requires ``converged``.
    """

    correct: bool
    iterations: int
    converged: bool
    seed: int


@dataclass(frozen=True)
class OracleResult:
    indices: Tuple[int, ...]
    similarity: float


@dataclass(frozen=True)
class OracleCheck:
    """Factorizer-vs-exhaustive-search agreement over seeded trials."""

    trials: int
    converged: int
    agreements: int

    @property
    def all_agree(self) -> bool:
        return self.agreements == self.converged


@dataclass(frozen=True)
class SweepConfig:
    """One capacity sweep: variant, sizes, trial count, seeds.

    Hyperparameters come either from the built-in preset table
    (``use_presets=True``; D, sigma/flip_rate and the activation
    threshold all resolve per size) or from the explicit fields.  The
    two sources are mutually exclusive.
    """

    F: int
    variant_kind: str
    search_space_sizes: Tuple[int, ...]
    trials_per_size: int = 200
    D: Optional[int] = None
    sigma: Optional[float] = None
    flip_rate: Optional[float] = None
    activation_threshold: Optional[float] = None
    use_presets: bool = False
    presets_path: Optional[str] = None
    convergence_threshold: float = 0.8
    max_iters: Optional[int] = None
    master_seed: int = 0
    parallelism: int = 1

    def __post_init__(self):
        if self.F < 2:
            raise ValueError(f"F must be >= 2, got {self.F}")
        if self.variant_kind not in VARIANT_KINDS:
            raise ValueError(f"variant_kind must be one of {VARIANT_KINDS}")
        sizes = tuple(sorted(int(s) for s in self.search_space_sizes))
        if not sizes:
            raise ValueError("search_space_sizes must not be empty")
        object.__setattr__(self, "search_space_sizes", sizes)
        if self.trials_per_size < 1:
            raise ValueError(f"trials_per_size must be >= 1, got {self.trials_per_size}")
        if self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0.0 < self.convergence_threshold <= 1.0:
            raise ValueError(
                f"convergence_threshold must be in (0, 1], got {self.convergence_threshold}"
            )
        if self.use_presets:
            if self.F not in PRESET_FACTOR_COUNTS:
                raise ValueError(
                    f"presets cover F in {PRESET_FACTOR_COUNTS}, got F={self.F}"
                )
            for key in ("D", "sigma", "flip_rate", "activation_threshold"):
                if getattr(self, key) is not None:
                    raise ValueError(
                        f"{key} must be omitted when use_presets is set; presets supply it"
                    )
        else:
            if self.D is None:
                raise ValueError("D is required when use_presets is not set")
            if self.variant_kind == "imf" and self.sigma is None:
                raise ValueError("sigma is required for imf when use_presets is not set")
            if self.variant_kind == "acf" and self.flip_rate is None:
                raise ValueError(
                    "flip_rate is required for acf when use_presets is not set"
                )

    def explicit_variant(self) -> VariantSpec:
        thresh = self.activation_threshold if self.activation_threshold is not None else 0.0
        if self.variant_kind == "brn":
            return VariantSpec.brn(activation_threshold=thresh)
        if self.variant_kind == "imf":
            return VariantSpec.imf(sigma=self.sigma, activation_threshold=thresh)
        return VariantSpec.acf(flip_rate=self.flip_rate, activation_threshold=thresh)


@dataclass(frozen=True)
class CapacityRow:
    """One swept size, field-for-field what lands in the report."""

    variant: str
    F: int
    M: int
    D: int
    search_space: int
    trials: int
    accuracy: float
    ci_low: float
    ci_high: float
    mean_iterations: float
    sigma: Optional[float]
    flip_rate: Optional[float]
    activation_threshold: float
    convergence_threshold: float
    max_iters: int
    preset_exact: str


@dataclass(frozen=True)
class CapacityReport:
    config: SweepConfig
    rows: Tuple[CapacityRow, ...]
    operational_capacity: Optional[int]


def M_for_target(target: int, F: int) -> int:
    """Codebook size whose F-th power is closest to the target size."""
    if F < 2:
        raise ValueError(f"F must be >= 2, got {F}")
    if target < 2**F:
        raise ValueError(f"target size {target} gives M < 2 at F={F}")
    guess = round(target ** (1.0 / F))
    candidates = [m for m in (guess - 1, guess, guess + 1) if m >= 2]
    return min(candidates, key=lambda m: (abs(m**F - target), m))


def trial_seed_for(master_seed: int, size_index: int, trial_index: int) -> int:
    """Stable per-trial seed; a pure function of the three indices."""
    ss = np.random.SeedSequence([master_seed % 2**64, size_index, trial_index])
    return int(ss.generate_state(1, np.uint64)[0])


def make_instance(trial_seed: int, M: int, F: int, D: int):
    """Build one problem instance: codebooks, planted truth, product vector.

    Returns (x, books, truth, factorizer_seed).  The decoder seed is
    split off the same root so instance sampling and decoding stay
    independent streams.
    """
    root = np.random.SeedSequence(trial_seed % 2**64)
    inst_ss, fact_ss = root.spawn(2)
    rng = np.random.default_rng(inst_ss)
    books = [generate_codebook(M, D, rng) for _ in range(F)]
    truth = tuple(int(i) for i in rng.integers(0, M, size=F))
    x = bind_product(books, truth)
    fact_seed = int(fact_ss.generate_state(1, np.uint64)[0])
    return x, books, truth, fact_seed


def run_trial(
    trial_seed: int,
    M: int,
    F: int,
    D: int,
    variant: VariantSpec,
    max_iters: Optional[int] = None,
    convergence_threshold: float = 0.8,
    convergence_mode: str = "early",
    update_schedule: str = "sequential",
) -> TrialResult:
    """One seeded trial: fresh instance, one decode, scored against truth."""
    x, books, truth, fact_seed = make_instance(trial_seed, M, F, D)
    cfg = FactorizerConfig(
        variant=variant,
        F=F,
        M=M,
        D=D,
        max_iters=max_iters,
        convergence_threshold=convergence_threshold,
        convergence_mode=convergence_mode,
        update_schedule=update_schedule,
        seed=fact_seed,
    )
    res = run(x, books, cfg)
    return TrialResult(
        correct=res.indices == truth,
        iterations=res.iterations,
        converged=res.converged,
        seed=trial_seed,
    )


def brute_force_oracle(x, books, cap: int = DEFAULT_ORACLE_CAP) -> OracleResult:
    """Exhaustively find the codevector combination most similar to ``x``.

    Ties resolve to the lexicographically smallest index tuple.  Refuses
    outright when the number of combinations exceeds ``cap``; exhaustive
    search is a verification tool, not a decoder.
    """
    books = list(books)
    if len(books) < 2:
        raise ValueError(f"need at least 2 codebooks, got {len(books)}")
    total = math.prod(b.size for b in books)
    if total > cap:
        raise ValueError(f"search space {total} exceeds oracle cap {cap}")
    xv = np.asarray(x)
    dim = books[0].dim
    for b in books:
        if b.dim != dim or xv.shape[0] != dim:
            raise ValueError("codebook and input dimensions must all match")

    # Enumerate leading factors; close each combination with one
    # matrix product over the last two factors. +-1 sums are exact in
    # float32 well past any dimension used here.
    penult = books[-2].codevectors.astype(np.float32)
    last = books[-1].codevectors
    lead_books = books[:-2]
    best_dot = -np.inf
    best_idx: Optional[Tuple[int, ...]] = None
    for lead in itertools.product(*(range(b.size) for b in lead_books)):
        partial = xv.astype(np.int8, copy=True)
        for b, i in zip(lead_books, lead):
            partial *= b.codevectors[i]
        dots = penult @ (last * partial).astype(np.float32).T
        flat = int(np.argmax(dots))
        value = float(dots.flat[flat])
        if value > best_dot:
            best_dot = value
            i, j = divmod(flat, dots.shape[1])
            best_idx = lead + (i, j)
    return OracleResult(indices=best_idx, similarity=best_dot / dim)


def oracle_agreement(
    M: int,
    F: int,
    D: int,
    variant: VariantSpec,
    n_trials: int,
    master_seed: int = 0,
    cap: int = DEFAULT_ORACLE_CAP,
    max_iters: Optional[int] = None,
    convergence_threshold: float = 0.8,
) -> OracleCheck:
    """Cross-check converged decodes against exhaustive search.

    Agreement is counted among converged trials only; an unconverged
    decode makes no claim worth checking.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if M**F > cap:
        raise ValueError(f"search space {M**F} exceeds oracle cap {cap}")
    converged = 0
    agreements = 0
    for t in range(n_trials):
        seed = trial_seed_for(master_seed, 0, t)
        x, books, _, fact_seed = make_instance(seed, M, F, D)
        cfg = FactorizerConfig(
            variant=variant,
            F=F,
            M=M,
            D=D,
            max_iters=max_iters,
            convergence_threshold=convergence_threshold,
            seed=fact_seed,
        )
        res = run(x, books, cfg)
        if not res.converged:
            continue
        converged += 1
        if res.indices == brute_force_oracle(x, books, cap).indices:
            agreements += 1
    return OracleCheck(trials=n_trials, converged=converged, agreements=agreements)


def wilson_interval(successes: int, n: int, z: float = 1.96) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% at z=1.96)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= successes <= n:
        raise ValueError(f"successes must be in [0, {n}], got {successes}")
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def operational_capacity(rows: Sequence[CapacityRow]) -> Optional[int]:
    """Largest swept size with accuracy at or above the 99% bar, if any."""
    qualifying = [r.search_space for r in rows if r.accuracy >= CAPACITY_ACCURACY]
    return max(qualifying) if qualifying else None


def _resolve_size(cfg: SweepConfig, target: int):
    M = M_for_target(target, cfg.F)
    realized = M**cfg.F
    if cfg.use_presets:
        table = load_preset_table(cfg.presets_path)
        hit = lookup_preset(cfg.F, realized, cfg.variant_kind, table=table)
        variant, D = hit.variant, hit.D
        preset_exact = "true" if hit.exact else "false"
    else:
        variant = cfg.explicit_variant()
        D = cfg.D
        preset_exact = "n/a"
    max_iters = cfg.max_iters if cfg.max_iters is not None else min(realized, DEFAULT_ITER_CAP)
    return M, realized, D, variant, max_iters, preset_exact


def _trial_worker(args) -> TrialResult:
    seed, M, F, D, variant, max_iters, conv_threshold = args
    return run_trial(
        seed, M, F, D, variant,
        max_iters=max_iters,
        convergence_threshold=conv_threshold,
    )


def run_sweep(
    cfg: SweepConfig,
    progress: Optional[Callable[[CapacityRow], None]] = None,
) -> CapacityReport:
    """Run the full sweep and aggregate one row per size.

    ``progress`` (if given) observes each finished row; the CLI uses it
    for stderr status lines.  Trial seeds depend only on (master seed,
    size index, trial index), so any parallelism degree yields the same
    report.
    """
    rows = []
    for size_index, target in enumerate(cfg.search_space_sizes):
        M, realized, D, variant, max_iters, preset_exact = _resolve_size(cfg, target)
        n = cfg.trials_per_size
        args = [
            (
                trial_seed_for(cfg.master_seed, size_index, t),
                M, cfg.F, D, variant, max_iters, cfg.convergence_threshold,
            )
            for t in range(n)
        ]
        if cfg.parallelism > 1:
            chunk = max(1, math.ceil(n / (cfg.parallelism * 4)))
            with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
                results = list(pool.map(_trial_worker, args, chunksize=chunk))
        else:
            results = [_trial_worker(a) for a in args]
        successes = sum(1 for r in results if r.correct and r.converged)
        ci_low, ci_high = wilson_interval(successes, n)
        row = CapacityRow(
            variant=cfg.variant_kind,
            F=cfg.F,
            M=M,
            D=D,
            search_space=realized,
            trials=n,
            accuracy=successes / n,
            ci_low=ci_low,
            ci_high=ci_high,
            mean_iterations=fmean(r.iterations for r in results),
            sigma=variant.sigma,
            flip_rate=variant.flip_rate,
            activation_threshold=variant.activation_threshold,
            convergence_threshold=cfg.convergence_threshold,
            max_iters=max_iters,
            preset_exact=preset_exact,
        )
        rows.append(row)
        if progress is not None:
            progress(row)
    rows.sort(key=lambda r: r.search_space)
    return CapacityReport(
        config=cfg,
        rows=tuple(rows),
        operational_capacity=operational_capacity(rows),
    )

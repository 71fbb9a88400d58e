"""Iterative factorization of bipolar product vectors.

Given a vector known to be the element-wise product of one codevector per
factor, the decoder loops over four phases per factor: unbind the other
factors' current estimates from the input, score the unbound vector
against the factor's codebook (an attention vector of cosine
similarities), sparsify the attentions with a threshold, and rebuild
the estimate as the sign of the attention-weighted codevector
superposition.

Three variants share that loop:

* ``brn``  -- deterministic baseline; prone to limit cycles at large
  search spaces.
* ``imf``  -- adds fresh i.i.d. Gaussian noise (std ``sigma``) to every
  attention read, which lets the search escape repeating states.
* ``acf``  -- flips each element of a *reconstruction copy* of every
  codebook once, with probability ``flip_rate``, at initialization; the
  search copy stays clean and the fixed asymmetry plays the role of
  noise without a per-iteration noise source.

All randomness derives from a single 64-bit seed through fixed, named
substreams (mask / init / tie-break / attention-noise), so runs are
bit-reproducible and a variant's draws never disturb another's: ``acf``
with ``flip_rate=0`` and ``imf`` with ``sigma=0`` reproduce ``brn``
trajectories exactly under the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .vsa import Codebook, random_bipolar, sign_to_bipolar

VARIANT_KINDS = ("brn", "imf", "acf")
CONVERGENCE_MODES = ("early", "legacy")
UPDATE_SCHEDULES = ("sequential", "parallel")
#: Hard cap on the default iteration budget min(M**F, cap).
DEFAULT_ITER_CAP = 10_000
#: Kernel matrices stay float32 while M * D is comfortably below 2**24,
#: where sums of +-1 products are still exact integers.
_FLOAT32_LIMIT = 2**22


@dataclass(frozen=True)
class VariantSpec:
    """Which decoder variant to run, plus its variant-specific knobs.

    ``sigma`` is only meaningful (and only allowed) for ``imf``;
    ``flip_rate`` only for ``acf``.  ``activation_threshold`` applies to
    every variant: attentions at or below it are zeroed before
    reconstruction (strict comparison).  At the default of 0 positive
    attentions pass through untouched, but negative ones are still
    dropped; keeping them turns out to stabilize spurious two-factor
    states where each estimate locks to the complement of the other.
    """

    kind: str
    sigma: Optional[float] = None
    flip_rate: Optional[float] = None
    activation_threshold: float = 0.0

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise ValueError(f"variant kind must be one of {VARIANT_KINDS}, got {self.kind!r}")
        if self.kind == "imf":
            if self.sigma is None:
                raise ValueError("imf requires sigma")
            if self.sigma < 0:
                raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        elif self.sigma is not None:
            raise ValueError(f"sigma only applies to imf, not {self.kind}")
        if self.kind == "acf":
            if self.flip_rate is None:
                raise ValueError("acf requires flip_rate")
            if not 0.0 <= self.flip_rate <= 1.0:
                raise ValueError(f"flip_rate must be in [0, 1], got {self.flip_rate}")
        elif self.flip_rate is not None:
            raise ValueError(f"flip_rate only applies to acf, not {self.kind}")
        if self.activation_threshold < 0:
            raise ValueError(
                f"activation_threshold must be >= 0, got {self.activation_threshold}"
            )

    @classmethod
    def brn(cls, activation_threshold: float = 0.0) -> "VariantSpec":
        return cls("brn", activation_threshold=activation_threshold)

    @classmethod
    def imf(cls, sigma: float, activation_threshold: float = 0.0) -> "VariantSpec":
        return cls("imf", sigma=sigma, activation_threshold=activation_threshold)

    @classmethod
    def acf(cls, flip_rate: float, activation_threshold: float = 0.0) -> "VariantSpec":
        return cls("acf", flip_rate=flip_rate, activation_threshold=activation_threshold)


@dataclass(frozen=True)
class FactorizerConfig:
    """Full problem + decoder configuration for one run."""

    variant: VariantSpec
    F: int
    M: int
    D: int
    max_iters: Optional[int] = None
    convergence_threshold: float = 0.8
    convergence_mode: str = "early"
    convergence_quantifier: str = "all"
    update_schedule: str = "sequential"
    seed: int = 0

    def __post_init__(self):
        if self.F < 2:
            raise ValueError(f"F must be >= 2, got {self.F}")
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")
        if self.D < 1:
            raise ValueError(f"D must be >= 1, got {self.D}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0.0 < self.convergence_threshold <= 1.0:
            raise ValueError(
                f"convergence_threshold must be in (0, 1], got {self.convergence_threshold}"
            )
        if self.convergence_mode not in CONVERGENCE_MODES:
            raise ValueError(f"convergence_mode must be one of {CONVERGENCE_MODES}")
        if self.convergence_quantifier not in ("all", "any"):
            raise ValueError("convergence_quantifier must be 'all' or 'any'")
        if self.update_schedule not in UPDATE_SCHEDULES:
            raise ValueError(f"update_schedule must be one of {UPDATE_SCHEDULES}")

    def resolved_max_iters(self) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return min(self.M**self.F, DEFAULT_ITER_CAP)


@dataclass
class FactorizerState:
    """Decoder state after ``iteration`` update sweeps.

    ``estimates`` is (F, D) int8; ``attentions`` is (F, M) float64 and
    holds the pre-activation attention of each factor from the most
    recent sweep (NaN before the first one).
    """

    estimates: np.ndarray
    attentions: np.ndarray
    iteration: int = 0
    converged: bool = False


@dataclass(frozen=True)
class PerturbedCodebooks:
    """Search and reconstruction codebook copies for one run.

    For ``brn`` and ``imf`` the reconstruction books alias the search
    books and ``masks`` is None.  For ``acf``, ``masks[f]`` is the (M, D)
    +-1 flip mask applied once to factor f's reconstruction copy; it is
    generated at initialization and never changes during a run.
    """

    search_books: tuple
    recon_books: tuple
    masks: Optional[tuple] = None


@dataclass
class FactorizerStreams:
    """Named random substreams derived from one root seed.

    Keeping the streams separate means e.g. ``imf`` noise draws cannot
    shift the tie-break draws that all variants share.
    """

    masks: np.random.Generator
    init: np.random.Generator
    ties: np.random.Generator
    noise: np.random.Generator


def derive_streams(seed: int) -> FactorizerStreams:
    root = np.random.SeedSequence(seed % 2**64)
    children = root.spawn(4)
    return FactorizerStreams(*(np.random.default_rng(c) for c in children))


@dataclass(frozen=True)
class FactorizeResult:
    indices: tuple
    iterations: int
    converged: bool
    state: FactorizerState


def generate_bfm(size: int, dim: int, flip_rate: float, rng: np.random.Generator) -> np.ndarray:
    """Random bit-flip mask: (size, dim) entries, -1 with probability ``flip_rate``.

    Multiplying a codebook by the mask flips each element independently
    with probability ``flip_rate``; 0 leaves everything intact and 1
    negates every element.
    """
    if not 0.0 <= flip_rate <= 1.0:
        raise ValueError(f"flip_rate must be in [0, 1], got {flip_rate}")
    u = rng.random(size=(size, dim))
    return np.where(u < flip_rate, -1, 1).astype(np.int8)


def perturb_codebooks(books, variant: VariantSpec, rng: np.random.Generator) -> PerturbedCodebooks:
    """Build the per-run codebook copies; only ``acf`` actually perturbs.

    The masks are drawn here, once, so the same asymmetry applies at
    every subsequent iteration.
    """
    search = tuple(books)
    if variant.kind != "acf":
        return PerturbedCodebooks(search_books=search, recon_books=search, masks=None)
    masks = tuple(generate_bfm(b.size, b.dim, variant.flip_rate, rng) for b in search)
    recon = tuple(
        Codebook(b.codevectors * m) for b, m in zip(search, masks)
    )
    return PerturbedCodebooks(search_books=search, recon_books=recon, masks=masks)


def init_estimates(pbooks: PerturbedCodebooks, rng: np.random.Generator) -> FactorizerState:
    """Start every factor at the majority bundle of its full search codebook.

    That gives each candidate codevector a small positive expected
    attention, so no candidate starts invisible.
    """
    estimates = np.stack(
        [
            sign_to_bipolar(b.codevectors.sum(axis=0, dtype=np.int64), rng)
            for b in pbooks.search_books
        ]
    )
    n_factors = len(pbooks.search_books)
    size = pbooks.search_books[0].size
    attentions = np.full((n_factors, size), np.nan)
    return FactorizerState(estimates=estimates, attentions=attentions)


def unbind_others(x, estimates, f: int) -> np.ndarray:
    """Strip every factor except ``f`` from the product vector ``x``."""
    est = np.asarray(estimates)
    if not 0 <= f < est.shape[0]:
        raise ValueError(f"factor index {f} out of range for {est.shape[0]} factors")
    xv = np.asarray(x)
    if est.shape[1] != xv.shape[0]:
        raise ValueError(f"dimension mismatch: {est.shape[1]} vs {xv.shape[0]}")
    out = xv.astype(np.int8, copy=True)
    for g in range(est.shape[0]):
        if g != f:
            out *= est[g]
    return out


def associative_search(
    unbound, book: Codebook, variant: VariantSpec, rng: np.random.Generator
) -> np.ndarray:
    """Attention vector: cosine similarity of ``unbound`` to every codevector.

    For ``imf`` a fresh Gaussian draw (std ``sigma``) is added to each
    entry; the other variants read the similarities exactly.
    """
    q = np.asarray(unbound)
    if q.shape[0] != book.dim:
        raise ValueError(f"dimension mismatch: {q.shape[0]} vs codebook {book.dim}")
    raw = (book.codevectors.astype(np.int64) * q.astype(np.int64)).sum(axis=1)
    alpha = raw.astype(np.float64) / book.dim
    if variant.kind == "imf":
        alpha = alpha + variant.sigma * rng.standard_normal(book.size)
    return alpha


def threshold_activation(alpha, threshold: float) -> np.ndarray:
    """Zero every attention entry not strictly above ``threshold``.

    With ``threshold=0`` this keeps only positive entries; the decoder
    applies it at every threshold, including 0.
    """
    arr = np.asarray(alpha, dtype=np.float64)
    return np.where(arr > threshold, arr, 0.0)


def reconstruct(activated, recon_book: Codebook, rng: np.random.Generator) -> np.ndarray:
    """New estimate: sign of the activation-weighted codevector superposition.

    Sum elements that are exactly zero are bipolarized at random.  If the
    whole activation vector is zero there is nothing to superpose, and the
    estimate restarts as a fresh random vector.
    """
    w = np.asarray(activated, dtype=np.float64)
    if w.shape[0] != recon_book.size:
        raise ValueError(
            f"activation length {w.shape[0]} does not match codebook size {recon_book.size}"
        )
    if not w.any():
        return random_bipolar(recon_book.dim, rng)
    s = w @ recon_book.codevectors.astype(np.float64)
    return sign_to_bipolar(s, rng)


def detect_convergence_early(
    state: FactorizerState, threshold: float, quantifier: str = "all"
) -> bool:
    """Converged when the max attention of every factor exceeds ``threshold``.

    Strict comparison, evaluated on the pre-activation attentions of the
    latest sweep.  ``quantifier='any'`` relaxes the check to a single
    factor (kept for comparison studies; not the default).
    """
    if np.isnan(state.attentions).any():
        raise ValueError("attentions not populated; run at least one step first")
    maxes = state.attentions.max(axis=1)
    if quantifier == "any":
        return bool((maxes > threshold).any())
    return bool((maxes > threshold).all())


def detect_convergence_legacy(prev_estimates, curr_estimates) -> bool:
    """Converged when no estimate changed between consecutive iterations."""
    prev = np.asarray(prev_estimates)
    curr = np.asarray(curr_estimates)
    if prev.shape != curr.shape:
        raise ValueError(f"shape mismatch: {prev.shape} vs {curr.shape}")
    return bool(np.array_equal(prev, curr))


class _Kernels:
    """Float copies of the codebooks for BLAS matrix-vector products.

    float32 is used while sums of +-1 products stay exactly
    representable; attention numerators are therefore exact integers in
    either dtype.
    """

    __slots__ = ("search", "recon", "dtype")

    def __init__(self, pbooks: PerturbedCodebooks):
        size = pbooks.search_books[0].size
        dim = pbooks.search_books[0].dim
        self.dtype = np.float32 if size * dim <= _FLOAT32_LIMIT else np.float64
        self.search = [b.codevectors.astype(self.dtype) for b in pbooks.search_books]
        if pbooks.recon_books is pbooks.search_books:
            self.recon = self.search
        else:
            self.recon = [b.codevectors.astype(self.dtype) for b in pbooks.recon_books]


def _advance(estimates, x, kernels, cfg, streams):
    """One full update sweep over all factors.

    Returns fresh (estimates, attentions) arrays.  Reconstruction weights
    are the attention *numerators* (dot products) rather than the
    normalized attentions: the positive rescaling cannot change any sign,
    and it keeps exact-zero ties exact in float arithmetic.
    """
    n_factors, dim = estimates.shape
    size = kernels.search[0].shape[0]
    variant = cfg.variant
    sigma = variant.sigma if variant.kind == "imf" else 0.0
    thresh = variant.activation_threshold

    working = estimates.copy()
    source = estimates if cfg.update_schedule == "parallel" else working
    new_estimates = np.empty_like(estimates)
    attentions = np.empty((n_factors, size), dtype=np.float64)

    for f in range(n_factors):
        unbound = x.astype(np.int8, copy=True)
        for g in range(n_factors):
            if g != f:
                unbound *= source[g]
        raw = kernels.search[f] @ unbound.astype(kernels.dtype)
        numerators = raw.astype(np.float64)
        alpha = numerators / dim
        if variant.kind == "imf":
            noise = streams.noise.standard_normal(size)
            alpha = alpha + sigma * noise
            weights = numerators + (dim * sigma) * noise
        else:
            weights = numerators
        weights = np.where(alpha > thresh, weights, 0.0)
        if not weights.any():
            est = random_bipolar(dim, streams.ties)
        else:
            s = weights.astype(kernels.dtype) @ kernels.recon[f]
            est = sign_to_bipolar(s, streams.ties)
        attentions[f] = alpha
        new_estimates[f] = est
        if cfg.update_schedule == "sequential":
            working[f] = est

    return new_estimates, attentions


def step(
    state: FactorizerState,
    x,
    pbooks: PerturbedCodebooks,
    cfg: FactorizerConfig,
    streams: FactorizerStreams,
) -> FactorizerState:
    """Apply one update sweep and return the successor state."""
    if state.converged:
        raise RuntimeError("step called on a converged state")
    kernels = _Kernels(pbooks)
    estimates, attentions = _advance(state.estimates, np.asarray(x), kernels, cfg, streams)
    return FactorizerState(
        estimates=estimates,
        attentions=attentions,
        iteration=state.iteration + 1,
        converged=False,
    )


def _check_run_inputs(x, books, cfg: FactorizerConfig) -> None:
    if len(books) != cfg.F:
        raise ValueError(f"config expects F={cfg.F} codebooks, got {len(books)}")
    for f, b in enumerate(books):
        if b.size != cfg.M:
            raise ValueError(f"codebook {f} has size {b.size}, config says M={cfg.M}")
        if b.dim != cfg.D:
            raise ValueError(f"codebook {f} has dim {b.dim}, config says D={cfg.D}")
    if np.asarray(x).shape[0] != cfg.D:
        raise ValueError(f"input vector has dim {np.asarray(x).shape[0]}, config says D={cfg.D}")


def run(
    x,
    books,
    cfg: FactorizerConfig,
    on_step: Optional[Callable[[FactorizerState], None]] = None,
) -> FactorizeResult:
    """Factorize ``x`` against ``books`` under ``cfg``.

    Iterates update sweeps until the configured convergence test fires or
    the iteration budget runs out, then decodes each factor as the argmax
    of its final attention vector.  The whole trajectory is a pure
    function of ``cfg.seed``.

    ``on_step`` (if given) observes every post-sweep state; useful for
    trajectory comparisons and debugging.
    """
    xv = np.asarray(x)
    _check_run_inputs(xv, books, cfg)
    streams = derive_streams(cfg.seed)
    pbooks = perturb_codebooks(books, cfg.variant, streams.masks)
    kernels = _Kernels(pbooks)
    state = init_estimates(pbooks, streams.init)
    limit = cfg.resolved_max_iters()

    while state.iteration < limit:
        prev = state.estimates if cfg.convergence_mode == "legacy" else None
        estimates, attentions = _advance(state.estimates, xv, kernels, cfg, streams)
        state = FactorizerState(
            estimates=estimates, attentions=attentions, iteration=state.iteration + 1
        )
        if cfg.convergence_mode == "early":
            converged = detect_convergence_early(
                state, cfg.convergence_threshold, cfg.convergence_quantifier
            )
        else:
            converged = detect_convergence_legacy(prev, state.estimates)
        state.converged = converged
        if on_step is not None:
            on_step(state)
        if converged:
            break

    indices = tuple(int(np.argmax(state.attentions[f])) for f in range(cfg.F))
    return FactorizeResult(
        indices=indices,
        iterations=state.iteration,
        converged=state.converged,
        state=state,
    )

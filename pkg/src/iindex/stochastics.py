"""Random credit allocation among coauthors and the spread of the resulting I-function.

Each trial draws, for every publication, a split of its citations among the
coauthors from a symmetric Dirichlet whose concentration is tuned so that one
author's share has relative spread ``x`` percent around ``c/n``. The author's
share summed over publications and divided by N_c is one sample of the
I-function.

Trial ``k`` draws from its own Philox stream keyed by the master seed with
``k`` in the high counter word, so any partition of trials across workers
reproduces the serial result exactly.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from .metrics import DomainError, UndefinedMetricError, h_index, i_index_exact, total_citations
from .records import AuthorCorpus, Publication, effective_share_divisor

MAX_SPREAD = 20.0
MAX_ENUMERATION_LENGTH = 24
_U64 = (1 << 64) - 1
# concentration floor used when a requested spread cannot be reached
_MIN_ALPHA = 1e-2
# beyond this a Dirichlet draw differs from the equal split by less than float resolution
_MAX_ALPHA = 1e32


@dataclass(frozen=True)
class NoiseSpec:
    """Relative spread (percent of c/n) of an author's credit, per publication.

    ``x_bar`` applies to every publication not listed in ``per_paper``.
    """

    x_bar: float = 10.0
    per_paper: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for x in (self.x_bar, *self.per_paper.values()):
            if not 0 <= x <= MAX_SPREAD:
                raise DomainError(f"spread must lie in [0, {MAX_SPREAD:g}], got {x!r}")

    def x_for(self, p: Publication) -> float:
        return self.per_paper.get(p.id, self.x_bar)

    def to_dict(self) -> dict[str, Any]:
        return {"x_bar": self.x_bar, "per_paper": dict(sorted(self.per_paper.items()))}


@dataclass(frozen=True)
class SimulationResult:
    empirical_mean: float
    empirical_std: float
    skewness: float | None
    excess_kurtosis: float | None
    histogram: list[tuple[float, int]]
    predicted_mean: float
    predicted_sigma: float
    trials: int
    seed: int
    significant_papers: int
    n_bar: float
    x_bar: float

    @property
    def standard_error(self) -> float:
        return self.empirical_std / math.sqrt(self.trials)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["histogram"] = [[center, count] for center, count in self.histogram]
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SimulationResult":
        kwargs = {k: d[k] for k in cls.__dataclass_fields__}
        kwargs["histogram"] = [(float(c), int(n)) for c, n in d["histogram"]]
        return cls(**kwargs)


# -- sign-model oracles --------------------------------------------------------


def binomial_rms(l: int) -> float:
    """RMS of a sum of ``l`` independent fair +-1 signs (closed form sqrt(l))."""
    if l < 1:
        raise DomainError("l must be >= 1")
    return math.sqrt(l)


def brute_force_sign_rms(l: int) -> float:
    """RMS of the sign sum by enumerating every one of the 2**l sign vectors."""
    if not 1 <= l <= MAX_ENUMERATION_LENGTH:
        raise ValueError(f"l must be in 1..{MAX_ENUMERATION_LENGTH}, got {l}")
    total = 2 ** l
    chunk = min(total, 1 << 20)
    square_sum = 0
    for start in range(0, total, chunk):
        masks = np.arange(start, start + chunk, dtype=np.int64)
        sums = np.zeros(chunk, dtype=np.int64)
        for bit in range(l):
            sums += 2 * ((masks >> bit) & 1) - 1
        square_sum += int(np.dot(sums, sums))
    return math.sqrt(square_sum / total)


def expected_delta_rms(x_bar: float, n_bar: float, l: int) -> float:
    """Typical size of the I-index error when coauthor deviations have random signs."""
    if x_bar < 0 or n_bar < 1 or l < 1:
        raise DomainError("require x_bar >= 0, n_bar >= 1, l >= 1")
    return x_bar / (n_bar * math.sqrt(l))


def sigma_prediction(x_bar: float, n_bar: float, l: int) -> float:
    """Predicted standard deviation of the I-function over ``l`` significant papers."""
    return expected_delta_rms(x_bar, n_bar, l)


# -- credit sampler -------------------------------------------------------------


def dirichlet_concentration(n: int, x: float) -> float:
    """Symmetric Dirichlet concentration giving one coordinate a relative sd of x percent.

    A coordinate of Dirichlet(alpha, ..., alpha) on n parts has variance
    (1/n)(1 - 1/n)/(n*alpha + 1); setting its sd to (x/100)/n and solving gives
    alpha = (1e4*(n - 1)/x**2 - 1)/n.
    """
    if n < 2:
        raise DomainError("concentration is only defined for n >= 2")
    if not x > 0:
        raise DomainError("spread must be positive")
    alpha = (1e4 * (n - 1) / x / x - 1.0) / n
    if alpha <= 0:
        warnings.warn(
            f"spread {x}% unreachable for n={n} (max {100 * math.sqrt(n - 1):.1f}%); clamping",
            RuntimeWarning,
            stacklevel=2,
        )
        alpha = _MIN_ALPHA
    return alpha


def sample_credit_split(c: float, n: int, x: float, rng: np.random.Generator) -> np.ndarray:
    """Split credit ``c`` among ``n`` coauthors; shares sum to ``c``, mean c/n each."""
    if not c > 0:
        raise DomainError("c must be positive")
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0 <= x <= MAX_SPREAD:
        raise DomainError(f"spread must lie in [0, {MAX_SPREAD:g}]")
    if n == 1:
        return np.array([float(c)])
    alpha = dirichlet_concentration(n, x) if x > 0 else math.inf
    if alpha > _MAX_ALPHA:
        return np.full(n, c / n)
    g = rng.standard_gamma(alpha, size=n)
    return c * (g / g.sum())


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _U64, counter=[0, 0, trial, 0]))


# -- I-function simulation -------------------------------------------------------


@dataclass(frozen=True)
class _Group:
    n: int
    alpha: float
    credit: np.ndarray  # citations per chapter, one entry per publication


@dataclass(frozen=True)
class _Plan:
    seed: int
    n_c: int
    fixed: Fraction
    groups: tuple[_Group, ...]
    constant: float | None  # set when no publication carries randomness


def _build_plan(corpus: AuthorCorpus, noise: NoiseSpec, seed: int) -> _Plan:
    n_c = total_citations(corpus)
    fixed = Fraction(0)
    grouped: dict[tuple[int, float], list[float]] = {}
    for p in corpus.publications:
        x = noise.x_for(p)
        chapters = p.chapters or 1
        alpha = dirichlet_concentration(p.n_authors, x) if p.n_authors > 1 and x > 0 else math.inf
        if p.citations == 0 or alpha > _MAX_ALPHA:
            fixed += Fraction(p.citations, effective_share_divisor(p))
            continue
        key = (p.n_authors, alpha)
        grouped.setdefault(key, []).append(p.citations / chapters)
    groups = tuple(_Group(n, alpha, np.array(credit)) for (n, alpha), credit in grouped.items())
    constant = float(i_index_exact(corpus)) if not groups else None
    return _Plan(seed, n_c, fixed, groups, constant)


def _run_trials(plan: _Plan, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    if plan.constant is not None:
        out.fill(plan.constant)
        return out
    fixed = float(plan.fixed)
    for k in range(start, stop):
        rng = trial_generator(plan.seed, k)
        share = fixed
        for g in plan.groups:
            draws = rng.standard_gamma(g.alpha, size=(len(g.credit), g.n))
            share += float(np.dot(g.credit, draws[:, 0] / draws.sum(axis=1)))
        out[k - start] = 100.0 * share / plan.n_c
    return out


def _moments(values: np.ndarray) -> tuple[float, float, float | None, float | None]:
    if values.min() == values.max():
        return float(values[0]), 0.0, None, None
    mean = float(values.mean())
    dev = values - mean
    m2 = float(np.mean(dev**2))
    m3 = float(np.mean(dev**3))
    m4 = float(np.mean(dev**4))
    std = math.sqrt(m2 * len(values) / (len(values) - 1)) if len(values) > 1 else 0.0
    return mean, std, m3 / m2**1.5, m4 / (m2 * m2) - 3.0


def significant_papers(corpus: AuthorCorpus) -> list[Publication]:
    """The h most-cited publications; equal citation counts keep input order."""
    ranked = sorted(corpus.publications, key=lambda p: -p.citations)
    return ranked[: h_index(corpus)]


def simulate_trials(
    corpus: AuthorCorpus, noise: NoiseSpec, trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """Raw I-function samples, one per trial, in trial order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if total_citations(corpus) == 0:
        raise UndefinedMetricError("I-function is undefined when total citations are zero")
    plan = _build_plan(corpus, noise, seed)
    if workers <= 1 or trials < 2 * workers or plan.constant is not None:
        return _run_trials(plan, 0, trials)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_trials, [plan] * workers, bounds[:-1].tolist(), bounds[1:].tolist())
        return np.concatenate(list(parts))


def simulate_i_distribution(
    corpus: AuthorCorpus,
    noise: NoiseSpec,
    trials: int,
    seed: int,
    workers: int = 1,
    bins: int = 30,
) -> SimulationResult:
    values = simulate_trials(corpus, noise, trials, seed, workers)
    mean, std, skew, kurt = _moments(values)
    counts, edges = np.histogram(values, bins=bins)
    centers = (edges[:-1] + edges[1:]) / 2

    top = significant_papers(corpus)
    l = len(top)
    n_bar = sum(effective_share_divisor(p) for p in top) / l
    x_bar = sum(noise.x_for(p) for p in top) / l
    return SimulationResult(
        empirical_mean=mean,
        empirical_std=std,
        skewness=skew,
        excess_kurtosis=kurt,
        histogram=[(float(c), int(n)) for c, n in zip(centers, counts)],
        predicted_mean=float(i_index_exact(corpus)),
        predicted_sigma=sigma_prediction(x_bar, n_bar, l),
        trials=trials,
        seed=seed,
        significant_papers=l,
        n_bar=n_bar,
        x_bar=x_bar,
    )

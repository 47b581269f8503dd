"""Seeded search for test functions with large empirical inequality ratios.

The search runs ``restarts`` independent hill climbers, each driven by its own
generator spawned from the configuration seed.  The first climber starts from
the unmodulated Gaussian; the others start from random members of the family.
A climber perturbs one parameter at a time by a Gaussian step and keeps the
move when the ratio does not decrease.  Climbers are concatenated in restart
order, so the trace and the incumbent do not depend on how they were scheduled.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import DomainError
from .estimates import RatioReport, maximal_ratio, theorem1_ratio, tomas_stein_ratio
from .fourier import EpsLadder, Grid3D, TestFunction, lp_norm
from .measures import MeasureSpec
from .sphere import build_sphere_grid

__all__ = ["FamilyBounds", "SearchConfig", "SearchTrace", "optimize_ratio", "evaluate"]

OBJECTIVES = ("theorem1", "maximal", "tomas_stein")
# parameters per term: Re c, Im c, center (3), log scale, modulation (3)
_PER_TERM = 9


def _pair(v, name: str) -> tuple:
    try:
        lo, hi = (float(x) for x in v)
    except (TypeError, ValueError):
        raise DomainError(f"{name} bounds must be a [lo, hi] pair, got {v!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise DomainError(f"{name} bounds must be finite with lo <= hi, got {v!r}")
    return lo, hi


@dataclass(frozen=True)
class FamilyBounds:
    """Ranges for the term count, scales, modulation lengths and center coordinates."""

    terms: tuple = (1, 3)
    scale: tuple = (0.5, 2.0)
    modulation: tuple = (0.0, 1.5)
    center: tuple = (-1.0, 1.0)

    def __post_init__(self):
        t = _pair(self.terms, "terms")
        if t[0] < 1 or t[0] != int(t[0]) or t[1] != int(t[1]):
            raise DomainError("term-count bounds must be integers >= 1")
        object.__setattr__(self, "terms", (int(t[0]), int(t[1])))
        s = _pair(self.scale, "scale")
        if s[0] <= 0:
            raise DomainError("scale bounds must be positive")
        object.__setattr__(self, "scale", s)
        m = _pair(self.modulation, "modulation")
        if m[0] < 0:
            raise DomainError("modulation lengths must be nonnegative")
        object.__setattr__(self, "modulation", m)
        object.__setattr__(self, "center", _pair(self.center, "center"))

    def to_dict(self) -> dict:
        return {k: list(getattr(self, k)) for k in ("terms", "scale", "modulation", "center")}

    @classmethod
    def from_dict(cls, data: dict) -> "FamilyBounds":
        unknown = set(data) - {"terms", "scale", "modulation", "center"}
        if unknown:
            raise DomainError(f"unknown family_bounds keys: {sorted(unknown)}")
        return cls(**{k: tuple(v) for k, v in data.items()})


@dataclass(frozen=True)
class SearchConfig:
    """Objective, measure, budget and seed of one search."""

    objective: str = "theorem1"
    spec: MeasureSpec = field(default_factory=lambda: MeasureSpec.gaussian(1.0))
    rho: float = 3.0
    budget: int = 100
    seed: int = 0
    family_bounds: FamilyBounds = field(default_factory=FamilyBounds)
    restarts: int = 4
    grid_level: int = 4
    ladder: EpsLadder = field(default_factory=lambda: EpsLadder(1e-2, 1e2, 16))
    grid3d: Grid3D = field(default_factory=lambda: Grid3D(method="closed_form"))
    initial_step: float = 0.3

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise DomainError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if int(self.budget) != self.budget or self.budget < 0:
            raise DomainError(f"budget must be a nonnegative integer, got {self.budget}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an integer in [0, 2^64)")
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise DomainError("restarts must be a positive integer")
        if not self.initial_step > 0:
            raise DomainError("initial_step must be positive")
        if not float(self.rho) >= 1:
            raise DomainError("rho must be >= 1")
        object.__setattr__(self, "budget", int(self.budget))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "restarts", int(self.restarts))

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "spec": self.spec.to_dict(),
            "rho": self.rho,
            "budget": self.budget,
            "seed": self.seed,
            "family_bounds": self.family_bounds.to_dict(),
            "restarts": self.restarts,
            "grid_level": self.grid_level,
            "ladder": self.ladder.to_dict(),
            "grid3d": self.grid3d.to_dict(),
            "initial_step": self.initial_step,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SearchConfig":
        known = {"objective", "spec", "rho", "budget", "seed", "family_bounds", "restarts",
                 "grid_level", "ladder", "grid3d", "initial_step"}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown search config keys: {sorted(unknown)}")
        kw = dict(data)
        if "spec" in kw:
            kw["spec"] = MeasureSpec.from_dict(kw["spec"])
        if "family_bounds" in kw:
            kw["family_bounds"] = FamilyBounds.from_dict(kw["family_bounds"])
        if "ladder" in kw:
            kw["ladder"] = EpsLadder.from_dict(kw["ladder"])
        if "grid3d" in kw:
            kw["grid3d"] = Grid3D.from_dict(kw["grid3d"])
        if "rho" in kw:
            kw["rho"] = float(kw["rho"])
        return cls(**kw)


@dataclass(frozen=True)
class SearchTrace:
    """Ratios of every evaluation, the running incumbent and the best candidate.

    ``best_candidate`` is normalised so that the right-hand norm of the
    objective equals one; ``best_report`` is computed on it.
    """

    ratios: tuple
    incumbent: tuple
    best_index: int
    best_candidate: TestFunction
    best_report: RatioReport
    config: SearchConfig

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "ratios": list(self.ratios),
            "incumbent": list(self.incumbent),
            "best_index": self.best_index,
            "best_candidate": self.best_candidate.to_dict(),
            "best_report": self.best_report.to_dict(),
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["evaluation", "ratio", "incumbent"])
            for i, (r, b) in enumerate(zip(self.ratios, self.incumbent)):
                writer.writerow([i, repr(r), repr(b)])


# --- objective ------------------------------------------------------------------

@dataclass(frozen=True)
class _Context:
    config: SearchConfig
    grid: object

    @classmethod
    def build(cls, config: SearchConfig) -> "_Context":
        return cls(config, build_sphere_grid(config.grid_level))


def _rhs_exponent(objective: str) -> float:
    return 2.0 if objective == "tomas_stein" else 4.0 / 3.0


def _report(ctx: _Context, f: TestFunction) -> RatioReport:
    c = ctx.config
    if c.objective == "theorem1":
        return theorem1_ratio(f, c.spec, c.rho, ctx.grid, c.ladder, c.grid3d)
    if c.objective == "maximal":
        return maximal_ratio(f, c.spec, ctx.grid, c.ladder, c.grid3d)
    return tomas_stein_ratio(ctx.grid, np.ones(len(ctx.grid)), f, c.grid3d)


def evaluate(config: SearchConfig, f: TestFunction) -> RatioReport:
    """The objective report of ``config`` on ``f``, as computed during the search."""
    return _report(_Context.build(config), f)


def _score(report: RatioReport) -> float:
    return 0.0 if report.ratio is None else report.ratio


# --- parameterisation ---------------------------------------------------------------

def _encode(f: TestFunction) -> np.ndarray:
    cols = [f.coeffs.real[:, None], f.coeffs.imag[:, None], f.centers,
            np.log(f.scales)[:, None], f.modulations]
    return np.concatenate(cols, axis=1).ravel()


def _project(p: np.ndarray, bounds: FamilyBounds) -> np.ndarray:
    q = p.reshape(-1, _PER_TERM).copy()
    q[:, 0:2] = np.clip(q[:, 0:2], -1.0, 1.0)
    q[:, 2:5] = np.clip(q[:, 2:5], *bounds.center)
    q[:, 5] = np.clip(q[:, 5], math.log(bounds.scale[0]), math.log(bounds.scale[1]))
    m = q[:, 6:9]
    norm = np.linalg.norm(m, axis=1)
    lo, hi = bounds.modulation
    target = np.clip(norm, lo, hi)
    zero = norm == 0
    if lo > 0 and np.any(zero):
        m[zero] = [0.0, 0.0, 1.0]
        norm = np.where(zero, 1.0, norm)
    with np.errstate(invalid="ignore", divide="ignore"):
        q[:, 6:9] = np.where(norm[:, None] > 0, m * (target / norm)[:, None], m)
    return q.ravel()


def _decode(p: np.ndarray) -> TestFunction:
    q = p.reshape(-1, _PER_TERM)
    return TestFunction(q[:, 0] + 1j * q[:, 1], q[:, 2:5], np.exp(q[:, 5]), q[:, 6:9])


def _initial(bounds: FamilyBounds) -> np.ndarray:
    scale = min(max(1.0, bounds.scale[0]), bounds.scale[1])
    center = [min(max(0.0, bounds.center[0]), bounds.center[1])] * 3
    f = TestFunction.gaussian(1.0, center, scale, (0.0, 0.0, 0.0))
    return _project(_encode(f), bounds)


def _random_candidate(rng: np.random.Generator, bounds: FamilyBounds) -> np.ndarray:
    k = int(rng.integers(bounds.terms[0], bounds.terms[1] + 1))
    q = np.empty((k, _PER_TERM))
    phase = rng.uniform(0.0, 2.0 * math.pi, k)
    amp = rng.uniform(0.2, 1.0, k)
    q[:, 0], q[:, 1] = amp * np.cos(phase), amp * np.sin(phase)
    q[:, 2:5] = rng.uniform(*bounds.center, size=(k, 3))
    q[:, 5] = rng.uniform(math.log(bounds.scale[0]), math.log(bounds.scale[1]), k)
    d = rng.normal(size=(k, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    q[:, 6:9] = d * rng.uniform(*bounds.modulation, size=k)[:, None]
    return _project(q.ravel(), bounds)


# --- climbing ------------------------------------------------------------------------

def _climb(ctx: _Context, seq: np.random.SeedSequence, n_evals: int, start=None,
           start_score: float | None = None) -> list:
    """Run one climber for ``n_evals`` evaluations; returns ``(ratio, params)`` pairs.

    Without ``start`` the climber begins at a random family member, which is its
    first evaluation.  With ``start`` and its known score, every evaluation is a move.
    """
    cfg = ctx.config
    rng = np.random.default_rng(seq)
    out = []
    if n_evals == 0:
        return out
    if start is None:
        p = _random_candidate(rng, cfg.family_bounds)
        current = _score(_report(ctx, _decode(p)))
        out.append((current, p))
    else:
        p, current = start, start_score
    steps = np.full(p.size, cfg.initial_step)
    move = 0
    while len(out) < n_evals:
        j = move % p.size
        move += 1
        trial = p.copy()
        trial[j] += steps[j] * rng.normal()
        trial = _project(trial, cfg.family_bounds)
        score = _score(_report(ctx, _decode(trial)))
        out.append((score, trial))
        if score >= current:
            p, current = trial, score
            steps[j] = min(steps[j] * 1.5, 4.0 * cfg.initial_step)
        else:
            steps[j] = max(steps[j] * 0.7, 1e-3 * cfg.initial_step)
    return out


def _segments(budget: int, restarts: int) -> list:
    base, extra = divmod(budget, restarts)
    return [base + (1 if k < extra else 0) for k in range(restarts)]


def _normalise(ctx: _Context, f: TestFunction) -> TestFunction:
    norm = lp_norm(f, _rhs_exponent(ctx.config.objective), ctx.config.grid3d)
    return f.scaled(1.0 / norm) if norm > 0 else f


def optimize_ratio(config: SearchConfig) -> SearchTrace:
    """Random-restart coordinate hill climbing; deterministic given ``config.seed``.

    The trace has ``budget + 1`` entries: the initial unmodulated Gaussian and
    one per evaluation.
    """
    ctx = _Context.build(config)
    p0 = _initial(config.family_bounds)
    results = [(_score(_report(ctx, _decode(p0))), p0)]
    seqs = np.random.SeedSequence(config.seed).spawn(config.restarts)
    lengths = _segments(config.budget, config.restarts)

    def run(k):
        if k == 0:
            return _climb(ctx, seqs[0], lengths[0], p0, results[0][0])
        return _climb(ctx, seqs[k], lengths[k])

    for part in ordered_map(run, range(config.restarts)):
        results.extend(part)
    ratios = tuple(float(r) for r, _ in results)
    incumbent = tuple(float(v) for v in np.maximum.accumulate(ratios))
    best_index = int(np.argmax(ratios))
    best = _normalise(ctx, _decode(results[best_index][1]))
    return SearchTrace(ratios, incumbent, best_index, best, _report(ctx, best), config)

"""Variation seminorms and norms of finitely sampled curves and surfaces.

For a curve ``a`` sampled at increasing parameters the rho-variation seminorm is

    sup over i_0 < ... < i_m of (sum_j |a[i_j] - a[i_{j-1}]|^rho)^(1/rho),

and the norm adds ``|a[i_0]|^rho`` inside the bracket.  Both suprema are exact
over the supplied samples; they are lower bounds for the continuum quantity.

The biparameter seminorm of a sampled surface ``b`` replaces the increments by
rectangular second differences over a pair of subsequences.

Witnesses are chosen as the lexicographically smallest index tuple attaining
the maximum (a proper prefix counts as smaller), so results are deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapError, DomainError

__all__ = [
    "SampledCurve",
    "SampledSurface",
    "VariationResult",
    "var_seminorm",
    "var_norm",
    "var_oracle_exhaustive",
    "variation_batch",
    "exhaustive_variation_batch",
    "bivar_seminorm",
    "bivar_objective",
    "chain_objective",
]

#: Curves longer than this are refused by the exhaustive oracle.
EXHAUSTIVE_MAX_LENGTH = 20
#: Default cap on ``len(eps_params) * len(eta_params)`` for exact biparameter search.
BIVAR_EXACT_CAP = 144
#: Above this exponent powers are formed in log space after normalisation.
LOG_POWER_THRESHOLD = 64.0
# relative slack used to recognise ties between candidate chains
_TIE_RTOL = 1e-13


def _as_complex_array(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind not in "biufc":
        raise DomainError("values must be numeric")
    return arr.astype(complex)


def _check_params(params: np.ndarray, name: str) -> None:
    if params.ndim != 1 or params.size == 0:
        raise DomainError(f"{name} must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(params)) or np.any(params <= 0):
        raise DomainError(f"{name} must be finite and strictly positive")
    if np.any(np.diff(params) <= 0):
        raise DomainError(f"{name} must be strictly increasing")


def _complex_pairs(values: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in values]


def _parse_complex(item) -> complex:
    if isinstance(item, (list, tuple)):
        if len(item) != 2:
            raise DomainError(f"complex values are [re, im] pairs, got {item!r}")
        return complex(float(item[0]), float(item[1]))
    return complex(float(item))


@dataclass(frozen=True)
class SampledCurve:
    """Samples ``a(eps_k)`` of a complex curve at strictly increasing ``eps_k > 0``."""

    params: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        values = _as_complex_array(self.values)
        _check_params(params, "params")
        if values.shape != params.shape:
            raise DomainError("params and values must have equal length")
        params.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.params.size

    @classmethod
    def from_values(cls, values, params=None) -> "SampledCurve":
        """Curve with parameters ``1, 2, ..., n`` unless given explicitly."""
        values = np.atleast_1d(values)
        if params is None:
            params = np.arange(1, values.size + 1, dtype=float)
        return cls(params, values)

    def to_dict(self) -> dict:
        return {"params": [float(p) for p in self.params], "values": _complex_pairs(self.values)}

    @classmethod
    def from_dict(cls, data: dict) -> "SampledCurve":
        unknown = set(data) - {"params", "values"}
        if unknown:
            raise DomainError(f"unknown curve keys: {sorted(unknown)}")
        return cls(np.asarray(data["params"], dtype=float),
                   np.array([_parse_complex(v) for v in data["values"]], dtype=complex))


@dataclass(frozen=True)
class SampledSurface:
    """Samples ``b(eps_j, eta_k)`` on a product of two increasing parameter sets."""

    eps_params: np.ndarray
    eta_params: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        eps = np.asarray(self.eps_params, dtype=float)
        eta = np.asarray(self.eta_params, dtype=float)
        values = _as_complex_array(self.values)
        _check_params(eps, "eps_params")
        _check_params(eta, "eta_params")
        if values.shape != (eps.size, eta.size):
            raise DomainError(f"values must have shape {(eps.size, eta.size)}, got {values.shape}")
        for arr in (eps, eta, values):
            arr.setflags(write=False)
        object.__setattr__(self, "eps_params", eps)
        object.__setattr__(self, "eta_params", eta)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @classmethod
    def from_values(cls, values) -> "SampledSurface":
        values = np.atleast_2d(values)
        n, m = values.shape
        return cls(np.arange(1, n + 1, dtype=float), np.arange(1, m + 1, dtype=float), values)

    def to_dict(self) -> dict:
        return {
            "eps_params": [float(p) for p in self.eps_params],
            "eta_params": [float(p) for p in self.eta_params],
            "values": [_complex_pairs(row) for row in self.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SampledSurface":
        unknown = set(data) - {"eps_params", "eta_params", "values"}
        if unknown:
            raise DomainError(f"unknown surface keys: {sorted(unknown)}")
        rows = [[_parse_complex(v) for v in row] for row in data["values"]]
        return cls(np.asarray(data["eps_params"], dtype=float),
                   np.asarray(data["eta_params"], dtype=float),
                   np.array(rows, dtype=complex).reshape(len(rows), -1))


@dataclass(frozen=True)
class VariationResult:
    """Value of a variation functional and the index chain attaining it.

    For curves ``witness`` is a tuple of sample indices; for surfaces it is a
    pair ``(eps_indices, eta_indices)``.
    """

    value: float
    witness: tuple

    def to_dict(self) -> dict:
        if self.witness and isinstance(self.witness[0], tuple):
            witness = [list(w) for w in self.witness]
        else:
            witness = list(self.witness)
        return {"value": self.value, "witness": witness}


# ---------------------------------------------------------------------------
# one-parameter variation


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if math.isnan(rho) or rho < 1:
        raise DomainError(f"rho must lie in [1, inf], got {rho}")
    return rho


def _pair_scale(values: np.ndarray) -> np.ndarray:
    """Per-row largest absolute difference between any two samples."""
    n = values.shape[-1]
    scale = np.zeros(values.shape[:-1])
    for k in range(n - 1):
        scale = np.maximum(scale, np.abs(values[..., k + 1:] - values[..., k:k + 1]).max(axis=-1))
    return scale


def _powers(d: np.ndarray, rho: float, scale) -> np.ndarray:
    if rho <= LOG_POWER_THRESHOLD:
        return d ** rho
    with np.errstate(divide="ignore"):
        logs = np.log(d / scale)
    return np.exp(rho * logs)


def _suffix_table(values: np.ndarray, rho: float, scale) -> np.ndarray:
    """best[..., k] = max over chains starting at k of the sum of |increment|^rho."""
    n = values.shape[-1]
    # sample index first, so every slice below is contiguous
    v = np.ascontiguousarray(np.moveaxis(values, -1, 0))
    best = np.zeros(v.shape, dtype=float)
    s = scale if np.ndim(scale) == 0 else np.asarray(scale)[None]
    for k in range(n - 2, -1, -1):
        cand = _powers(np.abs(v[k + 1:] - v[k]), rho, s)
        cand += best[k + 1:]
        best[k] = np.maximum(cand.max(axis=0), 0.0)
    return np.moveaxis(best, 0, -1)


def _first_within(arr: np.ndarray, target: float, tol: float) -> int:
    return int(np.flatnonzero(arr >= target - tol)[0])


def _trace_chain(values, rho, scale, best, start, total) -> tuple[int, ...]:
    tol = _TIE_RTOL * max(total, np.finfo(float).tiny)
    chain = [start]
    k = start
    while best[k] > tol:
        cand = _powers(np.abs(values[k + 1:] - values[k]), rho, scale) + best[k + 1:]
        k = k + 1 + _first_within(cand, best[k], tol)
        chain.append(k)
    return tuple(chain)


def _sup_mode(values: np.ndarray, with_first_term: bool) -> VariationResult:
    # rho = inf: largest single increment, optionally against the largest |a_k|
    n = values.size
    cands = []
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(values[j] - values[i])
            if d > best:
                best, cands = d, [(i, j)]
            elif d == best and d > 0:
                cands.append((i, j))
    if with_first_term:
        mags = np.abs(values)
        top = float(mags.max())
        if top > best:
            best, cands = top, []
        if top == best:
            cands += [(int(k),) for k in np.flatnonzero(mags == top)]
    if not cands:
        cands = [(0,)]
    return VariationResult(float(best), min(cands))


def _total_variation(values: np.ndarray, with_first_term: bool) -> VariationResult:
    # rho = 1: by the triangle inequality the full chain is optimal
    steps = np.abs(np.diff(values))
    value = float(np.sum(steps))
    if with_first_term:
        value = float(abs(values[0])) + value
    changed = np.flatnonzero(steps != 0)
    last = int(changed[-1]) + 1 if changed.size else 0
    return VariationResult(value, tuple(range(last + 1)))


def _variation(curve: SampledCurve, rho: float, with_first_term: bool) -> VariationResult:
    if not isinstance(curve, SampledCurve):
        curve = SampledCurve.from_values(curve)
    rho = _check_rho(rho)
    values = curve.values
    if math.isinf(rho):
        return _sup_mode(values, with_first_term)
    if rho == 1.0:
        return _total_variation(values, with_first_term)
    scale = 1.0
    if rho > LOG_POWER_THRESHOLD:
        scale = float(max(_pair_scale(values), np.abs(values).max() if with_first_term else 0.0))
        if scale == 0.0:
            return VariationResult(0.0, (0,))
    best = _suffix_table(values, rho, scale)
    score = best + _powers(np.abs(values), rho, scale) if with_first_term else best
    total = float(score.max())
    start = _first_within(score, total, _TIE_RTOL * max(total, np.finfo(float).tiny))
    witness = _trace_chain(values, rho, scale, best, start, total)
    return VariationResult(scale * total ** (1.0 / rho), witness)


def var_seminorm(curve: SampledCurve, rho: float) -> VariationResult:
    """Exact rho-variation seminorm over the samples of ``curve``.

    Dynamic programming over the last chosen index, O(n^2).  ``rho`` may be
    ``math.inf``, in which case the result is the largest difference between
    any two samples.

    Examples
    --------
    >>> var_seminorm(SampledCurve.from_values([0, 1, 0, 1]), 2).value  # doctest: +ELLIPSIS
    1.7320508...
    """
    return _variation(curve, rho, with_first_term=False)


def var_norm(curve: SampledCurve, rho: float) -> VariationResult:
    """Exact rho-variation norm: the seminorm with ``|a(eps_0)|^rho`` added.

    A single sample is an admissible chain, so the norm never drops below
    ``max_k |a_k|``.
    """
    return _variation(curve, rho, with_first_term=True)


def chain_objective(values, chain: Sequence[int], rho: float, with_first_term: bool) -> float:
    """Evaluate the variation sum on one explicit chain of indices."""
    values = np.asarray(values, dtype=complex)
    sel = values[list(chain)]
    d = np.abs(np.diff(sel))
    if math.isinf(rho):
        parts = list(d) + ([abs(sel[0])] if with_first_term else [])
        return float(max(parts, default=0.0))
    total = float(np.sum(d ** rho))
    if with_first_term:
        total += float(abs(sel[0]) ** rho)
    return total ** (1.0 / rho)


def variation_batch(values, rho: float, with_first_term: bool) -> np.ndarray:
    """Variation values of many curves at once, no witnesses.

    ``values`` has shape ``(..., n)``; each trailing row is one curve sampled at
    the same increasing parameters.  Agrees with :func:`var_seminorm` /
    :func:`var_norm` row by row.
    """
    values = np.asarray(values, dtype=complex)
    if values.ndim == 0 or values.shape[-1] == 0:
        raise DomainError("empty curve")
    rho = _check_rho(rho)
    if math.isinf(rho):
        out = _pair_scale(values)
        if with_first_term:
            out = np.maximum(out, np.abs(values).max(axis=-1))
        return out
    if rho == 1.0:
        out = np.sum(np.abs(np.diff(values, axis=-1)), axis=-1)
        return out + np.abs(values[..., 0]) if with_first_term else out
    scale = 1.0
    if rho > LOG_POWER_THRESHOLD:
        scale = _pair_scale(values)
        if with_first_term:
            scale = np.maximum(scale, np.abs(values).max(axis=-1))
        scale = np.where(scale > 0, scale, 1.0)
    best = _suffix_table(values, rho, scale)
    if with_first_term:
        s = scale if np.ndim(scale) == 0 else scale[..., None]
        best = best + _powers(np.abs(values), rho, s)
    return scale * best.max(axis=-1) ** (1.0 / rho)


def exhaustive_variation_batch(values, rho: float, with_first_term: bool) -> np.ndarray:
    """Brute-force variation over every nonempty index subset, for many curves.

    Independent of the dynamic programme: subsets are visited depth first and
    each subset's sum is obtained from its parent by one extra increment.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[-1]
    if n == 0:
        raise DomainError("empty curve")
    if n > EXHAUSTIVE_MAX_LENGTH:
        raise CapError(f"exhaustive oracle is capped at length {EXHAUSTIVE_MAX_LENGTH}, got {n}")
    rho = _check_rho(rho)
    sup = math.isinf(rho)
    combine = np.maximum if sup else np.add
    pair = {}
    for i in range(n):
        for j in range(i + 1, n):
            d = np.abs(values[..., j] - values[..., i])
            pair[i, j] = d if sup else d ** rho

    best = np.zeros(values.shape[:-1])

    def extend(last, acc):
        nonlocal best
        best = np.maximum(best, acc)
        for j in range(last + 1, n):
            extend(j, combine(acc, pair[last, j]))

    for i in range(n):
        if with_first_term:
            a0 = np.abs(values[..., i])
            start = a0 if sup else a0 ** rho
        else:
            start = np.zeros(values.shape[:-1])
        extend(i, start)
    return best if sup else best ** (1.0 / rho)


def var_oracle_exhaustive(curve: SampledCurve, rho: float, with_first_term: bool) -> float:
    """Reference value by enumeration of all ``2^n - 1`` index subsets (n <= 20)."""
    if not isinstance(curve, SampledCurve):
        curve = SampledCurve.from_values(curve)
    return float(exhaustive_variation_batch(curve.values[None, :], rho, with_first_term)[0])


# ---------------------------------------------------------------------------
# biparameter variation


def _rect_powers(b: np.ndarray, rho: float) -> np.ndarray:
    """P[i, i2, p, q] = |b[i2,q] - b[i2,p] - b[i,q] + b[i,p]|^rho for i < i2, p < q, else 0."""
    n, m = b.shape
    d = (b[None, :, None, :] - b[None, :, :, None] - b[:, None, None, :] + b[:, None, :, None])
    mask = (np.triu(np.ones((n, n), bool), 1)[:, :, None, None]
            & np.triu(np.ones((m, m), bool), 1)[None, None, :, :])
    mag = np.abs(d)
    out = mag if math.isinf(rho) else mag ** rho
    return np.where(mask, out, 0.0)


def bivar_objective(values, eps_chain, eta_chain, rho: float) -> float:
    """Double sum of |rectangular second differences|^rho on explicit chains, to the 1/rho."""
    b = np.asarray(values, dtype=complex)[np.ix_(list(eps_chain), list(eta_chain))]
    d = np.abs(b[1:, 1:] - b[1:, :-1] - b[:-1, 1:] + b[:-1, :-1])
    if d.size == 0:
        return 0.0
    if math.isinf(rho):
        return float(d.max())
    return float(np.sum(d ** rho)) ** (1.0 / rho)


def _chain_dp(cost: np.ndarray) -> np.ndarray:
    """Best chain under pair costs ``cost[..., p, q]`` (p < q); batched over leading axes."""
    m = cost.shape[-1]
    best = np.zeros(cost.shape[:-1])
    for p in range(m - 2, -1, -1):
        cand = cost[..., p, p + 1:] + best[..., p + 1:]
        best[..., p] = np.maximum(cand.max(axis=-1), 0.0)
    return best


def _chain_trace(cost: np.ndarray, best: np.ndarray, total: float) -> tuple[int, ...]:
    tol = _TIE_RTOL * max(total, np.finfo(float).tiny)
    k = _first_within(best, total, tol)
    chain = [k]
    while best[k] > tol:
        cand = cost[k, k + 1:] + best[k + 1:]
        k = k + 1 + _first_within(cand, best[k], tol)
        chain.append(k)
    return tuple(chain)


def _all_chains(n: int) -> list[tuple[int, ...]]:
    """Every index chain of length >= 2, parents listed before children."""
    out = []

    def extend(chain):
        for j in range(chain[-1] + 1, n):
            new = chain + (j,)
            out.append(new)
            extend(new)

    for i in range(n):
        extend((i,))
    return out


def _bivar_sup(b: np.ndarray) -> VariationResult:
    P = _rect_powers(b, math.inf)
    top = float(P.max())
    if top == 0.0:
        return VariationResult(0.0, ((0,), (0,)))
    i, i2, p, q = (int(v) for v in np.argwhere(P == top)[0])
    return VariationResult(top, ((i, i2), (p, q)))


def _bivar_exact(b: np.ndarray, rho: float) -> VariationResult:
    n, m = b.shape
    swap = n > m
    if swap:
        b = b.T
        n, m = m, n
    P = _rect_powers(b, rho)
    chains = _all_chains(n)
    costs = np.empty((len(chains), m, m))
    index = {}
    for idx, chain in enumerate(chains):
        step = P[chain[-2], chain[-1]]
        costs[idx] = step if len(chain) == 2 else costs[index[chain[:-1]]] + step
        index[chain] = idx
    best = _chain_dp(costs)
    per_chain = best.max(axis=-1)
    total = float(per_chain.max())
    tol = _TIE_RTOL * max(total, np.finfo(float).tiny)
    if total <= tol:
        return VariationResult(0.0, ((0,), (0,)))
    winner = min(chains[i] for i in np.flatnonzero(per_chain >= total - tol))
    w = index[winner]
    other = _chain_trace(costs[w], best[w], total)
    witness = (other, winner) if swap else (winner, other)
    return VariationResult(float(total ** (1.0 / rho)), witness)


def _bivar_greedy(b: np.ndarray, rho: float, max_rounds: int = 50) -> VariationResult:
    # block coordinate ascent from the full grid: re-optimise one chain exactly given the other
    P = _rect_powers(b, rho)
    n, m = b.shape
    eps_chain = tuple(range(n))
    eta_chain = tuple(range(m))
    current = bivar_objective(b, eps_chain, eta_chain, rho) ** rho
    for _ in range(max_rounds):
        improved = False
        for axis in ("eta", "eps"):
            if axis == "eta":
                cost = sum(P[i, j] for i, j in zip(eps_chain[:-1], eps_chain[1:]))
            else:
                cost = sum(P[:, :, p, q] for p, q in zip(eta_chain[:-1], eta_chain[1:]))
            best = _chain_dp(cost)
            value = float(best.max())
            if value > current * (1 + 1e-12):
                chain = _chain_trace(cost, best, value)
                if axis == "eta":
                    eta_chain = chain
                else:
                    eps_chain = chain
                current = bivar_objective(b, eps_chain, eta_chain, rho) ** rho
                improved = True
        if not improved:
            break
    return VariationResult(float(current ** (1.0 / rho)), (eps_chain, eta_chain))


def bivar_seminorm(surface: SampledSurface, rho: float, mode: str = "exact",
                   cap: int = BIVAR_EXACT_CAP) -> VariationResult:
    """Biparameter rho-variation seminorm of a sampled surface.

    Parameters
    ----------
    surface : SampledSurface
    rho : float
        Exponent in ``[1, inf]``.
    mode : {"exact", "greedy"}
        ``"exact"`` enumerates every chain along the shorter axis and solves the
        other axis by dynamic programming, which is equivalent to exhaustive search
        over both chains.  ``"greedy"`` returns a certified lower bound from block
        coordinate ascent started at the full index grid.
    cap : int
        Largest ``n_eps * n_eta`` accepted in exact mode.

    Returns
    -------
    VariationResult
        ``witness`` is ``(eps_indices, eta_indices)``.
    """
    if not isinstance(surface, SampledSurface):
        surface = SampledSurface.from_values(surface)
    rho = _check_rho(rho)
    b = surface.values
    n, m = b.shape
    if n < 2 or m < 2:
        return VariationResult(0.0, ((0,), (0,)))
    if mode not in ("exact", "greedy"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "exact" and n * m > cap:
        raise CapError(f"exact biparameter variation is capped at {cap} samples, got {n}x{m}")
    if math.isinf(rho):
        return _bivar_sup(b)
    if mode == "exact":
        return _bivar_exact(b, rho)
    return _bivar_greedy(b, rho)

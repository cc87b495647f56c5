"""Relative representation varieties and their trace coordinates.

A representation assigns one group element to each free generator of a
surface group; the relative variety fixes the boundary traces to a target
vector b.  Sampling uses the product Haar measure conditioned to the
boundary fiber: generators that are themselves boundary curves (the single
letters A_{2g+i}, i < n) are drawn directly from the conjugacy class with
the prescribed trace, and the remaining constraint, the trace of the derived
last boundary word, is enforced by rejection within a window of half-width
epsilon.  Points of the character variety are recorded through the
coordinates f_I, the traces of the ascending products A_I with |I| <= 3.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from . import _batch
from .su2 import GroupElement, TANGENT_BASIS, exp_tangent, trace
from .words import IndexSet, SurfacePresentation, Word, curve_word, evaluate, index_sets

__all__ = [
    "DEFAULT_EPSILON",
    "DEFAULT_BUDGET",
    "BoundaryCondition",
    "CharacterPoint",
    "FiberEmptyOrThin",
    "Representation",
    "SamplerStats",
    "SurfaceMismatch",
    "character_distance",
    "coordinate_names",
    "sample_representation",
    "sample_representations",
    "sample_fiber_coordinates",
    "tangent_rank",
    "trace_coordinates",
    "write_character_csv",
]

DEFAULT_EPSILON = 1e-2
DEFAULT_BUDGET = 10**6
_SAMPLE_BATCH = 8192
# fp headroom over epsilon when revalidating representations that have been
# pushed through long twist sequences
_FIBER_SLACK = 1e-9


class FiberEmptyOrThin(RuntimeError):
    """No acceptance within the proposal budget: empty fiber or epsilon too small."""


class SurfaceMismatch(ValueError):
    """Character points over different surfaces cannot be compared."""


@dataclass(frozen=True)
class BoundaryCondition:
    """Target boundary traces, one value in [-2, 2] per boundary circle."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("need at least one boundary value")
        for v in self.values:
            if not -2.0 <= v <= 2.0:
                raise ValueError(f"boundary trace {v} outside [-2, 2]")

    @staticmethod
    def of(values: Iterable[float]) -> "BoundaryCondition":
        return BoundaryCondition(tuple(float(v) for v in values))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Representation:
    """Tuple of group elements indexed by the surface generators.

    When tagged with a boundary condition the fiber invariant
    |tr(rho(boundary_i)) - b_i| <= epsilon is checked at construction.
    """

    surface: SurfacePresentation
    values: tuple[GroupElement, ...]
    boundary: BoundaryCondition | None = None
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if len(self.values) != self.surface.rank:
            raise ValueError(
                f"expected {self.surface.rank} values, got {len(self.values)}"
            )
        if self.boundary is not None:
            if len(self.boundary) != self.surface.boundary_count:
                raise ValueError("boundary condition has wrong length")
            for w, b in zip(self.surface.boundary_words, self.boundary.values):
                t = trace(evaluate(w, self.values))
                if abs(t - b) > self.epsilon + _FIBER_SLACK:
                    raise ValueError(
                        f"boundary trace {t} misses target {b} by more than {self.epsilon}"
                    )

    def boundary_traces(self) -> tuple[float, ...]:
        return tuple(trace(evaluate(w, self.values)) for w in self.surface.boundary_words)

    def with_values(self, values: Sequence[GroupElement]) -> "Representation":
        return Representation(self.surface, tuple(values), self.boundary, self.epsilon)


@dataclass(frozen=True)
class CharacterPoint:
    """Point of the character variety, given by all generating trace coordinates."""

    coords: dict[IndexSet, float]

    def as_array(self) -> np.ndarray:
        return np.array(list(self.coords.values()))

    def __getitem__(self, index_set: Sequence[int]) -> float:
        return self.coords[tuple(index_set)]


@dataclass
class SamplerStats:
    """Proposal counting for the rejection sampler; merge by addition."""

    proposals: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0

    def merge(self, other: "SamplerStats") -> None:
        self.proposals += other.proposals
        self.accepted += other.accepted


def trace_coordinates(rho: Representation) -> CharacterPoint:
    """All f_I = tr(rho(A_I)) for the surface's index sets."""
    coords = {
        I: trace(evaluate(curve_word(I), rho.values))
        for I in index_sets(rho.surface.rank)
    }
    return CharacterPoint(coords)


def character_distance(p: CharacterPoint, q: CharacterPoint) -> float:
    """Sup distance of trace coordinates; equal coordinates mean equal characters."""
    if p.coords.keys() != q.coords.keys():
        raise SurfaceMismatch("character points have different coordinate sets")
    return max(abs(p.coords[k] - q.coords[k]) for k in p.coords)


# ---------------------------------------------------------------------------
# sampling


def _pinned_indices(pres: SurfacePresentation) -> list[int]:
    """Generator slots (0-based) that are single-letter boundary curves."""
    return [2 * pres.genus + i for i in range(pres.boundary_count - 1)]


def _draw_value_batch(
    pres: SurfacePresentation,
    b: BoundaryCondition,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    values = np.empty((pres.rank, count, 4))
    pinned = set(_pinned_indices(pres))
    for k in range(pres.rank):
        if k in pinned:
            values[k] = _batch.class_batch(rng, b.values[k - 2 * pres.genus], count)
        else:
            values[k] = _batch.haar_batch(rng, count)
    return values


def _sample_value_arrays(
    pres: SurfacePresentation,
    b: BoundaryCondition,
    eps: float,
    rng: np.random.Generator,
    count: int,
    budget: int,
    stats: SamplerStats | None,
) -> np.ndarray:
    """(count, rank, 4) accepted fiber draws; raises FiberEmptyOrThin on a dry budget."""
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    tail_word = pres.boundary_words[-1].letters
    tail_target = b.values[-1]
    out = np.empty((count, pres.rank, 4))
    got = 0
    since_accept = 0
    local = SamplerStats()
    while got < count:
        batch = min(_SAMPLE_BATCH, max(256, 4 * (count - got)))
        values = _draw_value_batch(pres, b, rng, batch)
        tail = _batch.word_trace(tail_word, values)
        mask = np.abs(tail - tail_target) <= eps
        hits = int(mask.sum())
        local.proposals += batch
        local.accepted += hits
        if hits == 0:
            since_accept += batch
            if since_accept > budget:
                if stats is not None:
                    stats.merge(local)
                raise FiberEmptyOrThin(
                    f"no acceptance in {since_accept} proposals "
                    f"(surface {pres.key()}, b={b.values}, eps={eps})"
                )
            continue
        since_accept = 0
        take = min(hits, count - got)
        accepted = values[:, mask, :][:, :take, :]
        out[got : got + take] = np.swapaxes(accepted, 0, 1)
        got += take
    if stats is not None:
        stats.merge(local)
    return out


def _array_to_representation(
    pres: SurfacePresentation,
    b: BoundaryCondition,
    eps: float,
    row: np.ndarray,
) -> Representation:
    vals = tuple(GroupElement(*map(float, q)) for q in row)
    return Representation(pres, vals, b, eps)


def sample_representation(
    pres: SurfacePresentation,
    b: BoundaryCondition,
    eps: float = DEFAULT_EPSILON,
    rng: np.random.Generator | None = None,
    budget: int = DEFAULT_BUDGET,
    stats: SamplerStats | None = None,
) -> Representation:
    """One draw from conditioned Haar measure on the boundary fiber."""
    if rng is None:
        raise ValueError("pass a seeded random generator")
    row = _sample_value_arrays(pres, b, eps, rng, 1, budget, stats)[0]
    return _array_to_representation(pres, b, eps, row)


def sample_representations(
    pres: SurfacePresentation,
    b: BoundaryCondition,
    eps: float,
    rng: np.random.Generator,
    count: int,
    budget: int = DEFAULT_BUDGET,
    stats: SamplerStats | None = None,
) -> list[Representation]:
    rows = _sample_value_arrays(pres, b, eps, rng, count, budget, stats)
    return [_array_to_representation(pres, b, eps, row) for row in rows]


def sample_fiber_coordinates(
    pres: SurfacePresentation,
    b: BoundaryCondition,
    eps: float,
    rng: np.random.Generator,
    count: int,
    budget: int = DEFAULT_BUDGET,
    stats: SamplerStats | None = None,
) -> np.ndarray:
    """(count, n_coords) array of trace coordinates of fresh fiber samples."""
    rows = _sample_value_arrays(pres, b, eps, rng, count, budget, stats)
    values = np.swapaxes(rows, 0, 1)  # (rank, count, 4)
    cols = [
        _batch.word_trace(curve_word(I).letters, values)
        for I in index_sets(pres.rank)
    ]
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# infinitesimal transitivity


def tangent_rank(
    rho: Representation,
    b: BoundaryCondition | None = None,
    h: float = 1e-5,
    rel_threshold: float = 1e-7,
) -> int:
    """Rank of the trace-coordinate differentials on the boundary-fixing tangent space.

    Directions are rho(A_k) -> rho(A_k) * exp(h * u) over the 3N basis
    directions u; derivatives are central finite differences.  The boundary
    trace differentials cut the tangent space down first; conjugation
    directions lie in the kernel of every coordinate differential, so the
    returned rank is the rank modulo conjugation.  Full rank at a smooth
    point equals dim of the character variety, 6g - 6 + 2n.
    """
    pres = rho.surface
    n_gen = pres.rank
    sets = index_sets(n_gen)
    words = [curve_word(I) for I in sets]
    bwords = list(pres.boundary_words)

    def coords_at(values: Sequence[GroupElement], wordlist: list[Word]) -> np.ndarray:
        return np.array([trace(evaluate(w, values)) for w in wordlist])

    n_dirs = 3 * n_gen
    F = np.empty((len(words), n_dirs))
    B = np.empty((len(bwords), n_dirs))
    col = 0
    base = list(rho.values)
    for k in range(n_gen):
        for u in TANGENT_BASIS:
            step = exp_tangent(u.scaled(h))
            plus = list(base)
            plus[k] = base[k] * step
            minus = list(base)
            minus[k] = base[k] * step.inverse()
            F[:, col] = (coords_at(plus, words) - coords_at(minus, words)) / (2 * h)
            B[:, col] = (coords_at(plus, bwords) - coords_at(minus, bwords)) / (2 * h)
            col += 1

    # restrict to the null space of the boundary differentials
    _, s, vt = np.linalg.svd(B)
    if s.size and s[0] > 0:
        rank_b = int(np.sum(s > s[0] * 1e-10))
    else:
        rank_b = 0
    kernel = vt[rank_b:].T  # (3N, 3N - rank_b)
    restricted = F @ kernel
    sv = np.linalg.svd(restricted, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > sv[0] * rel_threshold))


# ---------------------------------------------------------------------------
# CSV emission


def coordinate_names(sets: Sequence[IndexSet]) -> list[str]:
    def name(I: IndexSet) -> str:
        sep = "" if I[-1] <= 9 else "_"
        return "f" + sep.join(str(i) for i in I)

    return [name(I) for I in sets]


def write_character_csv(
    dest: TextIO | str,
    samples: np.ndarray,
    sets: Sequence[IndexSet],
    preamble: Mapping[str, object] | None = None,
) -> None:
    """Write a coordinate stream: '#' preamble lines, then a plain CSV table.

    Header is ``sample,f1,f2,...``; values carry 17 significant digits and
    lines end with a bare linefeed.  The preamble embeds the provenance
    (config echo, seed) as ``# key = value`` lines.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != len(sets):
        raise ValueError("samples must be (count, n_coordinates)")
    own = isinstance(dest, str)
    fh: TextIO = open(dest, "w", newline="") if own else dest
    try:
        for key, val in (preamble or {}).items():
            fh.write(f"# {key} = {val}\n")
        fh.write("sample," + ",".join(coordinate_names(sets)) + "\n")
        for i, row in enumerate(samples):
            fh.write(str(i) + "," + ",".join(f"{v:.17g}" for v in row) + "\n")
    finally:
        if own:
            fh.close()


def character_csv_text(
    samples: np.ndarray,
    sets: Sequence[IndexSet],
    preamble: Mapping[str, object] | None = None,
) -> str:
    buf = io.StringIO()
    write_character_csv(buf, samples, sets, preamble)
    return buf.getvalue()

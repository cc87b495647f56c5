"""Rewrite engine expressing the trace of any word as an integer polynomial in
the generating trace coordinates f_I, |I| <= 3.

Everything rests on three facts about 2x2 unimodular matrices:

    tr(uv) + tr(uv^-1) = tr(u) tr(v)          (product rule)
    tr(u^-1) = tr(u),  tr(uv) = tr(vu)        (inversion, cyclicity)
    vu = tr(u) v + tr(v) u + (tr(uv) - tr(u)tr(v)) I - uv   (swap rule,
                                               polarized Cayley-Hamilton)

The engine works on cyclic words and applies, in priority order:

  repeat   tr(xUxV) = tr(xU) tr(xV) - tr(U V^-1)      when a signed letter
           repeats; every produced word is strictly shorter.
  unmix    tr(X a^-1) = tr(a) tr(X) - tr(X a)         when an inverse letter
           remains; length drops or the inverse count drops.
  sort     the swap rule on the first out-of-order adjacent pair of an
           all-positive word; the only equal-length term has one fewer
           inversion, so sorting terminates at the ascending word.

Ascending words of 1..3 distinct letters are the coordinate variables f_I.
An ascending word of length m >= 4 is eliminated by splitting off a prefix P
of size k <= 3 via tr(PQ) = tr(P) tr(Q) - tr(P Q^-1) and re-reducing the
right side with the ascending class itself treated as an unknown X; the
unknown reappears linearly with coefficient -1, giving 2X = (known
polynomial).  Over alphabets of size <= 3 an ascending word never exceeds
length 3, so that division never happens and every coefficient is an
integer.  For larger alphabets the halving is generally unavoidable (only
the doubled trace of a length-4 ascending word lies in the integer span of
shorter traces), and such coefficients are kept as exact rationals.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _batch
from .su2 import make_rng
from .words import IndexSet, Word, canonical_cyclic_key, cyclic_reduce, curve_word, index_sets, inverse_letters

__all__ = [
    "MissingVariable",
    "TracePolynomial",
    "reduce_trace",
    "evaluate_polynomial",
    "verify_reduction",
]

# monomial: tuple of (index-set, exponent) pairs, sorted by variable order
Monomial = tuple[tuple[IndexSet, int], ...]


class MissingVariable(KeyError):
    """A polynomial was evaluated without a value for one of its variables."""


def _var_order(v: IndexSet) -> tuple[int, IndexSet]:
    return (len(v), v)


def _mono(vars_exps: Iterable[tuple[IndexSet, int]]) -> Monomial:
    return tuple(sorted(vars_exps, key=lambda p: _var_order(p[0])))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[IndexSet, int] = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return _mono(exps.items())


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_sort_key(m: Monomial):
    expanded: list[tuple[int, IndexSet]] = []
    for v, e in m:
        expanded.extend([_var_order(v)] * e)
    return (_mono_degree(m), expanded)


def _format_var(v: IndexSet) -> str:
    sep = "" if v[-1] <= 9 else "_"
    return "f" + sep.join(str(i) for i in v)


class TracePolynomial:
    """Polynomial in the variables f_I.

    Coefficients are integers except for reductions over alphabets of size
    four or more, where exact rational (half-integer) coefficients appear.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms: dict[Monomial, int] = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def constant(cls, c: int) -> "TracePolynomial":
        return cls({(): c})

    @classmethod
    def variable(cls, index_set: Sequence[int]) -> "TracePolynomial":
        return cls({((tuple(index_set), 1),): 1})

    def __add__(self, other: "TracePolynomial") -> "TracePolynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TracePolynomial(out)

    def __sub__(self, other: "TracePolynomial") -> "TracePolynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) - c
        return TracePolynomial(out)

    def __neg__(self) -> "TracePolynomial":
        return TracePolynomial({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return TracePolynomial({m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return TracePolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, TracePolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def exact_div(self, d: int) -> "TracePolynomial":
        """Exact division of every coefficient; falls back to Fraction coefficients."""
        out = {}
        for m, c in self.terms.items():
            q = Fraction(c, d)
            out[m] = int(q) if q.denominator == 1 else q
        return TracePolynomial(out)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    def variables(self) -> set[IndexSet]:
        return {v for m in self.terms for v, _ in m}

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Canonical term order: graded, then lexicographic on variable lists."""
        return sorted(self.terms.items(), key=lambda kv: _mono_sort_key(kv[0]))

    def evaluate(self, coords: Mapping[IndexSet, float]):
        """Evaluate at coordinate values (floats or numpy arrays)."""
        total = 0
        for m, c in self.terms.items():
            term = c
            for v, e in m:
                if v not in coords:
                    raise MissingVariable(_format_var(v))
                term = term * coords[v] ** e
            total = total + term
        return total

    def __str__(self) -> str:
        nonconst = [(m, c) for m, c in self.sorted_terms() if m]
        const = self.terms.get((), 0)
        parts: list[str] = []
        for m, c in nonconst:
            body = "*".join(
                _format_var(v) if e == 1 else f"{_format_var(v)}^{e}" for v, e in m
            )
            mag = abs(c)
            text = body if mag == 1 else f"{mag}*{body}"
            parts.append(("- " if c < 0 else "+ ") + text)
        if const or not parts:
            parts.append(("- " if const < 0 else "+ ") + str(abs(const)))
        head = parts[0][2:] if parts[0].startswith("+ ") else "-" + parts[0][2:]
        return " ".join([head] + parts[1:])

    def __repr__(self) -> str:
        return f"TracePolynomial({self})"


_ZERO = TracePolynomial()
_MEMO: dict[tuple[int, ...], TracePolynomial] = {}

# value in the rewriting recursion: polynomial plus an integer multiple of the
# unknown ascending class being solved for (lam is 0 outside _solve_ascending)
_PolyX = tuple[TracePolynomial, int]


def reduce_trace(word: Word | Sequence[int], n_generators: int) -> TracePolynomial:
    """Polynomial P with P({f_I}) = tr(w) for every assignment of the generators.

    The result only involves variables f_I with |I| <= 3 and ascending
    indices, and is invariant under rotation and inversion of the word.
    """
    letters = word.letters if isinstance(word, Word) else tuple(word)
    for l in letters:
        if l == 0 or abs(l) > n_generators:
            raise ValueError(f"letter {l} outside alphabet of size {n_generators}")
    return _reduce_class(letters)


def _reduce_class(letters: Sequence[int]) -> TracePolynomial:
    # The canonical key identifies the trace class (rotation + inversion) for
    # memoization, but rewriting must run on the word as given: canonicalizing
    # can swap letters for their inverses and would break the termination
    # measure (length, inverse count, inversions).
    w = cyclic_reduce(letters)
    key = canonical_cyclic_key(w)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    poly, lam = _rewrite(w, None, 0)
    assert lam == 0
    _MEMO[key] = poly
    return poly


def _rewrite(w: Sequence[int], target: tuple[int, ...] | None, target_len: int) -> _PolyX:
    """Apply one rule to the cyclic word w and recurse.

    With a target class set, words shorter than the target are delegated to
    the memoized reducer and a word in the target class itself is returned as
    the unknown (coefficient 1).
    """
    w = cyclic_reduce(w)
    if target is not None:
        if len(w) < target_len:
            return (_reduce_class(w), 0)
        if canonical_cyclic_key(w) == target:
            return (_ZERO, 1)

    def rec(v: Sequence[int]) -> _PolyX:
        if target is None:
            return (_reduce_class(v), 0)
        return _rewrite(v, target, target_len)

    n = len(w)
    if n == 0:
        return (TracePolynomial.constant(2), 0)
    if n == 1:
        return (TracePolynomial.variable((abs(w[0]),)), 0)

    # repeat rule: some signed letter occurs twice
    first_pos: dict[int, int] = {}
    dup = None
    for pos, l in enumerate(w):
        if l in first_pos:
            dup = (first_pos[l], pos)
            break
        first_pos[l] = pos
    if dup is not None:
        i, j = dup
        ww = w[i:] + w[:i]
        p = j - i
        head, mid, tail = ww[0], ww[1:p], ww[p + 1 :]
        pa, la = rec((head,) + mid)
        pb, lb = rec((head,) + tail)
        pc, lc = rec(mid + inverse_letters(tail))
        assert la == 0 and lb == 0, "unknown class cannot recur in shorter factors"
        return (pa * pb - pc, -lc)

    # unmix rule: rotate an inverse letter to the end
    neg = next((pos for pos, l in enumerate(w) if l < 0), None)
    if neg is not None:
        ww = w[neg + 1 :] + w[: neg + 1]
        a = -ww[-1]
        body = ww[:-1]
        pa, la = rec(body)
        pb, lb = rec(body + (a,))
        assert la == 0
        return (TracePolynomial.variable((a,)) * pa - pb, -lb)

    # all positive, all distinct: rotate the smallest letter to the front
    lead = min(range(n), key=lambda pos: w[pos])
    ww = w[lead:] + w[:lead]
    inv = next((i for i in range(1, n - 1) if ww[i] > ww[i + 1]), None)
    if inv is None:
        # ascending
        if n <= 3:
            return (TracePolynomial.variable(ww), 0)
        assert target is None, "ascending long class inside its own elimination"
        return (_solve_ascending(ww), 0)

    # swap rule at the first descent of the tail
    U, x, y, V = ww[:inv], ww[inv], ww[inv + 1], ww[inv + 2 :]
    fx = TracePolynomial.variable((x,))
    fy = TracePolynomial.variable((y,))
    fxy = TracePolynomial.variable((min(x, y), max(x, y)))
    p1, l1 = rec(U + (y,) + V)
    p2, l2 = rec(U + (x,) + V)
    p3, l3 = rec(U + V)
    p4, l4 = rec(U + (y, x) + V)
    assert l1 == 0 and l2 == 0 and l3 == 0
    poly = fx * p1 + fy * p2 + (fxy - fx * fy) * p3 - p4
    return (poly, -l4)


def _solve_ascending(w: tuple[int, ...]) -> TracePolynomial:
    """Eliminate an ascending class of length >= 4 by splitting off a prefix."""
    target = canonical_cyclic_key(w)
    m = len(w)
    solutions: list[TracePolynomial] = []
    for k in (1, 2, 3):
        if k >= m:
            break
        prefix, rest = w[:k], w[k:]
        known = TracePolynomial.variable(prefix) * _reduce_class(rest)
        p, lam = _rewrite(prefix + inverse_letters(rest), target, m)
        if 1 + lam == 0:
            continue  # this split is a tautology, try a longer prefix
        sol = (known - p).exact_div(1 + lam)
        if sol.is_integral():
            return sol
        solutions.append(sol)
    if solutions:
        return solutions[0]
    raise ArithmeticError(f"no eliminating split found for {w}")  # pragma: no cover


def evaluate_polynomial(poly: TracePolynomial, coords: Mapping[IndexSet, float]) -> float:
    """Evaluate at given f_I values; raises MissingVariable when one is absent."""
    return poly.evaluate(coords)


def verify_reduction(
    word: Word | Sequence[int],
    n_generators: int,
    trials: int,
    rng: np.random.Generator | int,
) -> float:
    """Numerical certificate: max |P(f_I(rho)) - tr(rho(w))| over Haar-random rho."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if isinstance(rng, int):
        rng = make_rng(rng)
    letters = word.letters if isinstance(word, Word) else tuple(word)
    poly = reduce_trace(letters, n_generators)
    values = np.stack([_batch.haar_batch(rng, trials) for _ in range(n_generators)])
    coords = {
        I: _batch.word_trace(curve_word(I).letters, values) for I in index_sets(n_generators)
    }
    direct = _batch.word_trace(letters, values)
    via_poly = poly.evaluate(coords)
    return float(np.max(np.abs(via_poly - direct)))

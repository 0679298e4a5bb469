"""Entropic expressions over conditional entropies and their evaluation.

An :class:`EntropicExpression` is a finite sum ``sum c_xy * H(x|y)`` with
exact rational coefficients. Evaluation pulls pairwise joint distributions
from a :class:`ProbabilityModel` and returns a value in bits; a positive
value certifies that no global joint distribution reproduces the model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Protocol, Sequence

import numpy as np

NEG_TOL = 1e-12
NORM_TOL = 1e-12

Pair = tuple[str, str]


class ModelError(KeyError):
    """The probability model cannot supply a requested pair."""


def _as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, (int, Rational)):
        return Fraction(q)
    if isinstance(q, str):
        return Fraction(q.replace("−", "-").strip())
    if isinstance(q, float):
        return Fraction(q)
    raise TypeError(f"cannot interpret {q!r} as a rational coefficient")


class EntropicExpression:
    """Signed rational combination of conditional entropies H(x|y).

    ``(x, y)`` and ``(y, x)`` are distinct terms. Zero coefficients are
    dropped so equal expressions compare equal.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Pair, object] | Iterable[tuple[Pair, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Pair, Fraction] = {}
        for (x, y), c in items:
            if x == y:
                raise ValueError(f"H({x}|{y}) conditions a variable on itself")
            acc[(x, y)] = acc.get((x, y), Fraction(0)) + _as_fraction(c)
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}

    @property
    def terms(self) -> Mapping[Pair, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __getitem__(self, pair: Pair) -> Fraction:
        return self._terms.get(pair, Fraction(0))

    def __contains__(self, pair) -> bool:
        return pair in self._terms

    def __eq__(self, other):
        if not isinstance(other, EntropicExpression):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "EntropicExpression") -> "EntropicExpression":
        return combine(self, other, 1, 1)

    def __sub__(self, other: "EntropicExpression") -> "EntropicExpression":
        return combine(self, other, 1, -1)

    def __neg__(self) -> "EntropicExpression":
        return self.scale(-1)

    def __mul__(self, q) -> "EntropicExpression":
        return self.scale(q)

    __rmul__ = __mul__

    def scale(self, q) -> "EntropicExpression":
        q = _as_fraction(q)
        return EntropicExpression({k: q * v for k, v in self._terms.items()})

    def pairs(self) -> list[Pair]:
        return list(self._terms)

    def variables(self) -> set[str]:
        return {x for pair in self._terms for x in pair}

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (x, y), c in self._terms.items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            coeff = "" if mag == 1 else f"{mag}*"
            parts.append(f"{sign} {coeff}H({x}|{y})")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"coeff": str(c), "x": x, "y": y} for (x, y), c in self._terms.items()
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EntropicExpression":
        try:
            raw = data["terms"]
            items = [((str(t["x"]), str(t["y"])), _as_fraction(str(t["coeff"]))) for t in raw]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed inequality JSON: {exc}") from exc
        return cls(items)


def H(x: str, y: str, coeff=1) -> EntropicExpression:
    """Single-term expression ``coeff * H(x|y)``."""
    return EntropicExpression({(x, y): coeff})


def combine(e1: EntropicExpression, e2: EntropicExpression, q1=1, q2=1) -> EntropicExpression:
    """Exact termwise ``q1*e1 + q2*e2``."""
    q1, q2 = _as_fraction(q1), _as_fraction(q2)
    items = [(k, q1 * v) for k, v in e1] + [(k, q2 * v) for k, v in e2]
    return EntropicExpression(items)


def total(exprs: Iterable[EntropicExpression]) -> EntropicExpression:
    out = EntropicExpression()
    for e in exprs:
        out = out + e
    return out


def chain_inequality(cycle: Sequence[str]) -> EntropicExpression:
    """ENC chain expression for the cycle ``X0 - X1 - ... - X(n-1) - X0``.

    Returns ``H(X0|X(n-1)) - sum_k H(Xk|Xk+1)``, which is <= 0 whenever a
    global joint distribution over all ``Xk`` exists.
    """
    n = len(cycle)
    if n < 3:
        raise ValueError(f"chain inequality needs at least 3 observables, got {n}")
    if len(set(cycle)) != n:
        raise ValueError("cycle labels must be distinct")
    items = [((cycle[0], cycle[-1]), 1)]
    items += [((cycle[k], cycle[k + 1]), -1) for k in range(n - 1)]
    return EntropicExpression(items)


EQ4 = "EQ4"
SEC2B = "SEC2B"
FORMS = (EQ4, SEC2B)


def chsh_chain(form: str = SEC2B) -> tuple[int, int, int, int]:
    """Positions (a0, a1, b0, b1) -> order along the chain, for ``form``.

    The CHSH expression is a 4-cycle chain; this returns the cycle as
    indices into ``(a0, a1, b0, b1)``.
    """
    if form == SEC2B:
        return (0, 3, 1, 2)  # A0 -> B1 -> A1 -> B0
    if form == EQ4:
        return (1, 2, 0, 3)  # A1 -> B0 -> A0 -> B1
    raise ValueError(f"unknown CHSH form {form!r}; expected one of {FORMS}")


def entropic_chsh(a0: str, a1: str, b0: str, b1: str, form: str = SEC2B) -> EntropicExpression:
    """Entropic CHSH expression between parties {a0, a1} and {b0, b1}.

    ``SEC2B``: H(a0|b0) - H(a0|b1) - H(b1|a1) - H(a1|b0)
    ``EQ4``:   H(a1|b1) - H(a1|b0) - H(b0|a0) - H(a0|b1)
    """
    labels = (a0, a1, b0, b1)
    if len(set(labels)) != 4:
        raise ValueError(f"CHSH observables must be distinct, got {labels}")
    order = chsh_chain(form)
    return chain_inequality([labels[i] for i in order])


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over outcome tuples of a few observables.

    ``probabilities`` has one axis per variable. Entries in
    ``[-1e-12, 0)`` are clipped to zero and the table renormalized.
    """

    outcomes: tuple[tuple, ...]
    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        outcomes = tuple(tuple(o) for o in self.outcomes)
        if p.ndim != len(outcomes) or p.shape != tuple(len(o) for o in outcomes):
            raise ValueError(
                f"table shape {p.shape} does not match outcome lists {[len(o) for o in outcomes]}"
            )
        if np.any(p < -NEG_TOL):
            raise ValueError(f"negative probability {p.min():.3e}")
        s = p.sum()
        if abs(s - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {s!r}, not 1")
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
        p.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_table(cls, table, outcomes=None) -> "JointDistribution":
        table = np.asarray(table, dtype=float)
        if outcomes is None:
            outcomes = tuple(tuple(range(k)) for k in table.shape)
        return cls(tuple(outcomes), table)

    @property
    def n_vars(self) -> int:
        return self.probabilities.ndim

    def marginal(self, axes: Sequence[int]) -> "JointDistribution":
        axes = list(axes)
        drop = tuple(i for i in range(self.n_vars) if i not in axes)
        p = self.probabilities.sum(axis=drop) if drop else self.probabilities
        # Reorder kept axes to the requested order.
        kept = [i for i in range(self.n_vars) if i in axes]
        p = np.transpose(p, [kept.index(a) for a in axes])
        return JointDistribution(tuple(self.outcomes[a] for a in axes), p)

    def __getitem__(self, outcome_tuple) -> float:
        idx = tuple(o.index(v) for o, v in zip(self.outcomes, outcome_tuple))
        return float(self.probabilities[idx])


def shannon_entropy(p) -> float:
    """Entropy in bits of a probability array (any shape), with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def conditional_entropy(joint: JointDistribution) -> float:
    """H(X|Y) = H(X, Y) - H(Y) in bits, for a joint table over (X, Y)."""
    if joint.n_vars != 2:
        raise ValueError("conditional entropy needs a two-variable joint distribution")
    p = joint.probabilities
    h = shannon_entropy(p) - shannon_entropy(p.sum(axis=0))
    # Rounding can push an exact zero slightly negative.
    return max(h, 0.0)


class ProbabilityModel(Protocol):
    """Supplies the joint distribution of a commuting pair (x, y)."""

    def joint(self, x: str, y: str) -> JointDistribution: ...


class GlobalDistributionModel:
    """Pair marginals of one explicit joint distribution over all labels."""

    def __init__(self, labels: Sequence[str], distribution: JointDistribution):
        if len(labels) != distribution.n_vars:
            raise ValueError("one label per distribution axis is required")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        self.labels = tuple(labels)
        self.distribution = distribution
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    def joint(self, x: str, y: str) -> JointDistribution:
        try:
            i, j = self._index[x], self._index[y]
        except KeyError as exc:
            raise ModelError(f"model has no observable {exc.args[0]!r} (pair ({x}, {y}))") from None
        return self.distribution.marginal([i, j])


class PairTableModel:
    """Model backed by an explicit dict of pair tables; missing pairs raise."""

    def __init__(self, tables: Mapping[Pair, JointDistribution]):
        self._tables = dict(tables)

    def joint(self, x: str, y: str) -> JointDistribution:
        if (x, y) in self._tables:
            return self._tables[(x, y)]
        if (y, x) in self._tables:
            t = self._tables[(y, x)]
            return JointDistribution((t.outcomes[1], t.outcomes[0]), t.probabilities.T)
        raise ModelError(f"model does not supply the pair ({x}, {y})")


def evaluate(expr: EntropicExpression, model: ProbabilityModel) -> float:
    """Value of ``expr`` in bits under ``model``; > 0 means violation."""
    value = 0.0
    for (x, y), c in expr:
        try:
            joint = model.joint(x, y)
        except KeyError as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(f"model does not supply the pair ({x}, {y})") from exc
        value += float(c) * conditional_entropy(joint)
    return value


def random_joint(rng: np.random.Generator, sizes: Sequence[int]) -> JointDistribution:
    """Dirichlet-distributed joint table, handy for property checks."""
    p = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(tuple(sizes))
    outcomes = tuple(tuple(range(k)) for k in sizes)
    return JointDistribution(outcomes, p)

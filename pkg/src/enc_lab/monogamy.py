"""Monogamy certificates for sums of ENC inequalities.

A certificate writes the sum of the target inequalities as a nonnegative
rational combination of oriented 3-cycle chain inequalities drawn from a
chordal edge decomposition of the joint commutation graph. Every 3-cycle
admits a joint distribution, so each oriented triangle inequality holds
and so does their sum.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .entropy import EntropicExpression, chain_inequality, entropic_chsh, total
from .graphs import (
    ChordalDecomposition,
    CommutationGraph,
    GraphError,
    chordal_edge_decompositions,
    cycle_graph,
    edge,
    make_graph,
    triangles,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000
BUDGET_ENV = "ENC_LAB_BUDGET"

Triple = tuple[str, str, str]


@dataclass(frozen=True)
class MonogamyCertificate:
    triangles: tuple[tuple[Triple, Fraction], ...]
    target: EntropicExpression
    decomposition: ChordalDecomposition
    joint: CommutationGraph | None = None

    def combination(self) -> EntropicExpression:
        """Exact sum of multiplier * chain_inequality(triangle)."""
        return total(chain_inequality(t).scale(q) for t, q in self.triangles)

    def inequalities(self) -> list[EntropicExpression]:
        return [chain_inequality(t) for t, _ in self.triangles]

    def to_dict(self) -> dict:
        return {
            "triangles": [
                {"cycle": list(t), "multiplier": str(q), "inequality": chain_inequality(t).to_dict()}
                for t, q in self.triangles
            ],
            "target": self.target.to_dict(),
            "decomposition": self.decomposition.to_dict(),
            "joint": self.joint.to_dict() if self.joint is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MonogamyCertificate":
        tris = tuple(
            (tuple(str(x) for x in t["cycle"]), Fraction(str(t["multiplier"])))
            for t in data["triangles"]
        )
        joint = data.get("joint")
        return cls(
            tris,
            EntropicExpression.from_dict(data["target"]),
            ChordalDecomposition.from_dict(data["decomposition"]),
            CommutationGraph.from_dict(joint) if joint else None,
        )


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def check(cert: MonogamyCertificate, joint: CommutationGraph | None = None) -> VerifyResult:
    """Verify ``cert`` and explain the first failure, if any."""
    joint = joint if joint is not None else cert.joint
    for t, q in cert.triangles:
        if len(t) != 3 or len(set(t)) != 3:
            return VerifyResult(False, f"{t} is not a triangle")
        if q < 0:
            return VerifyResult(False, f"negative multiplier {q} on {t}")
        if joint is not None:
            for u, v in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
                if not joint.has_edge(u, v):
                    return VerifyResult(False, f"triangle {t} uses non-edge ({u}, {v})")
    residual = cert.combination() - cert.target
    if len(residual):
        (x, y), c = next(iter(residual))
        return VerifyResult(False, f"uncancelled term {c}*H({x}|{y})")
    return VerifyResult(True)


def verify(cert: MonogamyCertificate, joint: CommutationGraph | None = None) -> bool:
    """True iff the certificate's exact identity, signs and edges all hold."""
    result = check(cert, joint)
    if not result:
        log.info("certificate rejected: %s", result.reason)
    return result.ok


def orientations(tri: Triple) -> list[Triple]:
    """All six oriented 3-cycles (three apexes, two directions) of a triangle."""
    a, b, c = sorted(tri)
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


def _nonnegative_solution(
    columns: Sequence[dict], target: dict
) -> list[Fraction] | None:
    """Exact phase-1 simplex: find q >= 0 with sum_j q_j * columns[j] == target.

    Columns and target are sparse maps row-key -> Fraction. Bland's rule
    keeps the pivoting finite and deterministic.
    """
    rows = sorted({k for col in columns for k in col} | set(target))
    n, m = len(columns), len(rows)
    if m == 0:
        return [Fraction(0)] * n
    # Tableau with artificial variables n..n+m-1, rhs in the last column.
    tab = []
    for r in rows:
        b = target.get(r, Fraction(0))
        sign = -1 if b < 0 else 1
        row = [sign * col.get(r, Fraction(0)) for col in columns]
        row += [Fraction(0)] * m
        row.append(sign * b)
        tab.append(row)
    for i in range(m):
        tab[i][n + i] = Fraction(1)
    basis = [n + i for i in range(m)]
    width = n + m
    # Reduced costs for minimizing the sum of artificials.
    cost = [Fraction(0)] * (width + 1)
    for i in range(m):
        for j in range(width + 1):
            cost[j] -= tab[i][j]
    for i in range(m):
        cost[n + i] += 1

    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        leave, best = None, None
        for i in range(m):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # unbounded direction; cannot happen in phase 1
            break
        piv = tab[leave][entering]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][entering] != 0:
                f = tab[i][entering]
                tab[i] = [v - f * w for v, w in zip(tab[i], tab[leave])]
        f = cost[entering]
        cost = [v - f * w for v, w in zip(cost, tab[leave])]
        basis[leave] = entering

    if -cost[-1] != 0:
        return None
    q = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            q[j] = tab[i][-1]
    return q


def _candidate_triangles(decomp: ChordalDecomposition) -> list[Triple]:
    seen: set[Triple] = set()
    out: list[Triple] = []
    for sg in decomp.subgraphs:
        for t in sorted(triangles(sg)):
            if t not in seen:
                seen.add(t)
                out.append(t)
    return out


def certificate_for_decomposition(
    decomp: ChordalDecomposition,
    target: EntropicExpression,
    joint: CommutationGraph | None = None,
) -> MonogamyCertificate | None:
    """Solve for nonnegative multipliers over the decomposition's triangles."""
    oriented = [o for t in _candidate_triangles(decomp) for o in orientations(t)]
    if not oriented:
        return None
    columns = [dict(chain_inequality(o).terms) for o in oriented]
    q = _nonnegative_solution(columns, dict(target.terms))
    if q is None:
        return None
    used = tuple((o, c) for o, c in zip(oriented, q) if c != 0)
    return MonogamyCertificate(used, target, decomp, joint)


def resolve_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            log.warning("ignoring non-integer %s=%r", BUDGET_ENV, env)
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class SearchOutcome:
    certificate: MonogamyCertificate | None
    status: str  # "found", "exhausted" (proven absent) or "budget"
    examined: int

    @property
    def message(self) -> str:
        if self.status == "found":
            return f"certificate found after {self.examined} decomposition(s)"
        if self.status == "budget":
            return f"budget exhausted after {self.examined} decomposition(s); search incomplete"
        return f"no certificate: all {self.examined} decomposition(s) examined"


def search_monogamy(
    joint: CommutationGraph,
    targets: Sequence[EntropicExpression],
    budget: int | None = None,
) -> SearchOutcome:
    """Search decompositions in order until a certificate is found.

    The subgraph count is ``len(targets)``, one chordal subgraph per
    scenario; the required edges are the pairs named by the targets.
    """
    if not targets:
        raise ValueError("at least one target inequality is required")
    required = set()
    for t in targets:
        for x, y in t.pairs():
            if not joint.has_edge(x, y):
                raise GraphError(f"target term H({x}|{y}) is not an edge of the joint graph")
            required.add(edge(x, y))
    goal = total(targets)
    limit = resolve_budget(budget)
    examined = 0
    for decomp in chordal_edge_decompositions(joint, required, len(targets)):
        if examined >= limit:
            return SearchOutcome(None, "budget", examined)
        examined += 1
        cert = certificate_for_decomposition(decomp, goal, joint)
        if cert is not None:
            return SearchOutcome(cert, "found", examined)
    return SearchOutcome(None, "exhausted", examined)


def derive_monogamy(
    joint: CommutationGraph,
    targets: Sequence[EntropicExpression],
    budget: int | None = None,
) -> MonogamyCertificate | None:
    """Certificate that ``sum(targets) <= 0``, or None if the search fails."""
    outcome = search_monogamy(joint, targets, budget)
    if outcome.certificate is None:
        log.info(outcome.message)
    return outcome.certificate


CHSH_LABELS = ("A0", "A1", "B0", "B1", "E0", "E1")


def chsh_joint_graph() -> CommutationGraph:
    """Alice-Bob-Charlie scenario: every cross-party pair commutes."""
    parties = [("A0", "A1"), ("B0", "B1"), ("E0", "E1")]
    pairs = []
    for i in range(3):
        for j in range(i + 1, 3):
            pairs += [(u, v) for u in parties[i] for v in parties[j]]
    return make_graph(CHSH_LABELS, pairs)


def chsh_targets(form: str = "SEC2B") -> tuple[EntropicExpression, EntropicExpression]:
    return (
        entropic_chsh("A0", "A1", "B0", "B1", form),
        entropic_chsh("A0", "A1", "E0", "E1", form),
    )


def chsh_tripartite_example(form: str = "SEC2B"):
    """Joint graph, the two CHSH targets and a verified certificate."""
    joint = chsh_joint_graph()
    targets = chsh_targets(form)
    cert = derive_monogamy(joint, targets)
    if cert is None or not verify(cert, joint):
        raise RuntimeError("built-in CHSH scenario failed to certify")
    return joint, targets, cert


def chord_graph() -> CommutationGraph:
    """4-cycle X1-X2-X3-X4 with the chord (X2, X4)."""
    g = cycle_graph(["X1", "X2", "X3", "X4"])
    return make_graph(g.vertices, list(g.edges) + [("X2", "X4")])


def chord_example() -> tuple[EntropicExpression, EntropicExpression, EntropicExpression]:
    """Two triangle inequalities sharing (X2, X4) and their sum.

    The first uses the cyclic orientation of (X1, X2, X4), the second the
    anti-cyclic orientation of (X2, X3, X4); adding them cancels H(X2|X4).
    """
    first = chain_inequality(["X1", "X2", "X4"])
    second = chain_inequality(["X2", "X3", "X4"])
    return first, second, first + second


"""Dense density-matrix simulation of the tripartite CHSH experiments.

Qubits are indexed from 0 (most significant tensor factor first), so in the
three-qubit states below Alice holds qubit 0, Bob qubit 1 and Charlie
qubit 2. Observables live in the X-Z plane and are given by the Bloch angle
of their +1 eigenvector measured from the +z axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .entropy import (
    SEC2B,
    EntropicExpression,
    JointDistribution,
    ModelError,
    chsh_chain,
    entropic_chsh,
    evaluate,
)

HERM_TOL = 1e-10
EIG_TOL = 1e-10
MAX_QUBITS = 6

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

OUTCOMES = (1, -1)


class StateError(ValueError):
    pass


class DensityOperator:
    """Trace-one positive semidefinite operator on ``n`` qubits."""

    __slots__ = ("matrix", "n_qubits")

    def __init__(self, matrix, check: bool = True):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"density matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        n = int(round(math.log2(dim))) if dim > 0 else -1
        if n < 1 or 2**n != dim or n > MAX_QUBITS:
            raise StateError(f"dimension {dim} is not 2**n with 1 <= n <= {MAX_QUBITS}")
        if check:
            if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
                raise StateError("matrix is not Hermitian")
            if abs(np.trace(m) - 1) > HERM_TOL:
                raise StateError(f"trace is {np.trace(m).real:.12g}, not 1")
            if np.linalg.eigvalsh(m).min() < -EIG_TOL:
                raise StateError("matrix has a negative eigenvalue")
        m.setflags(write=False)
        self.matrix = m
        self.n_qubits = n

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_vector(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise StateError("zero state vector")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityOperator":
        d = 2**n
        return cls(np.eye(d) / d)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def rank(self, tol: float = EIG_TOL) -> int:
        return int(np.sum(self.eigenvalues() > tol))

    def reduced(self, sites: Sequence[int]) -> np.ndarray:
        """Partial trace keeping ``sites`` in the given order."""
        n = self.n_qubits
        sites = list(sites)
        t = self.matrix.reshape((2,) * (2 * n))
        keep = sites
        traced = [k for k in range(n) if k not in keep]
        letters = "abcdefghijklmnopqrstuvwxyz"
        row = list(letters[:n])
        col = list(letters[n : 2 * n])
        for k in traced:
            col[k] = row[k]
        out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
        red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
        d = 2 ** len(keep)
        return red.reshape(d, d)

    def __repr__(self):
        return f"DensityOperator(n_qubits={self.n_qubits})"


def state_from_amplitudes(data) -> DensityOperator:
    """Pure state from ``{"amplitudes": [[re, im], ...]}``."""
    try:
        amps = [complex(float(re), float(im)) for re, im in data["amplitudes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed amplitude JSON: {exc}") from exc
    return DensityOperator.from_vector(amps)


def _basis_vector(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


PSI1 = (_basis_vector("001") + _basis_vector("111")) / math.sqrt(2)
PSI2 = (_basis_vector("010") + _basis_vector("111")) / math.sqrt(2)


def pure_family(p1: float, p2: float) -> DensityOperator:
    """|phi> = N (p1|001> + p2|010> + (p1+p2)|111>) as a projector."""
    if p1 < 0 or p2 < 0:
        raise StateError("p1 and p2 must be nonnegative")
    if p1 + p2 <= 0:
        raise StateError("p1 = p2 = 0 leaves the state unnormalizable")
    psi = p1 * _basis_vector("001") + p2 * _basis_vector("010") + (p1 + p2) * _basis_vector("111")
    return DensityOperator.from_vector(psi)


def mixed_family(p: float) -> DensityOperator:
    """p |psi1><psi1| + (1-p) |psi2><psi2| (temporal-averaging mixture)."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"mixing weight p={p} outside [0, 1]")
    rho = p * np.outer(PSI1, PSI1.conj()) + (1 - p) * np.outer(PSI2, PSI2.conj())
    return DensityOperator(rho)


def bell_with_spectator() -> DensityOperator:
    """Phi+ on qubits 0, 1 with qubit 2 in |1>; equals |psi1>."""
    return DensityOperator.from_vector(PSI1)


def mix(states: Sequence[DensityOperator], weights: Sequence[float]) -> DensityOperator:
    """Convex combination of states with the same dimension."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise StateError("weights must be a probability vector")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise StateError("states differ in dimension")
    return DensityOperator(sum(wi * s.matrix for wi, s in zip(w, states)))


def depolarize(rho: DensityOperator, lam: float) -> DensityOperator:
    """(1 - lam) rho + lam I/d."""
    if not 0.0 <= lam <= 1.0:
        raise StateError(f"depolarizing strength {lam} outside [0, 1]")
    d = rho.dim
    return DensityOperator((1 - lam) * rho.matrix + lam * np.eye(d) / d)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.where(w < EIG_TOL, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))**2."""
    if rho.dim != sigma.dim:
        raise StateError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    s = _psd_sqrt(rho.matrix)
    inner = s @ sigma.matrix @ s
    inner = (inner + inner.conj().T) / 2
    w = np.linalg.eigvalsh(inner)
    f = float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


@dataclass(frozen=True)
class ObservableSpec:
    """Dichotomic observable cos(a) Z + sin(a) X on one qubit."""

    bloch_angle: float
    site: int

    def __post_init__(self):
        object.__setattr__(self, "bloch_angle", float(self.bloch_angle) % (2 * math.pi))
        if self.site < 0:
            raise ValueError("site index must be nonnegative")

    def operator(self) -> np.ndarray:
        a = self.bloch_angle
        return math.cos(a) * Z + math.sin(a) * X

    def projector(self, outcome: int) -> np.ndarray:
        if outcome not in OUTCOMES:
            raise ValueError(f"outcome must be +1 or -1, got {outcome}")
        return (I2 + outcome * self.operator()) / 2


def xz_observable(alpha: float, site: int) -> ObservableSpec:
    return ObservableSpec(alpha, site)


def chsh_angles(theta: float, form: str = SEC2B, charlie: str = "mirror") -> dict[str, float]:
    """Bloch angles for the six CHSH observables at opening ``theta``.

    The four Alice/Bob settings are spaced by 2*theta/3 along the chain of
    the chosen CHSH form, so for ``SEC2B`` A0=0, B1=2t/3, A1=4t/3, B0=2t.
    A basis rotation by theta turns the Bloch vector by 2*theta, which is
    why the chain spans 2*theta rather than theta.

    ``charlie="mirror"`` copies Bob's angles onto E0, E1. ``charlie="alt"``
    places E1 at the third chain position instead of the second; it breaks
    the Bob/Charlie mirror symmetry and is kept for comparison only.
    """
    step = 2 * theta / 3
    a0, a1, b0, b1 = "A0", "A1", "B0", "B1"
    chain = [(a0, a1, b0, b1)[i] for i in chsh_chain(form)]
    angles = {lab: k * step for k, lab in enumerate(chain)}
    angles["E0"] = angles["B0"]
    angles["E1"] = angles["B1"]
    if charlie == "alt":
        # E1 takes the angle of whichever Alice setting sits between the Bs.
        angles["E1"] = 2 * step
    elif charlie != "mirror":
        raise ValueError(f"unknown Charlie convention {charlie!r}")
    return angles


PARTY_SITES = {"A": 0, "B": 1, "E": 2}


def chsh_observables(
    theta: float, form: str = SEC2B, charlie: str = "mirror"
) -> dict[str, ObservableSpec]:
    """Six observables on qubits 0 (Alice), 1 (Bob) and 2 (Charlie)."""
    return {
        lab: ObservableSpec(a, PARTY_SITES[lab[0]])
        for lab, a in chsh_angles(theta, form, charlie).items()
    }


def joint_distribution(
    rho: DensityOperator, o1: ObservableSpec, o2: ObservableSpec
) -> JointDistribution:
    """Born-rule table P(o1 = a, o2 = b) = tr(rho P_a x P_b), outcomes (+1, -1)."""
    if o1.site == o2.site:
        raise ValueError(f"observables on the same qubit {o1.site} do not commute")
    for o in (o1, o2):
        if o.site >= rho.n_qubits:
            raise ValueError(f"site {o.site} outside a {rho.n_qubits}-qubit state")
    red = rho.reduced([o1.site, o2.site])
    table = np.empty((2, 2))
    for i, a in enumerate(OUTCOMES):
        for j, b in enumerate(OUTCOMES):
            proj = np.kron(o1.projector(a), o2.projector(b))
            table[i, j] = np.real(np.trace(red @ proj))
    return JointDistribution((OUTCOMES, OUTCOMES), table)


def single_distribution(rho: DensityOperator, o: ObservableSpec) -> np.ndarray:
    red = rho.reduced([o.site])
    return np.array([np.real(np.trace(red @ o.projector(a))) for a in OUTCOMES])


class BornModel:
    """Probability model answering pair queries by the Born rule."""

    def __init__(self, rho: DensityOperator, placement: Mapping[str, ObservableSpec]):
        self.rho = rho
        self.placement = dict(placement)
        self._cache: dict[tuple[str, str], JointDistribution] = {}

    def joint(self, x: str, y: str) -> JointDistribution:
        key = (x, y)
        if key not in self._cache:
            try:
                ox, oy = self.placement[x], self.placement[y]
            except KeyError as exc:
                raise ModelError(f"no observable placed for {exc.args[0]!r}") from None
            if ox.site == oy.site:
                raise ModelError(f"{x} and {y} act on the same qubit and do not commute")
            self._cache[key] = joint_distribution(self.rho, ox, oy)
        return self._cache[key]


def born_model(rho: DensityOperator, placement: Mapping[str, ObservableSpec]) -> BornModel:
    return BornModel(rho, placement)


def chsh_values(
    rho: DensityOperator, theta: float, form: str = SEC2B, charlie: str = "mirror"
) -> tuple[float, float]:
    """(H_K1, H_K2) for the Alice-Bob and Alice-Charlie CHSH expressions."""
    model = BornModel(rho, chsh_observables(theta, form, charlie))
    k1 = entropic_chsh("A0", "A1", "B0", "B1", form)
    k2 = entropic_chsh("A0", "A1", "E0", "E1", form)
    return evaluate(k1, model), evaluate(k2, model)


def violation(
    rho: DensityOperator, theta: float, form: str = SEC2B, expr: EntropicExpression | None = None
) -> float:
    """Value of the Alice-Bob CHSH expression (or ``expr``) at ``theta``."""
    expr = expr if expr is not None else entropic_chsh("A0", "A1", "B0", "B1", form)
    return evaluate(expr, BornModel(rho, chsh_observables(theta, form)))


def maximize_violation(
    rho: DensityOperator,
    form: str = SEC2B,
    theta_range: tuple[float, float] = (0.05, 1.5),
    grid_points: int = 200,
) -> tuple[float, float]:
    """Grid search plus golden-section refinement of H_K1 over theta.

    Returns ``(theta_star, value)`` with theta in the convention of
    :func:`chsh_angles`; the Bloch step is ``2 * theta_star / 3``.
    """
    lo, hi = theta_range
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    if not lo < hi:
        raise ValueError("theta range must satisfy lo < hi")
    grid = np.linspace(lo, hi, grid_points)
    vals = np.array([violation(rho, t, form) for t in grid])
    k = int(np.argmax(vals))  # first maximum, i.e. smallest theta on ties
    best_t, best_v = float(grid[k]), float(vals[k])
    if 0 < k < grid_points - 1 and vals[k] > vals[k - 1] and vals[k] > vals[k + 1]:
        res = minimize_scalar(
            lambda t: -violation(rho, t, form),
            bracket=(grid[k - 1], grid[k], grid[k + 1]),
            method="golden",
            tol=1e-10,
        )
        if grid[k - 1] <= res.x <= grid[k + 1] and -res.fun >= best_v:
            best_t, best_v = float(res.x), float(-res.fun)
    return best_t, best_v


def haar_random_state(rng: np.random.Generator, n_qubits: int) -> DensityOperator:
    """Haar-random pure state via a normalized complex Gaussian vector."""
    d = 2**n_qubits
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return DensityOperator.from_vector(psi)

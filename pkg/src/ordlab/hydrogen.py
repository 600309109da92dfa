"""Hydrogen with the naive spherical ordering.

The Hamiltonian is H = -(1/2)[d_r^2 + d_theta^2 / r^2 + d_phi^2 / (r^2 sin^2)] - 1/r
in atomic units (hartree, bohr). Separating psi = R(r) Theta(theta) e^{i m phi}
gives

    -Theta'' + m^2 / sin^2(theta) Theta = mu Theta
    -R'' + (mu / r^2) R - (2 / r) R = 2 E R

and the levels E = -1 / (2 (k + lambda + 1)^2) with lambda (lambda + 1) = mu.
Bound-state energies are returned negative.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import eval_gegenbauer, eval_genlaguerre

__all__ = [
    "QuantumNumbers",
    "naive_energy",
    "standard_energy",
    "angular_order",
    "angular_eigenvalues",
    "radial_eigenvalues",
    "numeric_energy",
    "SpectrumRow",
    "SpectrumTable",
    "spectrum_table",
    "convergence_order",
    "naive_wavefunction",
    "eigenfunction_samples",
    "eigenfunction_residual",
]


@dataclass(frozen=True)
class QuantumNumbers:
    """Principal n, angular label l (0 <= l < n) and magnetic m.

    m is not tied to l: the naive ordering allows any integer m.
    """

    n: int
    l: int
    m: int = 0

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.l <= self.n - 1:
            raise ValueError(f"invalid quantum numbers {self}")


def angular_order(m: int) -> float:
    """Index s of Theta ~ sin(theta)^s near the poles, s(s-1) = m^2."""
    return (1 + np.sqrt(4 * m * m + 1)) / 2


def angular_label(l: int, m: int) -> float:
    """sqrt(mu) for angular level l: l for m = 0, l + s(m) otherwise."""
    return float(l) if m == 0 else l + angular_order(m)


def naive_energy(qn: QuantumNumbers) -> float:
    L = angular_label(qn.l, qn.m)
    bracket = qn.n - qn.l - 0.5 + np.sqrt(L * L + 0.25)
    return -1.0 / (2.0 * bracket**2)


def standard_energy(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return -1.0 / (2.0 * n * n)


def angular_eigenvalues(m: int, count: int, grid: int = 2000) -> np.ndarray:
    """Lowest ``count`` eigenvalues of -Theta'' + m^2/sin^2 Theta on (0, pi).

    Second-order finite differences: a cell-centred Neumann grid for m = 0
    (eigenfunctions cos(l theta)), a node-centred Dirichlet grid otherwise.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if grid < 200:
        raise ValueError("grid must be >= 200")
    if count >= grid / 4:
        raise ValueError("grid too coarse for the requested number of levels")
    if m == 0:
        h = np.pi / grid
        d = np.full(grid, 2.0 / h**2)
        d[0] = d[-1] = 1.0 / h**2
    else:
        h = np.pi / (grid + 1)
        theta = h * np.arange(1, grid + 1)
        d = 2.0 / h**2 + m * m / np.sin(theta) ** 2
    e = np.full(grid - 1, -1.0 / h**2)
    return eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, count - 1))


def default_r_max(mu: float, count: int) -> float:
    # box must hold the count-th state; its extent grows like (count + lambda)^2
    lam = -0.5 + np.sqrt(mu + 0.25)
    nu = count + lam
    return max(40.0 * count, 8.0 * nu * nu)


def radial_eigenvalues(mu: float, count: int, r_max: float | None = None, grid: int = 16000) -> np.ndarray:
    """Lowest ``count`` energies of -R''/2 + (mu / 2r^2) R - R/r = E R.

    Dirichlet at r = 0 and r = r_max, uniform second-order differences.
    """
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if count < 1 or count >= grid / 4:
        raise ValueError("bad count for this grid")
    r_max = default_r_max(mu, count) if r_max is None else r_max
    h = r_max / (grid + 1)
    r = h * np.arange(1, grid + 1)
    d = 2.0 / h**2 + mu / r**2 - 2.0 / r
    e = np.full(grid - 1, -1.0 / h**2)
    w = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, count - 1))
    return 0.5 * w


def numeric_energy(qn: QuantumNumbers, grid: int = 4000, extrapolate: bool = True) -> float:
    """Energy from the angular then radial eigensolvers.

    With ``extrapolate`` both solvers run at ``grid`` and ``2 grid`` and the
    second-order error is removed by Richardson extrapolation.
    """
    def chain(N):
        mu = angular_eigenvalues(qn.m, qn.l + 1, N)[qn.l]
        mu = max(mu, 0.0)
        count = qn.n - qn.l
        # box fixed by the closed-form angular level so both grids share it
        r_max = default_r_max(angular_label(qn.l, qn.m) ** 2, count)
        return radial_eigenvalues(mu, count, r_max, N)[-1]

    if not extrapolate:
        return float(chain(grid))
    coarse, fine = chain(grid), chain(2 * grid)
    return float((4 * fine - coarse) / 3)


def convergence_order(qn: QuantumNumbers, grid: int = 2000) -> float:
    """Observed order of the raw chain from errors at grid and 2 grid."""
    exact = naive_energy(qn)
    e1 = abs(numeric_energy(qn, grid, extrapolate=False) - exact)
    e2 = abs(numeric_energy(qn, 2 * grid, extrapolate=False) - exact)
    return float(np.log2(e1 / e2))


@dataclass
class SpectrumRow:
    n: int
    l: int
    m: int
    E_closed: float
    E_numeric: float
    abs_err: float
    rel_err: float


@dataclass
class SpectrumTable:
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "l", "m", "E_closed", "E_numeric", "abs_err", "rel_err"])
        for r in self.rows:
            w.writerow([r.n, r.l, r.m] + [repr(float(v)) for v in (r.E_closed, r.E_numeric, r.abs_err, r.rel_err)])
        return buf.getvalue()

    def to_json(self, **kw) -> str:
        return json.dumps([asdict(r) for r in self.rows], **kw)

    def max_abs_err(self) -> float:
        return max(r.abs_err for r in self.rows)


def spectrum_table(n_max: int, m_values=(0,), grid: int = 4000) -> SpectrumTable:
    rows = []
    for m in m_values:
        for n in range(1, n_max + 1):
            for l in range(n):
                qn = QuantumNumbers(n, l, m)
                ec = naive_energy(qn)
                en = numeric_energy(qn, grid)
                err = abs(en - ec)
                rows.append(SpectrumRow(n, l, m, float(ec), en, float(err), float(err / abs(ec))))
    return SpectrumTable(rows)


def naive_wavefunction(qn: QuantumNumbers):
    """Real separated eigenfunction R(r) Theta(theta) cos(m phi) as a callable
    on spherical points (r, theta, phi).

    R = r^(lambda+1) e^(-kappa r) L_k^(2 lambda + 1)(2 kappa r) with
    lambda (lambda + 1) = mu, k = n - l - 1 and kappa = 1 / (k + lambda + 1);
    Theta = cos(l theta) for m = 0 and sin^s(theta) C_l^(s)(cos theta) for
    m != 0, s = angular_order(m).
    """
    L = angular_label(qn.l, qn.m)
    lam = -0.5 + np.sqrt(L * L + 0.25)
    k = qn.n - qn.l - 1
    kappa = 1.0 / (k + lam + 1)
    s = angular_order(qn.m)

    def psi(x):
        r, th, ph = x
        radial = r ** (lam + 1) * np.exp(-kappa * r) * eval_genlaguerre(k, 2 * lam + 1, 2 * kappa * r)
        if qn.m == 0:
            ang = np.cos(qn.l * th)
        else:
            ang = np.sin(th) ** s * eval_gegenbauer(qn.l, s, np.cos(th))
        return radial * ang * np.cos(qn.m * ph)

    return psi


def eigenfunction_samples(qn: QuantumNumbers, count: int = 20, seed: int = 0) -> np.ndarray:
    """Regular spherical sample points away from the nodes of the eigenfunction."""
    rng = np.random.default_rng(seed)
    psi = naive_wavefunction(qn)
    out = []
    while len(out) < count:
        x = np.array([rng.uniform(0.3, 6.0), rng.uniform(0.2, np.pi - 0.2), rng.uniform(0, 2 * np.pi)])
        # no nodal surface within 0.1 along any coordinate line
        sign = np.sign(psi(x))
        if sign != 0 and all(np.sign(psi(x + d)) == sign for d in np.vstack([0.1 * np.eye(3), -0.1 * np.eye(3)])):
            out.append(x)
    return np.array(out)


def eigenfunction_residual(qn: QuantumNumbers, samples=None, cfg=None) -> float:
    """max |(H psi - E psi) / psi| over the samples, E = naive_energy(qn).

    H is applied with the naive operator on the flat spherical metric by
    finite differences.
    """
    from .catalog import spherical3
    from .operators import OperatorSpec, ScalarField, apply_operator, build_operator

    pts = eigenfunction_samples(qn) if samples is None else np.atleast_2d(np.asarray(samples, dtype=float))
    if np.any(pts[:, 0] <= 0) or np.any(np.sin(pts[:, 1]) <= 1e-6):
        raise ValueError("sample at a coordinate singularity")
    psi_fn = naive_wavefunction(qn)
    psi = ScalarField(3, psi_fn, label=f"psi{qn}")
    op = build_operator(OperatorSpec.naive(), spherical3())
    E = naive_energy(qn)
    worst = 0.0
    for x in pts:
        v = psi_fn(x)
        Hpsi = 0.5 * apply_operator(op, psi, x, cfg, method="nested") - v / x[0]
        worst = max(worst, abs((Hpsi - E * v) / v))
    return float(worst)

"""Discrete height-function system on the periodic strip, solved by Newton.

The unknown is the height h(q, p) of the streamline p above the bed at
horizontal phase q, on the strip q ∈ [0, 2π), p ∈ [0, 1]. A steady wave of
wavenumber λ at Bernoulli constant r satisfies

    ((1 + λ²h_q²)/(2h_p²) + Ω(p))_p − λ²(h_q/h_p)_q = 0    (0 < p < 1)
    (1 + λ²h_q²)/(2h_p²) + h = r                           (p = 1)
    h = 0                                                  (p = 0)

with h_p > 0 throughout. Waves are even in q, so only the half period
q ∈ [0, π] is unknown; λ is an extra unknown, closed by one more equation
(an amplitude pin here, the arclength condition in `crestline.continuation`).

**Discretisation:**

Divergence form on a staggered stencil. The p-flux (1+λ²h_q²)/(2h_p²) + Ω
lives on cell midpoints in p, the q-flux h_q/h_p on midpoints in q; both are
second-order. The surface condition uses a one-sided five-point h_p of fourth
order. The p-grid is uniform or stretched toward the surface.

Every residual is measured relative to the discrete residual of the
subcritical stream H(p; s_−) (a constant per p-level), so that stream
solves the discrete system to rounding. The correction is O(Δp²) and
vanishes with refinement.

At the stream the Jacobian is P + λ²Q exactly, so the discrete dispersion
relation is a small generalised eigenproblem on one column; `discrete_onset`
solves it and the branch starts along its eigenvector.

**Architecture:**

- `StripGrid`: node coordinates and stencil weights
- `StripProblem`: grid + vorticity + regime, with the stream balance terms
- `HeightField`: immutable converged (or trial) state
- `residual` / `jacobian`: the discrete map and its analytic sparse derivative
- `newton_solve` / `newton_closed`: damped Newton with `scipy.sparse.linalg.spsolve`

**Unknown ordering:**

``u[j·Np + (i − 1)] = h[j, i]`` for half columns j = 0..Nq/2 and levels
i = 1..Np, then ``u[-1] = λ``. Equation rows use the same order (interior
rows of a column, then its surface row); the closure row is last.

**Common Mistakes:**

```python
# ❌ WRONG: Mutating a field's array in place
field.h[0, -1] += 1e-3          # ValueError: read-only

# ✅ CORRECT: Go through unknown vectors
u = field.unknowns(); u[field.problem.grid.n_p - 1] += 1e-3
trial = HeightField.from_unknowns(field.problem, u)
```

**Thread-Safety:**

Problems and fields are frozen with read-only arrays. A Newton solve keeps its
iterate in local variables only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eig
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from crestline._errors import (
    ConvergenceError,
    NoBifurcationError,
    ParseError,
    StagnationError,
)
from crestline._serialize import read_csv, read_json, write_csv, write_json
from crestline._types import GridKind
from crestline.dispersion import BifurcationSeed

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import NDArray
    from scipy.sparse import csc_matrix

    from crestline._config import GridConfig
    from crestline.streamflow import FlowRegime
    from crestline.vorticity._base import VorticityModel

__all__ = [
    "StripGrid",
    "StripProblem",
    "HeightField",
    "ResidualVector",
    "make_grid",
    "residual",
    "jacobian",
    "discrete_onset",
    "amplitude_row",
    "newton_closed",
    "newton_solve",
    "regrid",
    "write_field",
    "read_field",
    "FIELD_HEADER",
]

logger = logging.getLogger(__name__)

FIELD_HEADER = ("q", "p", "h")
STRETCH_BETA = 0.6
STENCIL_POINTS = 5
_MAX_DAMPING_HALVINGS = 30


def _readonly(arr: NDArray[np.float64]) -> NDArray[np.float64]:
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


def _derivative_weights(offsets: NDArray[np.float64]) -> NDArray[np.float64]:
    """Weights of f'(0) from samples at `offsets`, exact for polynomials of degree < len(offsets)."""
    scale = float(np.max(np.abs(offsets)))
    powers = np.arange(offsets.size)
    rhs = np.zeros(offsets.size)
    rhs[1] = 1.0
    return np.linalg.solve((offsets[None, :] / scale) ** powers[:, None], rhs) / scale


@dataclass(frozen=True, slots=True)
class StripGrid:
    """Nodes of the strip and the finite-difference weights on them.

    Attributes:
        n_q: Nodes per period in q (even).
        n_p: Intervals in p; levels are p[0] = 0 ... p[n_p] = 1.
        kind: Uniform or surface-stretched p levels.
        beta: Stretch strength, p = (1 − β)ξ + β·sin(πξ/2).
        d_p: Fourth-order ∂_p at every level, shape (n_p + 1, n_p + 1); rows 0
            and n_p are the one-sided boundary stencils.
    """

    n_q: int
    n_p: int
    kind: GridKind = GridKind.UNIFORM
    beta: float = STRETCH_BETA
    q: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    p: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    d_p: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GridKind(self.kind))
        if self.n_p < STENCIL_POINTS - 1:
            raise ValueError(f"n_p must be at least {STENCIL_POINTS - 1}, got {self.n_p}")
        xi = np.linspace(0.0, 1.0, self.n_p + 1)
        if self.kind is GridKind.STRETCHED:
            p = (1.0 - self.beta) * xi + self.beta * np.sin(0.5 * np.pi * xi)
            p[-1] = 1.0
        else:
            p = xi
        d_p = np.zeros((self.n_p + 1, self.n_p + 1))
        for i in range(self.n_p + 1):
            lo = min(max(i - STENCIL_POINTS // 2, 0), self.n_p + 1 - STENCIL_POINTS)
            window = slice(lo, lo + STENCIL_POINTS)
            d_p[i, window] = _derivative_weights(p[window] - p[i])
        object.__setattr__(self, "q", _readonly(2.0 * np.pi * np.arange(self.n_q) / self.n_q))
        object.__setattr__(self, "p", _readonly(p))
        object.__setattr__(self, "d_p", _readonly(d_p))

    @property
    def dq(self) -> float:
        return 2.0 * np.pi / self.n_q

    @property
    def half(self) -> int:
        """Columns q = 0 .. π kept as unknowns."""
        return self.n_q // 2 + 1

    @property
    def n_unknowns(self) -> int:
        """Height unknowns plus λ."""
        return self.half * self.n_p + 1

    @property
    def dp(self) -> NDArray[np.float64]:
        return np.diff(self.p)

    @property
    def cell_width(self) -> NDArray[np.float64]:
        """Control-volume width around interior levels 1..n_p−1."""
        return 0.5 * (self.p[2:] - self.p[:-2])

    def central_weights(self) -> tuple[NDArray[np.float64], ...]:
        """Three-point ∂_p weights at interior levels (i−1, i, i+1)."""
        d1, d2 = self.dp[:-1], self.dp[1:]
        return (-d2 / (d1 * (d1 + d2)), (d2 - d1) / (d1 * d2), d1 / (d2 * (d1 + d2)))

    def top_weights(self) -> NDArray[np.float64]:
        """One-sided fourth-order ∂_p weights at p = 1 for levels (N, N−1, ..., N−4)."""
        return self.d_p[-1, : -STENCIL_POINTS - 1 : -1]

    def bottom_weights(self) -> NDArray[np.float64]:
        """One-sided fourth-order ∂_p weights at p = 0 for levels (0, 1, ..., 4)."""
        return self.d_p[0, :STENCIL_POINTS]

    def top_derivative(self, h: NDArray[np.float64]) -> NDArray[np.float64]:
        """∂_p at p = 1 of heights whose last axis runs over the levels."""
        return np.asarray(h)[..., : -STENCIL_POINTS - 1 : -1] @ self.top_weights()

    def bottom_derivative(self, h: NDArray[np.float64]) -> NDArray[np.float64]:
        """∂_p at p = 0 of heights whose last axis runs over the levels."""
        return np.asarray(h)[..., :STENCIL_POINTS] @ self.bottom_weights()

    def node_derivative(self, h: NDArray[np.float64]) -> NDArray[np.float64]:
        """∂_p at every level, fourth order, same shape as `h`."""
        return np.asarray(h) @ self.d_p.T

    def refined(self) -> StripGrid:
        """The same kind of grid with twice the nodes in q and the intervals in p."""
        return StripGrid(2 * self.n_q, 2 * self.n_p, self.kind, self.beta)

    def to_dict(self) -> dict[str, object]:
        return {"kind": str(self.kind), "beta": self.beta}


def make_grid(config: GridConfig, *, stretched: bool = False, refinements: int = 0) -> StripGrid:
    """Grid for a configuration; `stretched` applies when the kind is 'auto'.

    Each refinement doubles both node counts.
    """
    if config.kind == "stretched" or (config.kind == "auto" and stretched):
        kind = GridKind.STRETCHED
    else:
        kind = GridKind.UNIFORM
    scale = 2**refinements
    return StripGrid(scale * config.n_q, scale * config.n_p, kind)


@dataclass(frozen=True, slots=True)
class StripProblem:
    """The discrete system for one vorticity, Bernoulli constant and grid.

    Attributes:
        model: Vorticity model.
        regime: Conjugate streams at r; the balance stream is its subcritical one.
        grid: Strip grid.
        base: Stream heights H(p_i; s_−).
        omega_half: Ω at p-cell midpoints.
        balance: Discrete interior residual of the stream, per interior level.
        shift_top: r − H(1) − 1/(2 (D_p H)(1)²) with the one-sided D_p.
        shift_bottom: H_p(0) − (D_p H)(0) with the one-sided D_p.
    """

    model: VorticityModel
    regime: FlowRegime
    grid: StripGrid
    base: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    omega_half: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    balance: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    shift_top: float = field(init=False, repr=False, compare=False)
    shift_bottom: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        grid = self.grid
        stream = self.regime.subcritical
        base = stream.H(grid.p)
        base[0] = 0.0
        midpoints = 0.5 * (grid.p[1:] + grid.p[:-1])
        omega_half = np.asarray(self.model.Omega(midpoints), dtype=float)
        hp = np.diff(base) / grid.dp
        flux = 0.5 / hp**2 + omega_half
        balance = (flux[1:] - flux[:-1]) / grid.cell_width
        hp_top = float(grid.top_derivative(base))
        hp_bottom = float(grid.bottom_derivative(base))
        object.__setattr__(self, "base", _readonly(base))
        object.__setattr__(self, "omega_half", _readonly(omega_half))
        object.__setattr__(self, "balance", _readonly(balance))
        object.__setattr__(self, "shift_top", float(self.r - base[-1] - 0.5 / hp_top**2))
        object.__setattr__(self, "shift_bottom", float(stream.H_p(0.0)) - float(hp_bottom))

    @property
    def r(self) -> float:
        return self.regime.r

    def with_grid(self, grid: StripGrid) -> StripProblem:
        return StripProblem(self.model, self.regime, grid)


class ResidualVector(NamedTuple):
    """Residuals on the half period.

    Attributes:
        interior: Shape (Nq/2 + 1, Np − 1), levels 1..Np−1.
        surface: Shape (Nq/2 + 1,).
        constraint: Closure residual (0.0 when no pin was given).
    """

    interior: NDArray[np.float64]
    surface: NDArray[np.float64]
    constraint: float

    def stacked(self) -> NDArray[np.float64]:
        """Newton ordering: per column interior then surface, closure last."""
        rows = np.concatenate([self.interior, self.surface[:, None]], axis=1).ravel()
        return np.append(rows, self.constraint)

    def norm(self) -> float:
        """Max-norm over all entries."""
        return float(np.max(np.abs(self.stacked())))


@dataclass(frozen=True, slots=True)
class HeightField:
    """A height function on the full strip.

    Attributes:
        problem: The discrete system it belongs to.
        h: Heights, shape (Nq, Np + 1), read-only, h[:, 0] = 0.
        lam: Wavenumber λ = 2π/Λ.
        residual_norm: Max-norm residual at convergence (nan if never solved).
        iterations: Newton iterations used.
    """

    problem: StripProblem
    h: NDArray[np.float64]
    lam: float
    residual_norm: float = math.nan
    iterations: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", _readonly(self.h))
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def stream(cls, problem: StripProblem, lam: float) -> HeightField:
        """The subcritical stream, flat in q."""
        h = np.tile(problem.base, (problem.grid.n_q, 1))
        return cls(problem, h, lam, residual_norm=0.0)

    @classmethod
    def from_unknowns(
        cls,
        problem: StripProblem,
        u: NDArray[np.float64],
        *,
        residual_norm: float = math.nan,
        iterations: int = 0,
    ) -> HeightField:
        """Rebuild the full even field from a half-period unknown vector."""
        grid = problem.grid
        m, n = grid.half, grid.n_p
        full = np.zeros((grid.n_q, n + 1))
        full[:m, 1:] = np.asarray(u[: m * n]).reshape(m, n)
        full[m:, 1:] = full[m - 2 : 0 : -1, 1:]
        return cls(problem, full, float(u[-1]), residual_norm, iterations)

    def unknowns(self) -> NDArray[np.float64]:
        m = self.problem.grid.half
        return np.append(self.h[:m, 1:].ravel(), self.lam)

    @property
    def n_q(self) -> int:
        return self.problem.grid.n_q

    @property
    def n_p(self) -> int:
        return self.problem.grid.n_p

    @property
    def r(self) -> float:
        return self.problem.r

    @property
    def eta(self) -> NDArray[np.float64]:
        """Surface heights h(q, 1)."""
        return self.h[:, -1]

    @property
    def amplitude(self) -> float:
        """Crest-to-trough height h(0, 1) − h(π, 1)."""
        return float(self.h[0, -1] - self.h[self.n_q // 2, -1])

    @property
    def max_eta(self) -> float:
        return float(np.max(self.eta))

    @property
    def min_eta(self) -> float:
        return float(np.min(self.eta))

    @property
    def stagnation_gap(self) -> float:
        return self.r - self.max_eta

    @property
    def Lambda(self) -> float:  # noqa: N802
        """Physical wavelength 2π/λ."""
        return 2.0 * math.pi / self.lam

    @property
    def surface_slope(self) -> NDArray[np.float64]:
        """η'(x) = λ·h_q(q, 1), centred differences."""
        eta = self.eta
        dq = self.problem.grid.dq
        return self.lam * (np.roll(eta, -1) - np.roll(eta, 1)) / (2.0 * dq)

    @property
    def max_slope(self) -> float:
        return float(np.max(np.abs(self.surface_slope)))

    @property
    def max_turn(self) -> float:
        """Largest change of direction, in degrees, between adjacent surface chords."""
        chords = self.lam * (np.roll(self.eta, -1) - self.eta) / self.problem.grid.dq
        angles = np.degrees(np.arctan(chords))
        return float(np.max(np.abs(angles - np.roll(angles, 1))))

    def sidecar(self) -> dict[str, object]:
        """JSON sidecar content of the CSV dump."""
        return {
            "Nq": self.n_q,
            "Np": self.n_p,
            "lambda": self.lam,
            "r": self.r,
            "amplitude": self.amplitude,
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "grid": self.problem.grid.to_dict(),
            "vorticity": self.problem.model.describe(),
        }


class _Fluxes(NamedTuple):
    hp_cell: NDArray[np.float64]
    hq_cell: NDArray[np.float64]
    dp_node: NDArray[np.float64]
    hq_face: NDArray[np.float64]
    hp_face: NDArray[np.float64]
    hp_top: NDArray[np.float64]
    hq_top: NDArray[np.float64]


def _stagnation(values: NDArray[np.float64], where: str, offset: int) -> None:
    bad = np.argwhere(~(values > 0.0))
    if bad.size:
        j, i = int(bad[0][0]), int(bad[0][1]) + offset
        raise StagnationError(
            f"stagnation breach: h_p <= 0 ({where})", cell=(j, i)
        )


def _fluxes(problem: StripProblem, h: NDArray[np.float64]) -> _Fluxes:
    grid = problem.grid
    dq = grid.dq
    hp_cell = np.diff(h, axis=1) / grid.dp
    _stagnation(hp_cell, "cell", 0)
    hq_node = (np.roll(h, -1, axis=0) - np.roll(h, 1, axis=0)) / (2.0 * dq)
    hq_cell = 0.5 * (hq_node[:, :-1] + hq_node[:, 1:])
    ca, cb, cc = grid.central_weights()
    dp_node = ca * h[:, :-2] + cb * h[:, 1:-1] + cc * h[:, 2:]
    _stagnation(dp_node, "node", 1)
    hq_face = (np.roll(h[:, 1:-1], -1, axis=0) - h[:, 1:-1]) / dq
    hp_face = 0.5 * (dp_node + np.roll(dp_node, -1, axis=0))
    hp_top = grid.top_derivative(h)
    _stagnation(hp_top[:, None], "surface", grid.n_p)
    return _Fluxes(hp_cell, hq_cell, dp_node, hq_face, hp_face, hp_top, hq_node[:, -1])


def _full_residual(
    problem: StripProblem, h: NDArray[np.float64], lam: float, f: _Fluxes
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    grid = problem.grid
    lam2 = lam * lam
    flux_p = (1.0 + lam2 * f.hq_cell**2) / (2.0 * f.hp_cell**2) + problem.omega_half
    flux_q = f.hq_face / f.hp_face
    interior = (
        (flux_p[:, 1:] - flux_p[:, :-1]) / grid.cell_width
        - lam2 * (flux_q - np.roll(flux_q, 1, axis=0)) / grid.dq
        - problem.balance
    )
    surface = (
        (1.0 + lam2 * f.hq_top**2) / (2.0 * f.hp_top**2)
        + problem.shift_top
        + h[:, -1]
        - problem.r
    )
    return interior, surface


def residual(field: HeightField, pin: float | None = None) -> ResidualVector:
    """Evaluate the discrete system on the half period.

    Args:
        field: Trial field.
        pin: Amplitude target; the constraint entry is amplitude − pin.

    Raises:
        StagnationError: If any discrete h_p <= 0, naming the cell.
    """
    f = _fluxes(field.problem, field.h)
    interior, surface = _full_residual(field.problem, field.h, field.lam, f)
    m = field.problem.grid.half
    constraint = 0.0 if pin is None else field.amplitude - pin
    return ResidualVector(interior[:m], surface[:m], constraint)


def amplitude_row(grid: StripGrid) -> NDArray[np.float64]:
    """Gradient of h(0, 1) − h(π, 1) over the unknown vector."""
    row = np.zeros(grid.n_unknowns)
    n = grid.n_p
    row[n - 1] = 1.0
    row[(grid.half - 1) * n + n - 1] = -1.0
    return row


def _assemble(field: HeightField, closure_row: NDArray[np.float64]) -> csc_matrix:
    problem = field.problem
    grid = problem.grid
    n_q, n, m = grid.n_q, grid.n_p, grid.half
    size = grid.n_unknowns
    lam = field.lam
    lam2 = lam * lam
    dq = grid.dq
    dp = grid.dp
    w = grid.cell_width
    f = _fluxes(problem, field.h)

    rows: list[NDArray[np.intp]] = []
    cols: list[NDArray[np.intp]] = []
    vals: list[NDArray[np.float64]] = []

    def add(rj: object, ri: object, cj: object, ci: object, v: object) -> None:
        rj_, ri_, cj_, ci_, v_ = np.broadcast_arrays(rj, ri, cj, ci, v)
        cj_ = np.mod(cj_, n_q)
        keep = (rj_ < m) & (ci_ > 0)
        cj_ = np.where(cj_ < m, cj_, n_q - cj_)
        rows.append((rj_[keep] * n + ri_[keep] - 1).astype(np.intp))
        cols.append((cj_[keep] * n + ci_[keep] - 1).astype(np.intp))
        vals.append(np.asarray(v_[keep], dtype=float))

    jj = np.arange(n_q)[:, None]
    ii = np.arange(1, n)[None, :]

    # p-flux differences
    d_hp = -(1.0 + lam2 * f.hq_cell**2) / f.hp_cell**3
    d_hq = lam2 * f.hq_cell / f.hp_cell**2
    for sign, cell in ((1.0, ii), (-1.0, ii - 1)):
        coef = sign / w[None, :]
        c_hp = coef * d_hp[:, cell[0]] / dp[cell[0]][None, :]
        c_hq = coef * d_hq[:, cell[0]] / (4.0 * dq)
        add(jj, ii, jj, cell + 1, c_hp)
        add(jj, ii, jj, cell, -c_hp)
        for level in (cell, cell + 1):
            add(jj, ii, jj + 1, level, c_hq)
            add(jj, ii, jj - 1, level, -c_hq)

    # q-flux differences
    ca, cb, cc = grid.central_weights()
    q_hq = 1.0 / f.hp_face
    q_hp = -f.hq_face / f.hp_face**2
    for sign, face in ((1.0, jj), (-1.0, jj - 1)):
        coef = -sign * lam2 / dq
        rows_face = np.mod(face[:, 0], n_q)
        g_hq = coef * q_hq[rows_face] / dq
        g_hp = 0.5 * coef * q_hp[rows_face]
        add(jj, ii, face + 1, ii, g_hq)
        add(jj, ii, face, ii, -g_hq)
        for offset, weight in ((-1, ca), (0, cb), (1, cc)):
            add(jj, ii, face, ii + offset, g_hp * weight[None, :])
            add(jj, ii, face + 1, ii + offset, g_hp * weight[None, :])

    # surface rows
    s_hp = (-(1.0 + lam2 * f.hq_top**2) / f.hp_top**3)[:, None]
    s_hq = (lam2 * f.hq_top / f.hp_top**2)[:, None]
    add(jj, n, jj, n, 1.0)
    for k, weight in enumerate(grid.top_weights()):
        add(jj, n, jj, n - k, s_hp * weight)
    add(jj, n, jj + 1, n, s_hq / (2.0 * dq))
    add(jj, n, jj - 1, n, -s_hq / (2.0 * dq))

    # λ column
    flux_q = f.hq_face / f.hp_face
    flux_p_lam = lam * f.hq_cell**2 / f.hp_cell**2
    col_interior = (flux_p_lam[:, 1:] - flux_p_lam[:, :-1]) / w - 2.0 * lam * (
        flux_q - np.roll(flux_q, 1, axis=0)
    ) / dq
    col_surface = lam * f.hq_top**2 / f.hp_top**2
    lam_col = np.concatenate([col_interior[:m], col_surface[:m, None]], axis=1).ravel()
    nonzero = np.flatnonzero(lam_col)
    rows.append(nonzero.astype(np.intp))
    cols.append(np.full(nonzero.size, size - 1, dtype=np.intp))
    vals.append(lam_col[nonzero])

    # closure row
    nonzero = np.flatnonzero(closure_row)
    rows.append(np.full(nonzero.size, size - 1, dtype=np.intp))
    cols.append(nonzero.astype(np.intp))
    vals.append(np.asarray(closure_row, dtype=float)[nonzero])

    matrix = coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    )
    return matrix.tocsc()


def jacobian(field: HeightField, closure_row: NDArray[np.float64] | None = None) -> csc_matrix:
    """Analytic sparse Jacobian over (half-period heights, λ).

    Args:
        field: Linearisation point.
        closure_row: Gradient of the closure equation; the amplitude pin by default.

    Raises:
        StagnationError: If any discrete h_p <= 0.
    """
    row = amplitude_row(field.problem.grid) if closure_row is None else closure_row
    return _assemble(field, row)


def discrete_onset(problem: StripProblem, seed: BifurcationSeed) -> BifurcationSeed:
    """The dispersion relation of the discrete system, nearest to `seed`.

    At the stream, h_q = 0 and the Jacobian over the heights is P + λ²Q with
    P, Q independent of λ. Restricted to φ(p)·cos q it acts column by column
    as the same Np × Np pencil, so the discrete onset is the positive real
    eigenvalue μ = λ² of P φ = −μ Q φ closest to λ₀².

    Args:
        problem: Discrete system whose stream is perturbed.
        seed: Continuous dispersion result; picks the eigenvalue.

    Returns:
        A seed on the grid's p levels, with φ(0) = 0 and φ(1) = 1, whose
        mode φ(p)·cos q is in the kernel of the discrete Jacobian.

    Raises:
        NoBifurcationError: If the pencil has no positive real eigenvalue.
    """
    grid = problem.grid
    m, n = grid.half, grid.n_p
    heights = slice(0, m * n)
    cosine = np.kron(np.cos(grid.q[:m])[:, None], np.eye(n))
    p_part = np.asarray(jacobian(HeightField.stream(problem, 0.0))[:, heights] @ cosine)[:n]
    one = np.asarray(jacobian(HeightField.stream(problem, 1.0))[:, heights] @ cosine)[:n]
    values, vectors = eig(p_part, p_part - one)
    admissible = np.flatnonzero(
        np.isfinite(values)
        & (np.abs(values.imag) <= 1e-8 * np.abs(values))
        & (values.real > 0.0)
    )
    if admissible.size == 0:
        raise NoBifurcationError(
            f"discrete dispersion relation has no positive root on {grid.n_q}x{grid.n_p}"
        )
    target = seed.lambda0**2
    pick = admissible[np.argmin(np.abs(values.real[admissible] - target))]
    vector = vectors[:, pick].real
    phi = np.concatenate([[0.0], vector / vector[-1]])
    lam = math.sqrt(float(values.real[pick]))
    logger.info("discrete onset lambda=%r on %dx%d %s (continuous %r)", lam, grid.n_q,
                grid.n_p, grid.kind, seed.lambda0)
    return BifurcationSeed(lambda0=lam, phi0=phi, p_grid=grid.p, stream=seed.stream)


def newton_closed(
    problem: StripProblem,
    u0: NDArray[np.float64],
    closure: Callable[[NDArray[np.float64]], tuple[float, NDArray[np.float64]]],
    *,
    tol: float = 1e-10,
    max_iterations: int = 50,
) -> HeightField:
    """Damped Newton on the system closed by an arbitrary scalar equation.

    Args:
        problem: Discrete system.
        u0: Starting unknowns (heights then λ).
        closure: Maps u to (closure residual, its gradient over u).
        tol: Max-norm tolerance on all residuals.
        max_iterations: Newton budget.

    Returns:
        Converged field with `residual_norm` and `iterations` filled in.

    Raises:
        ConvergenceError: No convergence within the budget, or a singular step.
        StagnationError: The start is inadmissible, or no damping keeps h_p > 0.
    """
    u = np.array(u0, dtype=float)
    norm = math.inf
    for iteration in range(max_iterations + 1):
        trial = HeightField.from_unknowns(problem, u)
        value, row = closure(u)
        res = residual(trial)._replace(constraint=value)
        norm = res.norm()
        logger.debug("newton iteration %d: residual %.3e", iteration, norm)
        if norm < tol:
            return HeightField.from_unknowns(problem, u, residual_norm=norm,
                                             iterations=iteration)
        if iteration == max_iterations:
            break
        step = spsolve(_assemble(trial, row), -res.stacked())
        if not np.all(np.isfinite(step)):
            raise ConvergenceError(
                f"singular Newton step at iteration {iteration} (residual {norm:.3e})",
                iterations=iteration,
                residual_norm=norm,
            )
        damping = 1.0
        for _ in range(_MAX_DAMPING_HALVINGS):
            candidate = u + damping * step
            try:
                _fluxes(problem, HeightField.from_unknowns(problem, candidate).h)
            except StagnationError:
                damping *= 0.5
                continue
            break
        else:
            raise StagnationError(
                f"approach to interior stagnation: damping exhausted at iteration {iteration}"
            )
        if damping < 1.0:
            logger.debug("newton step damped by %g", damping)
        u = candidate
    raise ConvergenceError(
        f"Newton did not converge in {max_iterations} iterations (residual {norm:.3e})",
        iterations=max_iterations,
        residual_norm=norm,
    )


def newton_solve(
    initial: HeightField, pin: float, *, tol: float = 1e-10, max_iterations: int = 50
) -> HeightField:
    """Solve with the amplitude pinned, λ free.

    Args:
        initial: Starting field (h_p > 0).
        pin: Crest-to-trough target a >= 0.
        tol: Max-norm residual tolerance.
        max_iterations: Newton budget.

    Raises:
        ConvergenceError: If Newton stalls.
        StagnationError: If damping cannot keep h_p > 0.
    """
    row = amplitude_row(initial.problem.grid)
    index_crest = int(np.flatnonzero(row > 0)[0])
    index_trough = int(np.flatnonzero(row < 0)[0])

    def closure(u: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        return float(u[index_crest] - u[index_trough] - pin), row

    return newton_closed(initial.problem, initial.unknowns(), closure, tol=tol,
                         max_iterations=max_iterations)


def regrid(field: HeightField, grid: StripGrid) -> HeightField:
    """Interpolate a field onto another grid of the same problem.

    Cubic splines in p per column, periodic cubic splines in q when the
    column count changes. The result is a predictor, not a solution.
    """
    old = field.problem.grid
    values = field.h
    if grid.n_q != old.n_q:
        q_ext = np.append(old.q, 2.0 * np.pi)
        rows = np.vstack([values, values[:1]])
        values = CubicSpline(q_ext, rows, axis=0, bc_type="periodic")(grid.q)
    spline = CubicSpline(old.p, values, axis=1)
    h = np.asarray(spline(grid.p))
    h[:, 0] = 0.0
    problem = field.problem.with_grid(grid)
    logger.info("regrid %dx%d %s -> %dx%d %s", old.n_q, old.n_p, old.kind,
                grid.n_q, grid.n_p, grid.kind)
    return HeightField(problem, h, field.lam)


def write_field(field: HeightField, path: Path) -> tuple[Path, Path]:
    """Write ``q,p,h`` CSV rows (row-major in q) plus a JSON sidecar.

    Returns:
        The CSV path and the sidecar path (same stem, ``.json``).
    """
    path = Path(path)
    grid = field.problem.grid
    qq, pp = np.meshgrid(grid.q, grid.p, indexing="ij")
    write_csv(path, FIELD_HEADER, np.column_stack([qq.ravel(), pp.ravel(), field.h.ravel()]))
    sidecar = path.with_suffix(".json")
    write_json(sidecar, field.sidecar())
    return path, sidecar


def read_field(path: Path) -> HeightField:
    """Load a field written by `write_field`, rebuilding its problem.

    Raises:
        ParseError: On a missing or malformed file, or a table that does not
            match the sidecar's grid.
        RegimeError: If the stored r is outside the admissible range.
    """
    from crestline.streamflow import conjugate_streams, model_from_description

    path = Path(path)
    meta = read_json(path.with_suffix(".json"))
    try:
        n_q, n_p = int(meta["Nq"]), int(meta["Np"])
        lam, r = float(meta["lambda"]), float(meta["r"])
        grid_meta = meta.get("grid", {})
        grid = StripGrid(
            n_q, n_p, GridKind(grid_meta.get("kind", "uniform")),
            float(grid_meta.get("beta", STRETCH_BETA)),
        )
        residual_norm = float(meta.get("residual_norm", math.nan))
        iterations = int(meta.get("iterations", 0))
        description = meta["vorticity"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path.with_suffix('.json')}: bad sidecar: {exc}") from exc
    table = read_csv(path, FIELD_HEADER)
    expected = n_q * (n_p + 1)
    if table.shape[0] != expected:
        raise ParseError(f"{path}: expected {expected} rows for {n_q}x{n_p}, got {table.shape[0]}")
    qq, pp = np.meshgrid(grid.q, grid.p, indexing="ij")
    if not (np.allclose(table[:, 0], qq.ravel(), atol=1e-12)
            and np.allclose(table[:, 1], pp.ravel(), atol=1e-12)):
        raise ParseError(f"{path}: q,p columns do not match the sidecar grid")
    h = table[:, 2].reshape(n_q, n_p + 1)
    if np.any(h[:, 0] != 0.0):
        raise ParseError(f"{path}: bottom row must be h = 0")
    model = model_from_description(description)
    problem = StripProblem(model, conjugate_streams(model, r), grid)
    return HeightField(problem, h, lam, residual_norm, iterations)

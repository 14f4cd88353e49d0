"""Periodic finite-difference KdV pair: operators, Casimir, Lenard recursion, time stepping.

The continuum equation is ``u_t = u_xxx + 6 u u_x`` on the circle.  The first
operator is the central difference ``D1``; the second is the Magri companion
``L(u) = D3 + 2 (diag(u) D1 + D1 diag(u))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .fields import Bivector
from .partial import PartialAnchor, full_anchor
from .polycore import Polynomial, VarSpace

# RK4 is stable on the imaginary axis up to |y| = 2*sqrt(2); the dispersive
# part of the energy flow has spectral radius 1/h^3, so dt <= CFL_C * h^3.
CFL_C = 2.0


class IntegrationError(RuntimeError):
    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


class LenardError(ValueError):
    """Right-hand side of a Lenard step is not in the image of D1."""

    def __init__(self, mean, alternating):
        self.mean = mean
        self.alternating = alternating
        super().__init__(f"right-hand side not solvable: mean {mean}, alternating component {alternating}")


@dataclass(frozen=True)
class Grid:
    n: int
    length: float | Fraction = 2 * math.pi

    def __post_init__(self):
        if self.n < 5:
            raise ValueError("stencils need at least 5 points")
        if self.length <= 0:
            raise ValueError("length must be positive")

    @property
    def h(self) -> float:
        return float(self.length) / self.n

    @property
    def h_exact(self) -> Fraction:
        return Fraction(self.length) / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.h


def _circulant(n: int, stencil: dict[int, Fraction]) -> list[list[Fraction]]:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for off, c in stencil.items():
            rows[i][(i + off) % n] += c
    return rows


class KdvSystem:
    """Difference operators on a grid, both as exact rationals and as floats."""

    def __init__(self, grid: Grid):
        self.grid = grid
        n, h = grid.n, grid.h_exact
        self.D1_exact = _circulant(n, {1: 1 / (2 * h), -1: -1 / (2 * h)})
        self.D3_exact = _circulant(n, {2: 1 / (2 * h**3), 1: -1 / h**3, -1: 1 / h**3, -2: -1 / (2 * h**3)})
        hf = grid.h
        self.D1 = _circulant_float(n, {1: 1 / (2 * hf), -1: -1 / (2 * hf)})
        self.D3 = _circulant_float(n, {2: 1 / (2 * hf**3), 1: -1 / hf**3, -1: 1 / hf**3, -2: -1 / (2 * hf**3)})

    @property
    def n(self) -> int:
        return self.grid.n

    def L_exact(self, u: Sequence) -> list[list[Fraction]]:
        u = [Fraction(v) for v in u]
        D1, D3 = self.D1_exact, self.D3_exact
        return [[D3[i][j] + 2 * (u[i] + u[j]) * D1[i][j] for j in range(self.n)] for i in range(self.n)]

    def L(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.D3 + 2 * (u[:, None] + u[None, :]) * self.D1

    def apply_D1(self, v: np.ndarray) -> np.ndarray:
        return (np.roll(v, -1) - np.roll(v, 1)) / (2 * self.grid.h)

    def rhs(self, u: np.ndarray) -> np.ndarray:
        """Energy flow ``D1 (3u^2 + D1^2 u)``, the discrete ``u_xxx + 6 u u_x``."""
        d = self.apply_D1
        return d(3 * u * u + d(d(u)))

    # Hamiltonians, all of the form h * sum(...)

    def mass(self, u) -> float:
        return self.grid.h * math.fsum(u)

    def momentum(self, u) -> float:
        return self.grid.h * math.fsum(np.asarray(u) ** 2) / 2

    def energy(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return self.grid.h * math.fsum(u**3 - self.apply_D1(u) ** 2 / 2)


def _circulant_float(n, stencil) -> np.ndarray:
    m = np.zeros((n, n))
    for i in range(n):
        for off, c in stencil.items():
            m[i, (i + off) % n] += c
    return m


def kdv_space(n: int) -> VarSpace:
    return VarSpace.standard(n, prefix="u")


def build_pair(grid: Grid) -> tuple[PartialAnchor, PartialAnchor]:
    """``P1 = D1`` (constant) and ``P2(u)_ij = D3_ij + 2 (u_i + u_j) D1_ij``."""
    sysm = KdvSystem(grid)
    space = kdv_space(grid.n)
    u = space.coords()
    n = grid.n
    D1, D3 = sysm.D1_exact, sysm.D3_exact
    P1 = [[Polynomial.constant(space, D1[i][j]) for j in range(n)] for i in range(n)]
    P2 = [[(u[i] + u[j]) * (2 * D1[i][j]) + D3[i][j] if D1[i][j] else Polynomial.constant(space, D3[i][j])
           for j in range(n)] for i in range(n)]
    return full_anchor(Bivector(space, P1)), full_anchor(Bivector(space, P2))


def discrete_casimir_mass(grid: Grid) -> Polynomial:
    """``C(u) = h * sum u_i``."""
    space = kdv_space(grid.n)
    return sum(space.coords(), space.zero()) * grid.h_exact


# -- Lenard recursion ---------------------------------------------------------


@dataclass
class LenardStep:
    g: list | np.ndarray
    rhs: list | np.ndarray
    residual: float
    exact: bool


def _is_exact(*vectors) -> bool:
    return all(isinstance(v, (int, Fraction)) for vec in vectors for v in vec)


def lenard_step(system: KdvSystem, u: Sequence, g: Sequence, tol: float = 1e-9) -> LenardStep:
    """Solve ``D1 g_next = L(u) g`` with the minimum-norm solution.

    ``ker D1`` holds the constants and, for even N, the alternating vector; the
    returned solution has no component along either.  Rational inputs give an
    exact solve; floats go through the FFT.
    """
    n = system.n
    if _is_exact(u, g):
        L = system.L_exact(u)
        g = [Fraction(v) for v in g]
        r = [sum((L[i][j] * g[j] for j in range(n) if L[i][j] and g[j]), Fraction(0)) for i in range(n)]
        return _solve_exact(system, r)
    L = system.L(np.asarray(u, dtype=float))
    r = L @ np.asarray(g, dtype=float)
    return _solve_fft(system, r, tol)


def _solve_exact(system: KdvSystem, r: list[Fraction]) -> LenardStep:
    n, h = system.n, system.grid.h_exact
    mean = sum(r) / n
    alt = sum((v if i % 2 == 0 else -v) for i, v in enumerate(r)) / n if n % 2 == 0 else Fraction(0)
    if mean or alt:
        raise LenardError(mean, alt)
    # g_{j+2} - g_j = 2h r_{j+1}; walk each cycle of j -> j+2
    g = [None] * n
    for start in range(n):
        if g[start] is not None:
            continue
        chain = [start]
        g[start] = Fraction(0)
        j = start
        while (j + 2) % n != start:
            g[(j + 2) % n] = g[j] + 2 * h * r[(j + 1) % n]
            j = (j + 2) % n
            chain.append(j)
        m = sum(g[i] for i in chain) / len(chain)
        for i in chain:
            g[i] -= m
    D1 = system.D1_exact
    res = [sum(D1[i][j] * g[j] for j in range(n)) - r[i] for i in range(n)]
    if any(res):  # pragma: no cover - solvability was checked
        raise ArithmeticError("exact Lenard solve left a residual")
    return LenardStep(g, r, 0.0, True)


def _solve_fft(system: KdvSystem, r: np.ndarray, tol: float) -> LenardStep:
    n, h = system.n, system.grid.h
    scale = max(1.0, float(np.max(np.abs(r))))
    mean = float(np.mean(r))
    alt = float(np.mean(r * (-1.0) ** np.arange(n))) if n % 2 == 0 else 0.0
    if abs(mean) > tol * scale or abs(alt) > tol * scale:
        raise LenardError(mean, alt)
    rh = np.fft.fft(r)
    sym = 1j * np.sin(2 * np.pi * np.fft.fftfreq(n)) / h
    gh = np.zeros_like(rh)
    nz = np.abs(sym) > 1e-12 / h
    gh[nz] = rh[nz] / sym[nz]
    g = np.real(np.fft.ifft(gh))
    res = float(np.max(np.abs(system.apply_D1(g) - (r - mean - alt * (-1.0) ** np.arange(n)))))
    return LenardStep(g, r, res, False)


# -- time integration ---------------------------------------------------------


def _flow(system: KdvSystem, hamiltonian) -> tuple[Callable[[np.ndarray], np.ndarray], float]:
    """Vector field ``D1 delta H`` and the spectral radius of its linear part."""
    h = system.grid.h
    if hamiltonian == "energy":
        return system.rhs, 1 / h**3
    if hamiltonian == "momentum":
        return system.apply_D1, 1 / h
    if hamiltonian == "mass":
        return (lambda u: np.zeros_like(u)), 0.0
    if callable(hamiltonian):
        return (lambda u: system.apply_D1(hamiltonian(u))), 1 / h**3
    raise ValueError(f"unknown Hamiltonian {hamiltonian!r}")


@dataclass
class Trajectory:
    u0: np.ndarray
    u: np.ndarray
    dt: float
    steps: int
    drift: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"dt": self.dt, "steps": self.steps, "drift": dict(self.drift)}


def integrate(system: KdvSystem, u0, dt: float, steps: int, hamiltonian="energy",
              blowup: float = 1e6, check_cfl: bool = True) -> Trajectory:
    """Classical RK4 for ``u' = D1 delta H``; ``hamiltonian`` may be a callable returning ``delta H``."""
    if dt <= 0 or steps < 0:
        raise ValueError("need dt > 0 and steps >= 0")
    f, radius = _flow(system, hamiltonian)
    if check_cfl and radius and dt * radius > CFL_C:
        raise ValueError(f"dt = {dt} violates dt <= {CFL_C} * h^3 = {CFL_C / radius:.3e}")
    u0 = np.asarray(u0, dtype=float).copy()
    u = u0.copy()
    limit = blowup * (1 + float(np.max(np.abs(u0))))
    for step in range(steps):
        k1 = f(u)
        k2 = f(u + dt / 2 * k1)
        k3 = f(u + dt / 2 * k2)
        k4 = f(u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(u)) or float(np.max(np.abs(u))) > limit:
            raise IntegrationError(step + 1, "solution norm blew up")
    drift = {name: abs(getattr(system, name)(u) - getattr(system, name)(u0))
             for name in ("mass", "momentum", "energy")}
    return Trajectory(u0, u, dt, steps, drift)


def initial_profile(grid: Grid, name: str = "cos", amplitude: float = 1.0) -> np.ndarray:
    x = grid.x
    profiles = {
        "cos": np.cos(x),
        "sin": np.sin(x),
        "zero": np.zeros_like(x),
        "modes": np.cos(x) + 0.5 * np.sin(5 * x),
    }
    if name not in profiles:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(profiles)}")
    return amplitude * profiles[name]


def airy_error(n: int, eps: float = 1e-6, T: float = 1.0, cfl: float = 0.5) -> float:
    """Relative max error against ``eps cos(x - t)``, the solution of ``u_t = u_xxx``."""
    grid = Grid(n)
    system = KdvSystem(grid)
    steps = max(1, math.ceil(T / (cfl * grid.h**3)))
    dt = T / steps
    traj = integrate(system, eps * np.cos(grid.x), dt, steps)
    exact = eps * np.cos(grid.x - T)
    return float(np.max(np.abs(traj.u - exact))) / eps


def convergence_orders(values: Sequence[float], ratio: float = 2.0) -> list[float]:
    """Empirical orders ``log_ratio(e_i / e_{i+1})``; nan where an error is zero."""
    out = []
    for a, b in zip(values, values[1:]):
        out.append(math.log(a / b, ratio) if a > 0 and b > 0 else math.nan)
    return out


# -- Jacobiator of the second operator -----------------------------------------


def trilinear_jacobiator(system: KdvSystem, u: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray,
                         coupling: float = 2.0) -> float:
    """Cyclic ``<L_{P a} b, P c>`` for constant covectors, with ``P = D3 + coupling (u_i + u_j) D1``.

    Only the ``u``-linear part is differentiated, so ``coupling = 0`` (a
    constant operator) gives exactly zero.
    """
    P = system.D3 + coupling * (u[:, None] + u[None, :]) * system.D1
    D1 = system.D1

    def term(x, y, z):
        w = P.T @ z  # components of P z
        return coupling * (float((x * w) @ (D1 @ y)) + float(x @ (D1 @ (w * y))))

    return term(a, b, c) + term(b, c, a) + term(c, a, b)


@dataclass
class RefinementRow:
    n: int
    p1: float
    p2: float
    order: float | None = None


def default_profiles(grid: Grid):
    x = grid.x
    u = np.cos(x) + 0.5 * np.sin(2 * x)
    return u, np.sin(x), np.cos(2 * x), np.sin(3 * x) + np.cos(x)


def jacobiator_refinement_study(ns: Sequence[int]) -> list[RefinementRow]:
    """Continuum-normalized Jacobiator magnitudes of P1 and P2 on fixed smooth data.

    Covectors are ``h * phi(x_i)`` (differentials of linear functionals) and
    the operators are divided by ``h``, so each value approximates the
    continuum trilinear form; the factor is ``h`` overall.
    """
    rows = []
    for n in ns:
        if n < 8:
            raise ValueError("refinement study needs N >= 8")
        grid = Grid(n)
        system = KdvSystem(grid)
        u, a, b, c = default_profiles(grid)
        h = grid.h
        p1 = abs(trilinear_jacobiator(system, u, a, b, c, coupling=0.0)) * h
        p2 = abs(trilinear_jacobiator(system, u, a, b, c)) * h
        rows.append(RefinementRow(n, p1, p2))
    for prev, row in zip(rows, rows[1:]):
        if prev.p2 > 0 and row.p2 > 0:
            row.order = math.log(prev.p2 / row.p2, row.n / prev.n)
    return rows

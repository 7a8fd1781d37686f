"""Degree-k Lagrange finite elements on (0, L) with homogeneous Dirichlet conditions.

Unknowns are the interior nodal values, numbered left to right, so the mass
and stiffness matrices are banded with half-bandwidth k. Matrices are kept in
LAPACK upper banded storage for Cholesky and as CSR for products.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

__all__ = ["FemSpace", "build_space"]


def _reference_basis(k: int):
    """Coefficient matrix C with phi_i(s) = sum_m C[m, i] s^m on equispaced nodes of [-1, 1]."""
    nodes = np.linspace(-1.0, 1.0, k + 1)
    vander = np.vander(nodes, k + 1, increasing=True)
    return np.linalg.solve(vander, np.eye(k + 1))


def _tabulate(coef: np.ndarray, s: np.ndarray):
    k = coef.shape[0] - 1
    powers = np.vander(s, k + 1, increasing=True)
    dpowers = np.zeros_like(powers)
    dpowers[:, 1:] = powers[:, :-1] * np.arange(1, k + 1)
    return powers @ coef, dpowers @ coef


@dataclass(frozen=True, eq=False)
class FemSpace:
    L: float
    M: int
    k: int
    h: float
    nodes: np.ndarray = field(repr=False)
    mass_banded: np.ndarray = field(repr=False)
    stiffness_banded: np.ndarray = field(repr=False)
    mass: scipy.sparse.csr_matrix = field(repr=False)
    stiffness: scipy.sparse.csr_matrix = field(repr=False)
    _coef: np.ndarray = field(repr=False)
    _factors: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def ndof(self) -> int:
        return self.M * self.k - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    # -- quadrature helpers -------------------------------------------------

    def _element_quadrature(self, npts: int):
        """Physical points (M, npts), weights (npts,), basis values and derivatives."""
        s, w = np.polynomial.legendre.leggauss(npts)
        phi, dphi = _tabulate(self._coef, s)
        left = np.arange(self.M) * self.h
        x = left[:, None] + (s[None, :] + 1.0) * (0.5 * self.h)
        return x, w * (0.5 * self.h), phi, dphi * (2.0 / self.h)

    def _scatter(self, local: np.ndarray) -> np.ndarray:
        """Sum per-element vectors (M, k+1) into the interior unknown vector."""
        full = np.zeros(self.M * self.k + 1)
        for i in range(self.k + 1):
            full[i : i + self.M * self.k : self.k] += local[:, i]
        return full[1:-1]

    def _gather(self, coeffs: np.ndarray) -> np.ndarray:
        """Element-local nodal values (M, k+1) from interior coefficients."""
        full = np.zeros(self.M * self.k + 1)
        full[1:-1] = coeffs
        idx = np.arange(self.M)[:, None] * self.k + np.arange(self.k + 1)[None, :]
        return full[idx]

    # -- operators ----------------------------------------------------------

    def load_vector(self, f, npts: int | None = None) -> np.ndarray:
        """b_i = int f phi_i dx; ``f`` must accept an array of points."""
        npts = npts or self.k + 3
        x, w, phi, _ = self._element_quadrature(npts)
        fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
        return self._scatter((fx * w) @ phi)

    def l2_project(self, f) -> np.ndarray:
        """Coefficients of P_h f, solving mass c = (f, phi_i)."""
        return self.solve_mass(self.load_vector(f))

    def ritz_rhs(self, v_prime) -> np.ndarray:
        """(v', phi_i') by quadrature; equals stiffness @ R_h v without the cancellation."""
        x, w, _, dphi = self._element_quadrature(self.k + 3)
        dv = np.broadcast_to(np.asarray(v_prime(x), dtype=float), x.shape)
        return self._scatter((dv * w) @ dphi)

    def ritz_project(self, v, v_prime) -> np.ndarray:
        """Coefficients of R_h v, solving stiffness c = (v', phi_i')."""
        del v  # only the derivative enters the weak form
        return self.solve_shifted(0.0, self.ritz_rhs(v_prime))

    def solve_mass(self, rhs: np.ndarray, refine: int = 1) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        x = self._solve(("mass",), self.mass_banded, rhs)
        for _ in range(refine):
            x = x + self._solve(("mass",), self.mass_banded, rhs - self.mass @ x)
        return x

    def solve_shifted(self, lam: float, rhs: np.ndarray, refine: int = 2) -> np.ndarray:
        """Solve (lam * mass + stiffness) x = rhs by banded Cholesky, cached per lam.

        ``refine`` rounds of iterative refinement follow the solve. For k = 5
        at M = 100 a bare solve leaves ~1e-11 of rounding in the smooth modes,
        which is visible in sixth-order time stepping.
        """
        if lam < 0:
            raise ValueError("shift must be nonnegative")
        lam = float(lam)
        rhs = np.asarray(rhs, dtype=float)
        x = self._solve(("shift", lam), None, rhs, lam=lam)
        for _ in range(refine):
            r = rhs - (lam * (self.mass @ x) + self.stiffness @ x)
            x = x + self._solve(("shift", lam), None, r, lam=lam)
        return x

    def _solve(self, key, banded, rhs, lam=None):
        factor = self._factors.get(key)
        if factor is None:
            with self._lock:
                factor = self._factors.get(key)
                if factor is None:
                    if banded is None:
                        banded = lam * self.mass_banded + self.stiffness_banded
                    factor = scipy.linalg.cholesky_banded(banded, lower=False)
                    self._factors[key] = factor
        return scipy.linalg.cho_solve_banded((factor, False), np.asarray(rhs, dtype=float))

    def interpolate(self, f) -> np.ndarray:
        return np.asarray(f(self.interior_nodes), dtype=float)

    def evaluate(self, coeffs: np.ndarray, x) -> np.ndarray:
        """Point values of the finite element function at ``x`` in [0, L]."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        elem = np.clip((x // self.h).astype(int), 0, self.M - 1)
        s = 2.0 * (x - elem * self.h) / self.h - 1.0
        phi, _ = _tabulate(self._coef, s)
        local = self._gather(coeffs)[elem]
        return np.sum(phi * local, axis=1)

    def l2_error(self, coeffs: np.ndarray, exact) -> float:
        """||u_h - exact||_{L2(0,L)} by (k+3)-point Gauss quadrature per element."""
        x, w, phi, _ = self._element_quadrature(self.k + 3)
        uh = self._gather(coeffs) @ phi.T
        diff = uh - np.broadcast_to(np.asarray(exact(x), dtype=float), x.shape)
        return float(np.sqrt(np.sum((diff**2) @ w)))


def _assemble(local: np.ndarray, M: int, k: int):
    n = M * k - 1
    ab = np.zeros((k + 1, n))
    rows, cols, vals = [], [], []
    for e in range(M):
        for i in range(k + 1):
            gi = e * k + i - 1
            if not 0 <= gi < n:
                continue
            for j in range(k + 1):
                gj = e * k + j - 1
                if not 0 <= gj < n:
                    continue
                rows.append(gi)
                cols.append(gj)
                vals.append(local[i, j])
                if gj >= gi:
                    ab[k + gi - gj, gj] += local[i, j]
    mat = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return ab, mat


def build_space(L: float, M: int, k: int, nquad: int | None = None) -> FemSpace:
    """Uniform mesh of M elements of width L/M with degree-k Lagrange elements.

    Element matrices use ``nquad`` Gauss-Legendre points (default k+1, which is
    exact for the degree-2k mass integrand).
    """
    if not L > 0:
        raise ValueError("domain length must be positive")
    if int(M) != M or M < 2:
        raise ValueError("need at least two elements")
    if int(k) != k or not 1 <= k <= 5:
        raise ValueError(f"polynomial degree must be in [1, 5], got {k}")
    M, k = int(M), int(k)
    h = L / M
    coef = _reference_basis(k)
    npts = nquad or k + 1
    s, w = np.polynomial.legendre.leggauss(npts)
    phi, dphi = _tabulate(coef, s)
    local_mass = (phi * w[:, None]).T @ phi * (0.5 * h)
    local_stiff = (dphi * w[:, None]).T @ dphi * (2.0 / h)
    local_mass = 0.5 * (local_mass + local_mass.T)
    local_stiff = 0.5 * (local_stiff + local_stiff.T)
    mass_ab, mass = _assemble(local_mass, M, k)
    stiff_ab, stiff = _assemble(local_stiff, M, k)
    nodes = np.linspace(0.0, L, M * k + 1)
    for arr in (nodes, mass_ab, stiff_ab):
        arr.flags.writeable = False
    return FemSpace(float(L), M, k, h, nodes, mass_ab, stiff_ab, mass, stiff, coef)

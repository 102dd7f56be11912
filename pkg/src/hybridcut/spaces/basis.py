"""Reference element bases: tensor Lagrange Q_p on squares, total-degree P_p
on triangles, with mixed partial derivatives of arbitrary order.

Q_p lives on [-1, 1]^2 with equispaced nodes ordered row major (eta outer,
xi inner). P_p lives on the unit triangle {x >= 0, y >= 0, x + y <= 1} with
the standard equispaced lattice, ordered j outer, i inner.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial


@lru_cache(maxsize=None)
def _lagrange_1d_coeffs(p: int, deriv: int) -> tuple:
    """Monomial coefficients of the derivatives of the 1D Lagrange basis on
    equispaced nodes in [-1, 1]."""
    nodes = np.linspace(-1.0, 1.0, p + 1) if p > 0 else np.array([0.0])
    polys = []
    for i in range(p + 1):
        others = np.delete(nodes, i)
        poly = Polynomial.fromroots(others) / np.prod(nodes[i] - others) if p > 0 else Polynomial([1.0])
        polys.append(poly.deriv(deriv) if deriv > 0 else poly)
    return tuple(polys)


def eval_lagrange_1d(p: int, deriv: int, x: np.ndarray) -> np.ndarray:
    """Table of the deriv-th derivative of all p+1 basis polynomials, shape
    (len(x), p+1)."""
    x = np.asarray(x, dtype=float)
    polys = _lagrange_1d_coeffs(p, deriv)
    return np.column_stack([poly(x) for poly in polys])


def _triangle_lattice(p: int) -> list[tuple[int, int]]:
    return [(i, j) for j in range(p + 1) for i in range(p + 1 - j)]


@lru_cache(maxsize=None)
def _triangle_coeff_matrix(p: int) -> tuple[np.ndarray, tuple]:
    """Inverse Vandermonde for P_p on the unit triangle: columns are basis
    functions in the monomial basis x^a y^b, a + b <= p."""
    lattice = _triangle_lattice(p)
    exps = tuple((a, b) for b in range(p + 1) for a in range(p + 1 - b))
    nodes = np.array([(i / p, j / p) for i, j in lattice]) if p > 0 else np.zeros((1, 2))
    V = np.empty((len(nodes), len(exps)))
    for t, (a, b) in enumerate(exps):
        V[:, t] = nodes[:, 0] ** a * nodes[:, 1] ** b
    return np.linalg.inv(V), exps


def _monomial_table(points: np.ndarray, exps, dx: int, dy: int) -> np.ndarray:
    """Mixed partials of the monomials x^a y^b at the given points."""
    x, y = points[:, 0], points[:, 1]
    out = np.zeros((len(points), len(exps)))
    for t, (a, b) in enumerate(exps):
        if a < dx or b < dy:
            continue
        cx = np.prod(np.arange(a, a - dx, -1), dtype=float) if dx else 1.0
        cy = np.prod(np.arange(b, b - dy, -1), dtype=float) if dy else 1.0
        out[:, t] = cx * cy * x ** (a - dx) * y ** (b - dy)
    return out


@dataclass(frozen=True)
class ElementBasis:
    """Scalar Lagrange basis on the reference square or triangle."""

    family: str  # 'Q' or 'P'
    degree: int

    def __post_init__(self):
        if self.family not in ("Q", "P"):
            raise ValueError(f"unsupported element family {self.family!r}")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    @property
    def n_basis(self) -> int:
        p = self.degree
        return (p + 1) ** 2 if self.family == "Q" else (p + 1) * (p + 2) // 2

    @property
    def nodes_ref(self) -> np.ndarray:
        p = self.degree
        if self.family == "Q":
            t = np.linspace(-1.0, 1.0, p + 1)
            return np.array([(xi, eta) for eta in t for xi in t])
        return np.array([(i / p, j / p) for i, j in _triangle_lattice(p)])

    def eval_ref(self, points: np.ndarray, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Mixed partial d^dx/dxi^dx d^dy/deta^dy of every basis function at
        reference points; shape (npts, n_basis)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        p = self.degree
        if self.family == "Q":
            tx = eval_lagrange_1d(p, dx, points[:, 0])
            ty = eval_lagrange_1d(p, dy, points[:, 1])
            return (ty[:, :, None] * tx[:, None, :]).reshape(len(points), -1)
        cmat, exps = _triangle_coeff_matrix(p)
        return _monomial_table(points, exps, dx, dy) @ cmat

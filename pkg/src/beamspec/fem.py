"""Independent finite-element eigenvalue oracle (cubic Hermite elements).

Conforming C1 cubic Hermite elements on a uniform mesh per span, two DOFs
(u, u') per node.  The node at x = 0 is shared, so continuity of u and u'
across the joint is built in; moment continuity and moment-free ends are
natural conditions of the weak form.  The point mass enters as a single
addition of M to the diagonal mass-matrix entry of the joint displacement
DOF.  Hinged supports remove the displacement DOFs at x = -1 and x = +1.

The discrete problem is the symmetric-definite pencil K a = lam B a with

    K[i,j] = int sigma phi_i'' phi_j'' + int q phi_i' phi_j'
    B[i,j] = int rho  phi_i  phi_j     (+ M at the joint displacement DOF)

solved densely by Cholesky reduction to a standard symmetric eigenproblem.
Eigenvalues converge at fourth order in the mesh size, so two meshes give a
Richardson-extrapolated reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh

from .config import horner

_GAUSS_NODES, _GAUSS_WEIGHTS = leggauss(5)


class DefinitenessError(RuntimeError):
    """The assembled mass matrix failed its positive-definiteness check."""


@dataclass(frozen=True)
class DiscreteOperator:
    """Assembled constrained matrices and DOF bookkeeping."""

    elements_per_side: int
    stiffness: np.ndarray
    mass_matrix: np.ndarray
    node_x: np.ndarray
    joint_dof: int       # index of the x=0 displacement DOF after constraints


@dataclass(frozen=True)
class OracleSpectrum:
    """Ascending discrete eigenvalues with their B-orthonormal vectors."""

    values: np.ndarray
    vectors: np.ndarray
    elements_per_side: int


def _shape_functions(h, g):
    """Hermite cubics and derivatives at local coordinate g in [0, 1]."""
    n = np.array([
        1 - 3 * g ** 2 + 2 * g ** 3,
        h * (g - 2 * g ** 2 + g ** 3),
        3 * g ** 2 - 2 * g ** 3,
        h * (-g ** 2 + g ** 3),
    ])
    dn = np.array([
        (-6 * g + 6 * g ** 2) / h,
        1 - 4 * g + 3 * g ** 2,
        (6 * g - 6 * g ** 2) / h,
        -2 * g + 3 * g ** 2,
    ])
    ddn = np.array([
        (-6 + 12 * g) / h ** 2,
        (-4 + 6 * g) / h,
        (6 - 12 * g) / h ** 2,
        (-2 + 6 * g) / h,
    ])
    return n, dn, ddn


def _element_matrices(profile, x0, x1):
    h = x1 - x0
    k_e = np.zeros((4, 4))
    b_e = np.zeros((4, 4))
    for node, weight in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
        g = 0.5 * (node + 1.0)
        x = x0 + h * g
        w = 0.5 * h * weight
        sig = horner(profile.sigma, x)
        q = max(horner(profile.q, x), 0.0)
        rho = horner(profile.rho, x)
        n, dn, ddn = _shape_functions(h, g)
        k_e += w * (sig * np.outer(ddn, ddn) + q * np.outer(dn, dn))
        b_e += w * rho * np.outer(n, n)
    return k_e, b_e


def assemble(system, elements_per_side):
    """Assemble the constrained stiffness and mass matrices."""
    if elements_per_side < 4:
        raise ValueError("need at least 4 elements per side")
    e = elements_per_side
    nodes = np.concatenate([np.linspace(-1.0, 0.0, e + 1),
                            np.linspace(0.0, 1.0, e + 1)[1:]])
    n_nodes = len(nodes)
    ndof = 2 * n_nodes
    stiffness = np.zeros((ndof, ndof))
    mass = np.zeros((ndof, ndof))
    for el in range(2 * e):
        profile = system.left if el < e else system.right
        i = el
        dofs = [2 * i, 2 * i + 1, 2 * (i + 1), 2 * (i + 1) + 1]
        k_e, b_e = _element_matrices(profile, nodes[i], nodes[i + 1])
        idx = np.ix_(dofs, dofs)
        stiffness[idx] += k_e
        mass[idx] += b_e
    joint_node = e
    mass[2 * joint_node, 2 * joint_node] += system.mass

    # hinged ends: displacement DOFs at x = -1 and x = +1 removed
    removed = {0, 2 * (n_nodes - 1)}
    keep = [d for d in range(ndof) if d not in removed]
    kk = stiffness[np.ix_(keep, keep)]
    bb = mass[np.ix_(keep, keep)]
    joint_dof = keep.index(2 * joint_node)

    if not np.allclose(kk, kk.T, rtol=0, atol=1e-12 * np.max(np.abs(kk))):
        raise DefinitenessError("stiffness matrix is not symmetric")
    if not np.allclose(bb, bb.T, rtol=0, atol=1e-12 * np.max(np.abs(bb))):
        raise DefinitenessError("mass matrix is not symmetric")
    try:
        np.linalg.cholesky(bb)
    except np.linalg.LinAlgError as exc:
        raise DefinitenessError("mass matrix is not positive definite") from exc

    return DiscreteOperator(
        elements_per_side=e,
        stiffness=kk,
        mass_matrix=bb,
        node_x=nodes,
        joint_dof=joint_dof,
    )


def solve_generalized(op, count):
    """Lowest `count` eigenvalues of K a = lam B a (dense symmetric solve).

    Solved through the inverted pencil B a = (1/lam) K a (Cholesky reduction
    on K): the wanted low modes are then the largest eigenvalues of the
    reduced problem, so their absolute rounding error scales with eps*lam**2
    instead of eps*lam_max of the stiffness-side reduction (which would
    drown the fine-mesh discretization error of the first mode).
    """
    dim = op.stiffness.shape[0]
    if not 1 <= count <= dim:
        raise ValueError(f"count must lie in [1, {dim}]")
    try:
        mu, vectors = eigh(op.mass_matrix, op.stiffness)
    except np.linalg.LinAlgError as exc:
        raise DefinitenessError(f"generalized eigensolve failed: {exc}") from exc
    # mu ascending = lam descending; keep the last `count`, smallest lam first
    mu = mu[::-1][:count]
    vectors = vectors[:, ::-1][:, :count]
    if np.any(mu <= 0):
        raise RuntimeError("discrete eigenvalues must be positive")
    values = 1.0 / mu
    if np.any(np.diff(values) < 0):
        raise RuntimeError("discrete eigenvalues must be ascending")
    # eigh(B, K) returns K-orthonormal vectors; rescale to B-orthonormal
    vectors = vectors / np.sqrt(mu)
    return OracleSpectrum(values=values, vectors=vectors,
                          elements_per_side=op.elements_per_side)


@dataclass(frozen=True)
class ComparisonRow:
    index: int
    shooting: float
    oracle_coarse: float
    oracle_fine: float
    richardson: float
    rel_error_coarse: float
    rel_error_richardson: float
    order: float


def compare(shooting, coarse, fine):
    """Per-index comparison table with Richardson extrapolation.

    `shooting` is the list of reference eigenvalues; `coarse` and `fine` are
    oracle spectra on two meshes (fine typically doubles the element count).
    The observed order uses the shooting values as the converged reference
    and should sit near 4 for these smooth coefficients.
    """
    n = len(shooting)
    if len(coarse.values) < n or len(fine.values) < n:
        raise ValueError("oracle spectra shorter than the shooting list")
    ratio = (fine.elements_per_side / coarse.elements_per_side) ** 4
    rows = []
    for i in range(n):
        lam_s = shooting[i]
        lam_c = float(coarse.values[i])
        lam_f = float(fine.values[i])
        rich = (ratio * lam_f - lam_c) / (ratio - 1.0)
        err_c = abs(lam_c - lam_s)
        err_f = abs(lam_f - lam_s)
        if err_f > 0 and err_c > 0:
            order = math.log(err_c / err_f) / math.log(
                fine.elements_per_side / coarse.elements_per_side)
        else:
            order = math.inf
        rows.append(ComparisonRow(
            index=i + 1,
            shooting=lam_s,
            oracle_coarse=lam_c,
            oracle_fine=lam_f,
            richardson=rich,
            rel_error_coarse=abs(lam_c - lam_s) / abs(lam_s),
            rel_error_richardson=abs(rich - lam_s) / abs(lam_s),
            order=order,
        ))
    return rows

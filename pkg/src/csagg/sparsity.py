"""Compile L1 recovery formulations into standard-form LPs and decode back.

Three priors are supported for recovering a length-n signal X from k linear
measurements Y = A X:

  * basis:     minimize ||phi X||_1        (sparsity in a transform basis)
  * pairwise:  minimize sum_{ij in E} |x_i - x_j|   (neighbors move alike)
  * laplacian: minimize ||L X||_1 with L the graph Laplacian of E

Every builder produces an LpProblem whose variable layout starts with
[X+(n), X-(n), delta(...)] followed by slack variables, so decode_solution
reads X = X+ - X- from the first 2n entries regardless of the prior.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError
from .linalg import LpProblem, LpSolution, LpStatus

EdgeList = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Measurement:
    """Received linear system: values = matrix @ X for the true signal X."""

    matrix: np.ndarray  # (k, n)
    values: np.ndarray  # (k,)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        y = np.asarray(self.values, dtype=float)
        if a.shape[0] != y.shape[0]:
            raise DimensionError(
                f"{a.shape[0]} measurement rows but {y.shape[0]} values"
            )
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "values", y)

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @property
    def k(self) -> int:
        return self.matrix.shape[0]


class FormulationKind(Enum):
    BASIS_L1 = "basis-l1"
    PAIRWISE_L1 = "pairwise-l1"
    LAPLACIAN_L1 = "laplacian-l1"


@dataclass(frozen=True)
class CsFormulation:
    """Dispatch record: which prior to use and its parameters."""

    kind: FormulationKind
    basis: np.ndarray | None = None
    edges: EdgeList | None = None

    def build(self, meas: Measurement) -> LpProblem:
        if self.kind is FormulationKind.BASIS_L1:
            if self.basis is None:
                raise DimensionError("basis formulation requires a basis matrix")
            return build_basis_l1(meas, self.basis)
        if self.kind is FormulationKind.PAIRWISE_L1:
            return build_pairwise_l1(meas, self.edges or ())
        return build_laplacian_l1(meas, self.edges or ())


def _check_edges(edges: EdgeList, n: int) -> EdgeList:
    edges = tuple((int(i), int(j)) for i, j in edges)
    if not edges:
        raise DimensionError("edge list is empty: the objective would be void")
    seen = set()
    for i, j in edges:
        if not (0 <= i < j < n):
            raise DimensionError(f"edge ({i},{j}) invalid for n={n}")
        if (i, j) in seen:
            raise DimensionError(f"duplicate edge ({i},{j})")
        seen.add((i, j))
    return edges


def _abs_bound_lp(meas: Measurement, t: np.ndarray) -> LpProblem:
    """LP: min 1.delta  s.t.  Y = AX, -delta <= T X <= delta, delta >= 0.

    T is the (p, n) operator whose componentwise absolute value is being
    minimized. Variables: [X+(n), X-(n), delta(p), slack(2p)].
    """
    a, y = meas.matrix, meas.values
    k, n = a.shape
    p = t.shape[0]
    nv = 2 * n + p + 2 * p
    g = np.zeros((k + 2 * p, nv))
    g[:k, :n] = a
    g[:k, n : 2 * n] = -a
    # T X - delta + s1 = 0  and  -T X - delta + s2 = 0
    g[k : k + p, :n] = t
    g[k : k + p, n : 2 * n] = -t
    g[k + p :, :n] = -t
    g[k + p :, n : 2 * n] = t
    rows = np.arange(p)
    g[k + rows, 2 * n + rows] = -1.0
    g[k + p + rows, 2 * n + rows] = -1.0
    g[k + rows, 2 * n + p + rows] = 1.0
    g[k + p + rows, 2 * n + 2 * p + rows] = 1.0
    h = np.zeros(k + 2 * p)
    h[:k] = y
    c = np.zeros(nv)
    c[2 * n : 2 * n + p] = 1.0
    return LpProblem(objective=c, eq_matrix=g, eq_rhs=h)


def build_basis_l1(meas: Measurement, basis: np.ndarray) -> LpProblem:
    """min ||basis @ X||_1 subject to the measurements."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    n = meas.n
    if basis.shape != (n, n):
        raise DimensionError(f"basis is {basis.shape}, expected ({n}, {n})")
    return _abs_bound_lp(meas, basis)


def pairwise_difference_operator(edges: EdgeList, n: int) -> np.ndarray:
    """(|E|, n) operator mapping X to (x_i - x_j) over the edges, i < j."""
    edges = _check_edges(edges, n)
    t = np.zeros((len(edges), n))
    for e, (i, j) in enumerate(edges):
        t[e, i] = 1.0
        t[e, j] = -1.0
    return t


def build_pairwise_l1(meas: Measurement, edges: EdgeList) -> LpProblem:
    """min sum over edges of |x_i - x_j| subject to the measurements."""
    return _abs_bound_lp(meas, pairwise_difference_operator(edges, meas.n))


def build_laplacian_l1(meas: Measurement, edges: EdgeList) -> LpProblem:
    """min ||L X||_1 with L the graph Laplacian of the edge set."""
    from .graph import NeighborGraph, laplacian

    edges = _check_edges(edges, meas.n)
    lap = laplacian(NeighborGraph(n=meas.n, edges=edges))
    return _abs_bound_lp(meas, lap)


def decode_solution(sol: LpSolution, n: int) -> np.ndarray:
    """Extract X = X+ - X- from an optimal builder solution."""
    if sol.status is not LpStatus.OPTIMAL:
        raise ValueError(f"cannot decode a {sol.status.value} solution")
    if sol.values is None or sol.values.shape[0] < 2 * n:
        raise DimensionError("solution vector shorter than 2n")
    return sol.values[:n] - sol.values[n : 2 * n]

"""Sparse neighbor graphs and kernel interaction matrices.

All pair enumeration exploits the 2*delta interaction radius through a
KD-tree, so assembly cost stays O(n * (delta/h)^dim).
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .kernels import ProfileKind, RescaledKernel


def neighbor_graph(pts: np.ndarray, cutoff: float):
    """All ordered pairs (i, j) with |x_i - x_j| <= cutoff, including i == j.

    Returns (rows, cols, dist2) index arrays plus squared distances.
    """
    n = pts.shape[0]
    tree = cKDTree(pts)
    pairs = tree.query_pairs(cutoff, output_type="ndarray")
    diag = np.arange(n, dtype=pairs.dtype if pairs.size else np.intp)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1], diag])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0], diag])
    dist2 = np.sum((pts[rows] - pts[cols]) ** 2, axis=1)
    return rows, cols, dist2


def cross_graph(pts_a: np.ndarray, pts_b: np.ndarray, cutoff: float):
    """Ordered pairs (i, j) across two point sets with |a_i - b_j| <= cutoff."""
    tree_a = cKDTree(pts_a)
    tree_b = cKDTree(pts_b)
    coo = tree_a.sparse_distance_matrix(tree_b, cutoff, output_type="coo_matrix")
    dist2 = np.sum((pts_a[coo.row] - pts_b[coo.col]) ** 2, axis=1)
    return coo.row, coo.col, dist2


def kernel_matrix(
    kernel: RescaledKernel,
    kind: ProfileKind,
    rows: np.ndarray,
    cols: np.ndarray,
    dist2: np.ndarray,
    shape: tuple[int, int],
    col_weights: np.ndarray | None = None,
) -> sparse.csr_matrix:
    """CSR matrix of kernel values on a precomputed pair graph.

    With ``col_weights`` the entries are K(x_i, y_j) * w_j, i.e. the matrix
    applies one quadrature sum per row.
    """
    vals = kernel.eval_dist2(kind, dist2)
    if col_weights is not None:
        vals = vals * col_weights[cols]
    mat = sparse.coo_matrix((vals, (rows, cols)), shape=shape)
    return mat.tocsr()

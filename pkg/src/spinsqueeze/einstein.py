"""Diffusion coefficients of collective atomic Langevin forces.

Single-atom operators are represented by their coefficient matrices over
the basis of elementary transitions |i><j| (an operator sum_ij M[i, j]
|i><j| is stored as the matrix M), so operator products are ordinary
matrix products and expectation values are sums against the single-atom
mean matrix m[i, j] = <|i><j|>.

For delta-correlated Langevin forces the correlation coefficients follow
from the drift alone (generalized Einstein relation).  Evaluated at a
steady state the time-derivative term drops and

    <F_a F_b†> = - <A_a x_b†> - <x_a A_b†>,

where A_a is the deterministic part of dx_a/dt with cavity-field
operators replaced by their mean values (equal-time field and atomic
fluctuations are uncorrelated, so the replacement is exact here).
Collective coefficients are N times the single-atom ones.
"""

import numpy as np


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """Coefficient matrix of the elementary transition |i><j|."""
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def expectation(op: np.ndarray, means: np.ndarray) -> complex:
    """Mean of an operator given its coefficient matrix."""
    return complex((op * means).sum())


def diffusion_matrix(word_ops, drift_ops, adjoint, means) -> np.ndarray:
    """Single-atom diffusion matrix D[a, b] = <F_a F_b†> at a steady state.

    ``word_ops``: coefficient matrices of the fluctuation variables.
    ``drift_ops``: coefficient matrices of their drifts (constant terms
    enter as c * identity).  ``adjoint``: index of each variable's adjoint
    partner.  ``means``: single-atom mean matrix, means[i, j] = <|i><j|>.
    """
    k = len(word_ops)
    if len(drift_ops) != k or len(adjoint) != k:
        raise ValueError("word_ops, drift_ops and adjoint must have equal length")
    D = np.empty((k, k), dtype=complex)
    for a in range(k):
        for b in range(k):
            x_badj = word_ops[adjoint[b]]
            a_badj = drift_ops[adjoint[b]]
            D[a, b] = -expectation(drift_ops[a] @ x_badj, means) - expectation(
                word_ops[a] @ a_badj, means
            )
    return D

"""Connection coefficients of the adapted orthonormal frame.

On the total space the metric is g = phi^-1 eta^2 + phi g_R3.  The adapted
orthonormal frame is e_0 = phi^(1/2) xi (xi the circle generator, eta(xi)=1)
and e_i = phi^(-1/2) d/dx_i for i = 1..3.  All covariant derivatives
nabla_{e_a} e_b are linear in the first derivatives of phi with the common
prefactor 1/(2 phi^(3/2)):

    nabla_{e_0} e_0 =  s * sum_i  d_i phi e_i
    nabla_{e_i} e_0 = -s * sum_jk eps_ijk d_j phi e_k
    nabla_{e_0} e_i = -s * (d_i phi e_0 + sum_jk eps_ijk d_j phi e_k)
    nabla_{e_i} e_j =  s * (d_j phi e_i - sum_k (eps_ijk d_k phi e_0
                                                 + delta_ij d_k phi e_k))

with s = 1/(2 phi^(3/2)).  The coefficients are returned as the array
gamma[a, b, c] = <nabla_{e_a} e_b, e_c>, antisymmetric in (b, c).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .potential import PointConfiguration, phi_jet

__all__ = ["ConnectionCoefficients", "connection_coefficients", "levi_civita"]


def levi_civita(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol eps_ijk on indices 1..3 (0 on repeats)."""
    return (i - j) * (j - k) * (k - i) // 2


@dataclass(frozen=True)
class ConnectionCoefficients:
    """gamma[a, b, c] = <nabla_{e_a} e_b, e_c> in the adapted frame.

    Index 0 is the fibre direction e_0 = phi^(1/2) xi; indices 1..3 are the
    horizontal lifts e_i = phi^(-1/2) d/dx_i.
    """

    gamma: np.ndarray  # (4, 4, 4)

    def __getitem__(self, abc: tuple[int, int, int]) -> float:
        a, b, c = abc
        return float(self.gamma[a, b, c])


def connection_coefficients(config: PointConfiguration, x: Sequence[float]) -> ConnectionCoefficients:
    """Evaluate all frame connection coefficients at a non-singular point."""
    jet = phi_jet(config, x)
    dphi = jet.gradient
    s = 0.5 / jet.value ** 1.5
    gamma = np.zeros((4, 4, 4))
    # curl-type block shared by nabla_{e_i} e_0 and the e_0 row:
    # A[i, k] = sum_j eps_ijk d_j phi  (antisymmetric)
    A = np.zeros((3, 3))
    for i in range(1, 4):
        for k in range(1, 4):
            acc = 0.0
            for j in range(1, 4):
                e = levi_civita(i, j, k)
                if e:
                    acc += e * dphi[j - 1]
            A[i - 1, k - 1] = acc
    for i in range(1, 4):
        gamma[0, 0, i] = s * dphi[i - 1]
        gamma[0, i, 0] = -s * dphi[i - 1]
        for k in range(1, 4):
            gamma[i, 0, k] = -s * A[i - 1, k - 1]
            gamma[0, i, k] = -s * A[i - 1, k - 1]
            gamma[i, k, 0] = s * A[i - 1, k - 1]
            for j in range(1, 4):
                # <nabla_{e_i} e_j, e_k> = s (d_j phi delta_ik - delta_ij d_k phi)
                gamma[i, j, k] = s * (
                    dphi[j - 1] * (1.0 if i == k else 0.0)
                    - (1.0 if i == j else 0.0) * dphi[k - 1]
                )
    gamma.setflags(write=False)
    return ConnectionCoefficients(gamma)

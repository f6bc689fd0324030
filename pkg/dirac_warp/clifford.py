"""
Fixed Dirac/Pauli matrix algebra in the standard (Dirac) representation.

    beta = gamma^0 = diag(I2, -I2),  alpha^j = [[0, sigma_j], [sigma_j, 0]],
    gamma^j = gamma^0 alpha^j

All entries are in {0, +-1, +-i} (or halves of them for the permutation
rotation), so every identity below is checked with exact equality.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from glogger import get_component_logger

from .decorators.cache import dynamic_cached
from .exceptions import InternalError
from .manifold import WarpFunction

logger = get_component_logger("clifford")

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    matrix.setflags(write=False)
    return matrix


SIGMA = (
    _frozen(np.eye(2)),
    _frozen([[0, 1], [1, 0]]),
    _frozen([[0, -1j], [1j, 0]]),
    _frozen([[1, 0], [0, -1]]),
)


def _block(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    return np.block([[a, b], [c, d]])


@dataclass(frozen=True)
class StandardMatrices:
    gamma: Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    alpha: Tuple[np.ndarray, np.ndarray, np.ndarray]
    beta: np.ndarray
    sigma: Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    def as_dict(self) -> Dict[str, np.ndarray]:
        named = {f"gamma{i}": g for i, g in enumerate(self.gamma)}
        named.update({f"alpha{i + 1}": a for i, a in enumerate(self.alpha)})
        named["beta"] = self.beta
        named.update({f"sigma{i}": s for i, s in enumerate(self.sigma)})
        return named


@dynamic_cached(maxsize=1)
def standard_matrices() -> StandardMatrices:
    zero = np.zeros((2, 2), complex)
    eye = SIGMA[0]
    beta = _frozen(_block(eye, zero, zero, -eye))
    alpha = tuple(_frozen(_block(zero, s, s, zero)) for s in SIGMA[1:])
    gamma = (beta,) + tuple(_frozen(beta @ a) for a in alpha)
    return StandardMatrices(gamma=gamma, alpha=alpha, beta=beta, sigma=SIGMA)


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def clifford_defects() -> Dict[str, int]:
    """
    Count the identities that fail exactly (all counts are 0 for a correct algebra).

    Checks {alpha^j, alpha^k} = 2 delta^{jk}, {gamma^i, gamma^j} = 2 eta^{ij},
    {alpha^j, beta} = 0, beta^2 = I, hermiticity of alpha/beta/gamma^0 and
    anti-hermiticity of gamma^j.
    """
    mats = standard_matrices()
    eye4 = np.eye(4)
    defects = {"alpha": 0, "gamma": 0, "alpha_beta": 0, "hermiticity": 0}

    for j, k in itertools.product(range(3), repeat=2):
        expected = 2.0 * eye4 if j == k else np.zeros((4, 4))
        if not np.array_equal(anticommutator(mats.alpha[j], mats.alpha[k]), expected):
            defects["alpha"] += 1
    for i, j in itertools.product(range(4), repeat=2):
        if not np.array_equal(anticommutator(mats.gamma[i], mats.gamma[j]), 2.0 * ETA[i, j] * eye4):
            defects["gamma"] += 1
    for a in mats.alpha:
        if not np.array_equal(anticommutator(a, mats.beta), np.zeros((4, 4))):
            defects["alpha_beta"] += 1
    for h in (*mats.alpha, mats.beta, mats.gamma[0]):
        if not np.array_equal(h, h.conj().T):
            defects["hermiticity"] += 1
    for g in mats.gamma[1:]:
        if not np.array_equal(g, -g.conj().T):
            defects["hermiticity"] += 1
    return defects


_CANDIDATE_ENTRIES = (
    0,
    1,
    -1,
    1j,
    -1j,
    0.5 + 0.5j,
    0.5 - 0.5j,
    -0.5 + 0.5j,
    -0.5 - 0.5j,
)


def _leading_argument(matrix: np.ndarray) -> float:
    first = next(x for x in matrix.ravel() if x != 0)
    return float(np.mod(np.angle(first), 2.0 * np.pi))


def _cycles_pauli(v: np.ndarray) -> bool:
    s1, s2, s3 = SIGMA[1:]
    vh = v.conj().T
    return (
        np.array_equal(v @ vh, SIGMA[0])
        and np.array_equal(v @ s1 @ vh, s3)
        and np.array_equal(v @ s2 @ vh, s1)
        and np.array_equal(v @ s3 @ vh, s2)
    )


@dynamic_cached(maxsize=1)
def permutation_rotation() -> np.ndarray:
    """
    The 4x4 unitary U with U alpha1 U* = alpha3, U alpha2 U* = alpha1,
    U alpha3 U* = alpha2 and U beta U* = beta.

    A beta-commuting U is block diagonal, and the alpha constraints force it to
    be V (+) V with V cycling the Pauli matrices. No monomial V does that, so
    the exhaustive search runs over 2x2 matrices with entries in
    {0, +-1, +-i, (+-1 +-i)/2}. Solutions differ by a global phase; the one
    whose first nonzero entry has the smallest argument is returned.
    """
    solutions = []
    for entries in itertools.product(_CANDIDATE_ENTRIES, repeat=4):
        v = np.array(entries, dtype=complex).reshape(2, 2)
        if _cycles_pauli(v):
            solutions.append(v)
    if not solutions:
        raise InternalError(reason="no permutation rotation found")

    v = min(solutions, key=_leading_argument)
    logger.debug("Permutation rotation selected", candidates=len(solutions))
    zero = np.zeros((2, 2), complex)
    return _frozen(_block(v, zero, zero, v))


def permutation_defects() -> Dict[str, bool]:
    mats = standard_matrices()
    u = permutation_rotation()
    uh = u.conj().T
    a1, a2, a3 = mats.alpha
    return {
        "unitary": np.array_equal(u @ uh, np.eye(4)),
        "alpha1_to_alpha3": np.array_equal(u @ a1 @ uh, a3),
        "alpha2_to_alpha1": np.array_equal(u @ a2 @ uh, a1),
        "alpha3_to_alpha2": np.array_equal(u @ a3 @ uh, a2),
        "beta_fixed": np.array_equal(u @ mats.beta @ uh, mats.beta),
    }


SYMBOLS = ("identity", "d_r", "d_theta", "d_phi")


def sphere_dirac_block_form(
    m: float, warp: WarpFunction, r: float, theta: float, rotated: bool = True
) -> Dict[str, np.ndarray]:
    """
    Coefficient matrices of H_phi = m beta - i alpha1 (d_r + phi'/phi) + D_S2 / phi
    at one point, grouped by differential symbol (identity, d_r, d_theta, d_phi).

    With ``rotated`` the coefficients are conjugated by the permutation rotation.
    """
    mats = standard_matrices()
    a1, a2, a3 = mats.alpha
    phi, dphi = float(warp.phi(r)), float(warp.dphi(r))
    cot = np.cos(theta) / np.sin(theta)
    coefficients = {
        "identity": m * mats.beta - 1j * (dphi / phi) * a1 - 1j * cot / (2.0 * phi) * a2,
        "d_r": -1j * a1,
        "d_theta": -1j * a2 / phi,
        "d_phi": -1j * a3 / (phi * np.sin(theta)),
    }
    if rotated:
        u = permutation_rotation()
        coefficients = {name: u @ c @ u.conj().T for name, c in coefficients.items()}
    return coefficients


def block_structure_residual(m: float, warp: WarpFunction, r: float, theta: float) -> float:
    """
    Largest deviation from the rotated block form

        [[m, A], [A, -m]],  A = -i sigma3 (d_r + phi'/phi) + (1/phi)(-i nabla_S2)

    with -i nabla_S2 = -i sigma1 (d_theta + cot/2) - i sigma2 d_phi / sin, symbol by symbol.
    """
    s0, s1, s2, s3 = SIGMA
    phi, dphi = float(warp.phi(r)), float(warp.dphi(r))
    cot = np.cos(theta) / np.sin(theta)
    expected_offdiag = {
        "identity": -1j * (dphi / phi) * s3 - 1j * cot / (2.0 * phi) * s1,
        "d_r": -1j * s3,
        "d_theta": -1j * s1 / phi,
        "d_phi": -1j * s2 / (phi * np.sin(theta)),
    }
    expected_diag = {name: (m * s0 if name == "identity" else 0 * s0) for name in SYMBOLS}

    worst = 0.0
    for name, coefficient in sphere_dirac_block_form(m, warp, r, theta).items():
        upper_left, upper_right = coefficient[:2, :2], coefficient[:2, 2:]
        lower_left, lower_right = coefficient[2:, :2], coefficient[2:, 2:]
        worst = max(
            worst,
            np.max(np.abs(upper_left - expected_diag[name])),
            np.max(np.abs(lower_right + expected_diag[name])),
            np.max(np.abs(upper_right - expected_offdiag[name])),
            np.max(np.abs(lower_left - expected_offdiag[name])),
        )
    return float(worst)

"""
Angular part of the partial-wave decomposition.

Spinor harmonics are evaluated in the cartesian frame, i.e. as R1* Gamma where
R1 = exp(i sigma2 theta/2) exp(i sigma3 phi/2) is the local rotation relating
the spherical-coordinate spinor frame to the cartesian one. In that frame every
component is a single spherical harmonic, so products of basis elements are
spherical polynomials and the product quadrature below integrates them exactly.

Four-spinor bases per index (j, m_j, k_j):

    k_j > 0:  F- = (E-, 0),  F+ = (0, E+)
    k_j < 0:  G+ = (E+, 0),  G- = (0, -E-)

The first element carries the ``plus`` radial profile and the second the
``minus`` one, so beta = diag(1, 1, -1, -1) acts on (u+, u-) as (u+, -u-).
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

import numpy as np
from glogger import get_component_logger
from scipy.special import sph_harm_y

from .clifford import SIGMA
from .decorators.cache import dynamic_cached
from .exceptions import InvalidIndexError, QuadratureDegreeError
from .fields import RadialSpinor, Representation, SpinorField

logger = get_component_logger("angular")


def _is_odd_integer(x: float) -> bool:
    rounded = round(x)
    return abs(x - rounded) < 1e-12 and rounded % 2 == 1


@dataclass(frozen=True, order=True)
class PartialWaveIndex:
    """(j, m_j, k_j) with j in 1/2 + N, m_j in 1/2 + Z, |m_j| <= j and k_j = +-(j + 1/2)."""

    j: float
    m: float
    k: int

    def __post_init__(self):
        if not (_is_odd_integer(2 * self.j) and self.j > 0):
            raise InvalidIndexError(context="partial_wave", j=self.j, m=self.m, k=self.k)
        if not _is_odd_integer(2 * self.m) or abs(self.m) > self.j:
            raise InvalidIndexError(context="partial_wave", j=self.j, m=self.m, k=self.k)
        if int(self.k) != self.k or abs(self.k) != round(self.j + 0.5):
            raise InvalidIndexError(context="partial_wave", j=self.j, m=self.m, k=self.k)
        # normalize to exact half-integers and a plain int
        object.__setattr__(self, "j", round(2 * self.j) / 2)
        object.__setattr__(self, "m", round(2 * self.m) / 2)
        object.__setattr__(self, "k", int(self.k))

    @property
    def lam(self) -> float:
        """Eigenvalue j + 1/2 of the sphere Dirac operator."""
        return self.j + 0.5

    @property
    def n(self) -> int:
        """Block label under the disjoint convention n = |k| - (1 if k < 0 else 0)."""
        return abs(self.k) - (1 if self.k < 0 else 0)

    @property
    def branches(self) -> Tuple[str, str]:
        return ("F-", "F+") if self.k > 0 else ("G+", "G-")

    @property
    def label(self) -> str:
        return f"j={self.j:g},m={self.m:g},k={self.k:d}"


def spherical_harmonic(l: int, m: int, theta, phi):
    """Orthonormal Y_l^m on L^2(S^2) with the Condon-Shortley phase."""
    if int(l) != l or int(m) != m or l < 0 or abs(m) > l:
        raise InvalidIndexError(context="harmonic", l=l, m=m)
    return sph_harm_y(int(l), int(m), theta, phi)


def _ylm_or_zero(l: int, m: int, theta, phi):
    if l < 0 or abs(m) > l:
        return np.zeros(np.broadcast(np.asarray(theta), np.asarray(phi)).shape, complex)
    return sph_harm_y(l, m, theta, phi)


def _half(x: float) -> int:
    return int(round(x))


@dataclass(frozen=True)
class SphereQuadrature:
    """
    Gauss-Legendre in cos(theta) times the uniform rule in phi.

    ceil((D+1)/2) Legendre nodes and D+1 azimuthal nodes integrate every
    spherical polynomial of degree <= D exactly. Weights sum to 4 pi.
    """

    degree: int

    def __post_init__(self):
        if self.degree < 0:
            raise QuadratureDegreeError(degree=self.degree, required=0)

    @cached_property
    def n_theta(self) -> int:
        return max(1, math.ceil((self.degree + 1) / 2))

    @cached_property
    def n_phi(self) -> int:
        return self.degree + 1

    @cached_property
    def _nodes(self):
        x, wx = np.polynomial.legendre.leggauss(self.n_theta)
        azimuths = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        theta = np.repeat(np.arccos(x), self.n_phi)
        phi = np.tile(azimuths, self.n_theta)
        weights = np.repeat(wx, self.n_phi) * (2.0 * np.pi / self.n_phi)
        for a in (theta, phi, weights):
            a.setflags(write=False)
        return theta, phi, weights

    @property
    def theta(self) -> np.ndarray:
        return self._nodes[0]

    @property
    def phi(self) -> np.ndarray:
        return self._nodes[1]

    @property
    def weights(self) -> np.ndarray:
        return self._nodes[2]

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate over the last axis (the node axis)."""
        return np.tensordot(values, self.weights, axes=([-1], [0]))

    @classmethod
    def for_j_max(cls, j_max: float, extra: int = 1) -> "SphereQuadrature":
        """Degree 2 j_max + 1 + extra, enough for the Gram matrix up to j_max."""
        return cls(int(round(2 * j_max)) + 1 + extra)


def e_spinor(j: float, m: float, sign: int, theta, phi) -> np.ndarray:
    """R1* E^{+-}_{j,m}, shape (2, ...). E- carries the phase i."""
    if sign > 0:
        l = _half(j - 0.5)
        a = math.sqrt((j + m) / (2 * j))
        b = math.sqrt((j - m) / (2 * j))
        upper = a * _ylm_or_zero(l, _half(m - 0.5), theta, phi)
        lower = b * _ylm_or_zero(l, _half(m + 0.5), theta, phi)
    else:
        l = _half(j + 0.5)
        c = math.sqrt((j - m + 1) / (2 * j + 2))
        d = math.sqrt((j + m + 1) / (2 * j + 2))
        upper = 1j * c * _ylm_or_zero(l, _half(m - 0.5), theta, phi)
        lower = -1j * d * _ylm_or_zero(l, _half(m + 0.5), theta, phi)
    return np.stack([upper, lower])


def gamma_eigenspinor(j: float, m: float, branch: int, theta, phi) -> np.ndarray:
    """R1* Gamma^{+-}_{j,m} = (R1* E+ +- R1* E-)/sqrt(2), shape (2, ...)."""
    PartialWaveIndex(j, m, _half(j + 0.5))
    if branch not in (1, -1):
        raise InvalidIndexError(f"branch must be +1 or -1, got {branch}")
    plus, minus = e_spinor(j, m, 1, theta, phi), e_spinor(j, m, -1, theta, phi)
    return (plus + branch * minus) / math.sqrt(2.0)


@dataclass(frozen=True)
class AngularBasisElement:
    index: PartialWaveIndex
    branch: str

    def evaluate(self, theta, phi) -> np.ndarray:
        """The four-spinor in the cartesian frame, shape (4, ...)."""
        j, m = self.index.j, self.index.m
        if self.branch in ("F-", "G-"):
            two = e_spinor(j, m, -1, theta, phi)
        else:
            two = e_spinor(j, m, 1, theta, phi)
        zero = np.zeros_like(two)
        if self.branch == "F-":
            return np.concatenate([two, zero])
        if self.branch == "F+":
            return np.concatenate([zero, two])
        if self.branch == "G+":
            return np.concatenate([two, zero])
        return np.concatenate([zero, -two])


def four_spinor_basis(index: PartialWaveIndex) -> Tuple[AngularBasisElement, AngularBasisElement]:
    first, second = index.branches
    return AngularBasisElement(index, first), AngularBasisElement(index, second)


@dynamic_cached(maxsize=1024)
def basis_table(index: PartialWaveIndex, quadrature: SphereQuadrature) -> np.ndarray:
    """Both basis elements of ``index`` on the quadrature nodes, shape (2, 4, nodes)."""
    theta, phi = quadrature.theta, quadrature.phi
    table = np.stack([b.evaluate(theta, phi) for b in four_spinor_basis(index)])
    table.setflags(write=False)
    return table


def require_degree(j: float, quadrature: SphereQuadrature) -> None:
    required = _half(2 * j) + 1
    if quadrature.degree < required:
        raise QuadratureDegreeError(degree=quadrature.degree, required=required)


def project(
    samples: np.ndarray,
    index: PartialWaveIndex,
    quadrature: SphereQuadrature,
    representation: Representation = Representation.G_PHI2,
) -> RadialSpinor:
    """
    Radial coefficients (<B1, u>, <B2, u>)_{L^2(S^2)} of pointwise samples of shape (4, N, nodes).
    """
    require_degree(index.j, quadrature)
    table = basis_table(index, quadrature)
    weighted = np.conj(table) * quadrature.weights
    coefficients = np.einsum("bcn,crn->br", weighted, samples)
    return RadialSpinor(coefficients[0], coefficients[1], representation)


def synthesize(field: SpinorField, quadrature: SphereQuadrature) -> np.ndarray:
    """
    Pointwise four-spinor samples sum_idx plus(r) B1 + minus(r) B2, shape (4, N, nodes).

    The radial profiles are used as stored; pass g-profiles to obtain the physical spinor.
    """
    indices = field.indices()
    if not indices:
        raise InvalidIndexError("cannot synthesize an empty field without a grid size")
    size = field[indices[0]].size
    samples = np.zeros((4, size, quadrature.size), complex)
    for index in indices:
        table = basis_table(index, quadrature)
        spinor = field[index]
        samples += np.einsum("r,cn->crn", spinor.plus, table[0])
        samples += np.einsum("r,cn->crn", spinor.minus, table[1])
    return samples


def indices_up_to(j_max: float) -> List[PartialWaveIndex]:
    """All indices with j <= j_max, ordered by j, then k, then m."""
    result = []
    for twice_j in range(1, _half(2 * j_max) + 1, 2):
        j = twice_j / 2
        lam = _half(j + 0.5)
        for k in (-lam, lam):
            for twice_m in range(-twice_j, twice_j + 1, 2):
                result.append(PartialWaveIndex(j, twice_m / 2, k))
    return result


def project_all(
    samples: np.ndarray,
    quadrature: SphereQuadrature,
    j_max: float,
    representation: Representation = Representation.G_PHI2,
) -> SpinorField:
    require_degree(j_max, quadrature)
    return SpinorField(
        {
            index: project(samples, index, quadrature, representation)
            for index in indices_up_to(j_max)
        }
    )


def block_indices(n: int) -> List[PartialWaveIndex]:
    """
    Modes of the block P_n under the disjoint convention n = |k| - (1 if k < 0 else 0):
    (j = n - 1/2, k = n) for n >= 1 and (j = n + 1/2, k = -(n + 1)).
    """
    if n < 0:
        raise InvalidIndexError(f"block label must be >= 0, got {n}")
    result = []
    if n >= 1:
        j = n - 0.5
        result += [PartialWaveIndex(j, m / 2, n) for m in range(-(2 * n - 1), 2 * n, 2)]
    j = n + 0.5
    result += [PartialWaveIndex(j, m / 2, -(n + 1)) for m in range(-(2 * n + 1), 2 * n + 2, 2)]
    return result


def harmonic_block_indices(n: int) -> List[PartialWaveIndex]:
    """
    Every index of H_{n-1/2} + H_{n+1/2}, both signs of k.

    A C^4-valued spherical harmonic of degree n projects into these modes only.
    They carry the disjoint labels n - 1, n and n + 1 (n = 0 gives 0 and 1).
    """
    if n < 0:
        raise InvalidIndexError(f"harmonic degree must be >= 0, got {n}")
    return [i for i in indices_up_to(n + 0.5) if i.j >= n - 0.5]


def harmonic_leakage(n: int, j_max: float, quadrature: SphereQuadrature) -> float:
    """
    Largest coefficient outside ``harmonic_block_indices(n)`` of a fixed C^4 harmonic
    of degree n (every Y_n^m in every component), projected on all indices up to j_max.
    """
    if n + 0.5 > j_max:
        raise InvalidIndexError(f"degree {n} needs j_max >= {n + 0.5:g}, got {j_max:g}")
    theta, phi = quadrature.theta, quadrature.phi
    harmonics = np.array([spherical_harmonic(n, m, theta, phi) for m in range(-n, n + 1)])
    weights = np.array([[1.0 + c + 0.5j * m for m in range(-n, n + 1)] for c in range(4)])
    samples = (weights @ harmonics)[:, np.newaxis, :]
    field = project_all(samples, quadrature, j_max)
    kept = set(harmonic_block_indices(n))
    outside = [float(np.max(np.abs(field[i].stacked()))) for i in field if i not in kept]
    return max(outside, default=0.0)


def dyadic_level(n: int) -> int:
    """-1 for n = 0, else the l with 2^l <= n < 2^(l+1)."""
    return -1 if n == 0 else int(n).bit_length() - 1


def band_projector(field: SpinorField, level: int) -> SpinorField:
    """Keep the modes whose block label n lies in [2^level, 2^(level+1)); level -1 keeps n = 0."""
    return SpinorField({i: s for i, s in field.items() if dyadic_level(i.n) == level})


def rotation_r1(theta, phi) -> np.ndarray:
    """R1 = exp(i sigma2 theta/2) exp(i sigma3 phi/2), shape (2, 2, ...)."""
    c, s = np.cos(np.asarray(theta) / 2), np.sin(np.asarray(theta) / 2)
    ep, em = np.exp(0.5j * np.asarray(phi)), np.exp(-0.5j * np.asarray(phi))
    return np.array([[c * ep, s * em], [-s * ep, c * em]])


def _apply(matrix_field: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    if matrix_field.ndim == 2:
        return np.einsum("ab,b...->a...", matrix_field, vectors)
    return np.einsum("ab...,b...->a...", matrix_field, vectors)


def _band_limited(values, m_c, band, quadrature):
    """Resynthesis, d_theta and d_phi of one component with fixed azimuthal order m_c."""
    theta, phi, cot = quadrature.theta, quadrature.phi, 1.0 / np.tan(quadrature.theta)
    f = np.zeros(quadrature.size, complex)
    d_theta = np.zeros(quadrature.size, complex)
    for l in range(abs(m_c), band + 1):
        y = sph_harm_y(l, m_c, theta, phi)
        coefficient = quadrature.integrate(np.conj(y) * values)
        f += coefficient * y
        raising = math.sqrt((l - m_c) * (l + m_c + 1))
        y_up = sph_harm_y(l, m_c + 1, theta, phi) if m_c + 1 <= l else 0.0
        d_theta += coefficient * (m_c * cot * y + raising * np.exp(-1j * phi) * y_up)
    return f, d_theta, 1j * m_c * f


def angular_dirac_eigencheck(
    j: float,
    m: float,
    branch: int,
    degree: int | None = None,
    band: int | None = None,
) -> float:
    """
    ||(-i nabla_S2 -+ lambda_j) Gamma^{+-}||_{L^2(S^2)} with
    -i nabla_S2 = -i sigma1 (d_theta + cot/2) - i sigma2 d_phi / sin.

    Components of R1* Gamma are expanded in spherical harmonics up to ``band``
    (default j + 1/2, which is exact), differentiated analytically and rotated
    back with R1.
    """
    index = PartialWaveIndex(j, m, _half(j + 0.5))
    band = _half(j + 0.5) if band is None else int(band)
    quadrature = SphereQuadrature(degree if degree is not None else _half(2 * j) + 4)
    if quadrature.degree < 2 * band:
        raise QuadratureDegreeError(degree=quadrature.degree, required=2 * band)

    theta, phi = quadrature.theta, quadrature.phi
    chi = gamma_eigenspinor(j, m, branch, theta, phi)
    parts = [
        _band_limited(chi[c], _half(m - 0.5) if c == 0 else _half(m + 0.5), band, quadrature)
        for c in range(2)
    ]
    chi_band = np.stack([p[0] for p in parts])
    d_theta_chi = np.stack([p[1] for p in parts])
    d_phi_chi = np.stack([p[2] for p in parts])

    s1, s2, s3 = SIGMA[1:]
    r1 = rotation_r1(theta, phi)
    gamma = _apply(r1, chi_band)
    d_theta_gamma = _apply(0.5j * s2, gamma) + _apply(r1, d_theta_chi)
    d_phi_gamma = _apply(r1, _apply(0.5j * s3, chi_band) + d_phi_chi)

    cot, sin = 1.0 / np.tan(theta), np.sin(theta)
    dirac = -1j * _apply(s1, d_theta_gamma + 0.5 * cot * gamma) - 1j * _apply(s2, d_phi_gamma) / sin
    residual = dirac - branch * index.lam * gamma
    value = float(np.sqrt(quadrature.integrate(np.sum(np.abs(residual) ** 2, axis=0))))
    logger.debug("Eigencheck", j=j, m=m, branch=branch, band=band, residual=value)
    return value


def sigma3_relation_residual(j: float, m: float, quadrature: SphereQuadrature) -> float:
    """Pointwise max of |-i sigma3 Gamma^{+-} -+ Gamma^{-+}| in the spherical frame."""
    theta, phi = quadrature.theta, quadrature.phi
    r1 = rotation_r1(theta, phi)
    plus = _apply(r1, gamma_eigenspinor(j, m, 1, theta, phi))
    minus = _apply(r1, gamma_eigenspinor(j, m, -1, theta, phi))
    s3 = SIGMA[3]
    worst_plus = np.max(np.abs(-1j * _apply(s3, plus) - minus))
    worst_minus = np.max(np.abs(-1j * _apply(s3, minus) + plus))
    return float(max(worst_plus, worst_minus))


def gram_matrix(indices: Sequence[PartialWaveIndex], quadrature: SphereQuadrature) -> np.ndarray:
    """Quadrature Gram matrix of all basis elements of ``indices`` (two per index)."""
    tables = np.concatenate([basis_table(i, quadrature) for i in indices])
    weighted = np.conj(tables) * quadrature.weights
    return np.einsum("acn,bcn->ab", weighted, tables)

"""
Discrete radial Dirac operators on one partial-wave block.

All operators act on the stacked w-representation [w+; w-] of length 2N, where
w = phi*g (curved form on phi^2 dr) or w = r*g (sigma-weighted and flat forms on
r^2 dr). In that representation the radial derivative term is a plain d/dr, the
central difference with zero ghost values is skew-symmetric, and every
Hamiltonian below is Hermitian for the l2 inner product.

Block layout of every Hamiltonian::

    [[ m I + V1,   -D + K ],
     [  D + K,   -m I + V1 ]]

with K = k/phi (curved, sigma-flat), k/r (flat reference) or k/r + V2.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
import scipy.sparse as sp
from glogger import get_component_logger

from .angular import PartialWaveIndex
from .decorators.cache import dynamic_cached
from .exceptions import (
    DimensionMismatchError,
    EvaluationError,
    InvalidIndexError,
    PositivityError,
)
from .fields import RadialGrid, RadialSpinor, Representation
from .manifold import FLAT, WarpFunction, checked_phi, potential, sigma_weight
from .models.error import ErrorDetails

__all__ = [
    "OperatorForm",
    "RadialGrid",
    "RadialOperator",
    "RadialSpinor",
    "build_curved",
    "build_flat_reference",
    "build_sigma_flat",
    "build_with_potential",
    "conjugation_residual",
    "energy",
    "from_w",
    "lambda_squared",
    "potential_operator",
    "sobolev_apply",
    "sobolev_spectrum",
    "to_w",
]

logger = get_component_logger("radial-ops")

Profile = Callable[[np.ndarray], np.ndarray] | np.ndarray | float


class OperatorForm(str, Enum):
    CURVED = "curved"
    SIGMA_FLAT = "sigma-flat"
    FLAT_REFERENCE = "flat-reference"
    POTENTIAL = "potential"
    WITH_POTENTIAL = "with-potential"
    SUM = "sum"


@dataclass(frozen=True, eq=False)
class RadialOperator:
    """
    A 2N x 2N sparse matrix with its provenance.

    Hashing is by identity so operators can key propagator caches.
    """

    matrix: sp.csr_matrix
    grid: RadialGrid
    k: int
    m: float
    form: OperatorForm
    warp: WarpFunction | None = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector)
        if vector.shape[0] != self.size:
            raise DimensionMismatchError(expected=self.size, actual=vector.shape[0])
        return self.matrix @ vector

    def apply_spinor(self, spinor: RadialSpinor) -> RadialSpinor:
        if spinor.representation != Representation.W:
            raise DimensionMismatchError(
                expected=Representation.W.value, actual=spinor.representation.value
            )
        return RadialSpinor.from_stacked(self.apply(spinor.stacked()))

    def hermiticity_residual(self) -> float:
        """max |A - A^H| relative to max |A|."""
        difference = self.matrix - self.matrix.conj().T
        scale = abs(self.matrix).max() or 1.0
        return float(abs(difference).max() / scale) if difference.nnz else 0.0

    def __add__(self, other: "RadialOperator") -> "RadialOperator":
        if other.grid != self.grid or other.size != self.size:
            raise DimensionMismatchError(expected=self.grid.tag, actual=other.grid.tag)
        return RadialOperator(
            (self.matrix + other.matrix).tocsr(),
            self.grid,
            self.k,
            self.m,
            OperatorForm.SUM,
            self.warp,
        )


@dynamic_cached(maxsize=32)
def _difference(grid: RadialGrid) -> sp.csr_matrix:
    """Central first difference, zero ghosts at both ends (skew-symmetric)."""
    h = 1.0 / (2.0 * grid.dr)
    return sp.diags([-h, h], [-1, 1], shape=(grid.N, grid.N), format="csr", dtype=complex)


def _check_k(k: int) -> int:
    if int(k) != k or k == 0:
        raise InvalidIndexError(f"k_j must be a nonzero integer, got {k}")
    return int(k)


def _index_k(index: PartialWaveIndex | int) -> int:
    return _check_k(index.k if isinstance(index, PartialWaveIndex) else index)


def _profile(values: Profile, grid: RadialGrid, name: str) -> np.ndarray:
    if callable(values):
        values = values(grid.r)
    array = np.broadcast_to(np.asarray(values, dtype=float), (grid.N,)).copy()
    if not np.all(np.isfinite(array)):
        raise EvaluationError(f"{name} is not finite on the grid")
    return array


def _assemble(grid: RadialGrid, m: float, coupling: np.ndarray, scalar: np.ndarray | None = None):
    n = grid.N
    d = _difference(grid)
    identity = sp.identity(n, dtype=complex, format="csr")
    k_diag = sp.diags(coupling.astype(complex), 0, format="csr")
    top_left = m * identity
    bottom_right = -m * identity
    if scalar is not None:
        v1 = sp.diags(scalar.astype(complex), 0, format="csr")
        top_left = top_left + v1
        bottom_right = bottom_right + v1
    return sp.bmat([[top_left, -d + k_diag], [d + k_diag, bottom_right]], format="csr")


@dynamic_cached(maxsize=256)
def _curved_cached(k: int, m: float, warp: WarpFunction, grid: RadialGrid, form: OperatorForm):
    phi = checked_phi(warp, grid.r)
    matrix = _assemble(grid, m, k / phi)
    logger.debug(
        "Assembled radial operator", form=form.value, k=k, m=m, warp=warp.name, grid=grid.tag
    )
    return RadialOperator(matrix, grid, k, m, form, warp)


def build_curved(index: PartialWaveIndex | int, m: float, warp: WarpFunction, grid: RadialGrid):
    """h on L^2(phi^2 dr) in the w = phi g representation."""
    return _curved_cached(_index_k(index), float(m), warp, grid, OperatorForm.CURVED)


def build_sigma_flat(index: PartialWaveIndex | int, m: float, warp: WarpFunction, grid: RadialGrid):
    """h^sigma on L^2(r^2 dr) in the w = r g representation; the same matrix as ``build_curved``."""
    return _curved_cached(_index_k(index), float(m), warp, grid, OperatorForm.SIGMA_FLAT)


@dynamic_cached(maxsize=64)
def _flat_cached(k: int, m: float, grid: RadialGrid):
    matrix = _assemble(grid, m, k / grid.r)
    return RadialOperator(matrix, grid, k, m, OperatorForm.FLAT_REFERENCE, FLAT)


def build_flat_reference(index: PartialWaveIndex | int, m: float, grid: RadialGrid):
    """The Euclidean partial-wave operator (coupling k/r)."""
    return _flat_cached(_index_k(index), float(m), grid)


def potential_operator(index: PartialWaveIndex | int, warp: WarpFunction, grid: RadialGrid):
    """V_k = k (1/phi - 1/r) on both off-diagonal blocks, so that h^sigma = h_flat + V_k."""
    k = _index_k(index)
    v = sp.diags(potential(warp, k, grid.r).astype(complex), 0, format="csr")
    zero = sp.csr_matrix((grid.N, grid.N), dtype=complex)
    matrix = sp.bmat([[zero, v], [v, zero]], format="csr")
    return RadialOperator(matrix, grid, k, 0.0, OperatorForm.POTENTIAL, warp)


def build_with_potential(
    index: PartialWaveIndex | int,
    m: float,
    grid: RadialGrid,
    v1: Profile = 0.0,
    v2: Profile = 0.0,
) -> RadialOperator:
    """
    Flat partial-wave operator perturbed by V1 * 1 + i beta alpha.e_r V2.

    V1 adds to both diagonal blocks, V2 to the coupling k/r. Both must be real.
    """
    k = _index_k(index)
    scalar = _profile(v1, grid, "V1")
    anomalous = _profile(v2, grid, "V2")
    matrix = _assemble(grid, float(m), k / grid.r + anomalous, scalar)
    return RadialOperator(matrix, grid, k, float(m), OperatorForm.WITH_POTENTIAL, FLAT)


def _measure_factor(representation: Representation, warp: WarpFunction, grid: RadialGrid):
    if representation == Representation.G_PHI2:
        return checked_phi(warp, grid.r)
    if representation == Representation.G_R2:
        return grid.r
    return np.ones(grid.N)


def to_w(spinor: RadialSpinor, warp: WarpFunction, grid: RadialGrid) -> RadialSpinor:
    """w = phi g from g-on-phi2dr, w = r g from g-on-r2dr."""
    if spinor.size != grid.N:
        raise DimensionMismatchError(expected=grid.N, actual=spinor.size)
    factor = _measure_factor(spinor.representation, warp, grid)
    return RadialSpinor(spinor.plus * factor, spinor.minus * factor, Representation.W)


def from_w(
    spinor: RadialSpinor, target: Representation, warp: WarpFunction, grid: RadialGrid
) -> RadialSpinor:
    if spinor.representation != Representation.W:
        raise DimensionMismatchError(
            expected=Representation.W.value, actual=spinor.representation.value
        )
    factor = _measure_factor(target, warp, grid)
    return RadialSpinor(spinor.plus / factor, spinor.minus / factor, target)


def energy(H: RadialOperator, psi: np.ndarray | RadialSpinor) -> float:
    """<psi, H psi> with the dr weight of the w-representation."""
    vector = psi.stacked() if isinstance(psi, RadialSpinor) else np.asarray(psi)
    return float(H.grid.dr * np.real(np.vdot(vector, H.apply(vector))))


def _g_coupling(g: RadialSpinor, d: sp.csr_matrix, log_term: np.ndarray, k_over_phi, m: float):
    """Apply [[m, -(d/dr + a) + K], [(d/dr + a) + K, -m]] to g with a central-difference d/dr."""
    upper = m * g.plus - (d @ g.minus + log_term * g.minus) + k_over_phi * g.minus
    lower = (d @ g.plus + log_term * g.plus) + k_over_phi * g.plus - m * g.minus
    return upper, lower


def conjugation_residual(
    index: PartialWaveIndex | int,
    m: float,
    warp: WarpFunction,
    grid: RadialGrid,
    g: RadialSpinor,
) -> float:
    """
    ||sigma^-1 h (sigma g) - h^sigma g||_{L^2(r^2 dr)} with g-representation stencils.

    The continuum identity holds exactly; the discrete residual is the O(dr^2)
    commutator between the central difference and multiplication by sigma.
    """
    k = _index_k(index)
    if g.size != grid.N:
        raise DimensionMismatchError(expected=grid.N, actual=g.size)
    r = grid.r
    phi = checked_phi(warp, r)
    dphi = np.asarray(warp.dphi(r), dtype=float)
    sigma, _ = sigma_weight(warp, r)
    d = _difference(grid)
    k_over_phi = k / phi

    weighted = RadialSpinor(sigma * g.plus, sigma * g.minus, Representation.G_PHI2)
    up_c, low_c = _g_coupling(weighted, d, dphi / phi, k_over_phi, m)
    up_s, low_s = _g_coupling(g, d, 1.0 / r, k_over_phi, m)
    diff_up = up_c / sigma - up_s
    diff_low = low_c / sigma - low_s
    weights = grid.r**2 * grid.dr
    return float(np.sqrt(np.sum(weights * (np.abs(diff_up) ** 2 + np.abs(diff_low) ** 2))))


def lambda_squared(warp: WarpFunction, grid: RadialGrid) -> np.ndarray:
    """
    Lambda_r^2 = 1 - d^2/dr^2 + phi''/phi in the w-representation, as a dense real matrix.

    The second difference uses odd reflection at the origin and zero at R_max.
    """
    r = grid.r
    phi = checked_phi(warp, r)
    d2phi = np.asarray(warp.d2phi(r), dtype=float)
    inv = 1.0 / grid.dr**2
    main = np.full(grid.N, -2.0 * inv)
    main[0] = -3.0 * inv
    off = np.full(grid.N - 1, inv)
    return np.diag(1.0 - main + d2phi / phi) - np.diag(off, 1) - np.diag(off, -1)


@dynamic_cached(maxsize=16)
def sobolev_spectrum(warp: WarpFunction, grid: RadialGrid):
    """Eigendecomposition of ``lambda_squared``; raises PositivityError unless it is positive."""
    eigenvalues, eigenvectors = np.linalg.eigh(lambda_squared(warp, grid))
    if eigenvalues[0] <= 0:
        raise PositivityError(
            eigenvalue=float(eigenvalues[0]),
            details=ErrorDetails(location="sobolev", value=float(eigenvalues[0])),
        )
    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    return eigenvalues, eigenvectors


def sobolev_apply(warp: WarpFunction, grid: RadialGrid, s: float, f: np.ndarray) -> np.ndarray:
    """Lambda_r^s f for a g-profile f on L^2(phi^2 dr); s = 0 returns f unchanged."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (grid.N,):
        raise DimensionMismatchError(expected=grid.N, actual=f.shape)
    if s < 0:
        raise PositivityError(f"Sobolev order must be >= 0, got {s}")
    if s == 0:
        return f.copy()
    eigenvalues, eigenvectors = sobolev_spectrum(warp, grid)
    phi = checked_phi(warp, grid.r)
    w = phi * f
    transformed = eigenvectors @ (eigenvalues ** (s / 2.0) * (eigenvectors.T @ w))
    return transformed / phi

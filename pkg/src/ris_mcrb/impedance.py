"""Thin-wire dipole self/mutual impedance via adaptive tensor quadrature.

The impedance between two parallel z-oriented thin wires is a double
integral over both wire axes of an oscillatory near-field kernel weighted
by the sinusoidal current profile of each dipole. The |xi| and |z| factors
in the current profile put a derivative kink at the wire centers, so each
axis is split at 0 into two panels (4 panels in the tensor product) where
the integrand is smooth. Each panel is integrated with Gauss-Legendre
nodes; the order doubles until two successive estimates agree to the
requested relative tolerance.

The self-impedance case evaluates the same kernel with the source point
displaced to the wire surface (radial offset = wire radius, no axial
offset), which is the standard surface-current approximation for thin
wires. The kernel then peaks sharply along the diagonal of the
integration square, but the peak width is the wire radius, a fixed
fraction of the half length at the geometries of interest, so moderate
orders converge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    ComputationError,
    DegenerateGeometryError,
    QuadratureConvergenceError,
    ResonanceError,
    annotate,
)
from .scenario import PhysicalConstants, Radiator

# |sin(k0*h)| below this means the current normalization is effectively
# dividing by zero (half-wavelength resonance of the profile).
RESONANCE_TOL = 1e-9


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls the panel quadrature refinement loop."""

    base_order: int = 16        # Gauss-Legendre nodes per axis per panel
    refinement_factor: int = 2
    rel_tolerance: float = 1e-9
    max_refinements: int = 6

    def __post_init__(self):
        if self.base_order < 8:
            raise ValueError("base_order must be >= 8")
        if self.refinement_factor < 2:
            raise ValueError("refinement_factor must be >= 2")
        if not 1e-14 <= self.rel_tolerance <= 1e-3:
            raise ValueError("rel_tolerance must lie in [1e-14, 1e-3]")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be >= 0")


DEFAULT_QUADRATURE = QuadratureSpec()


def kernel_distance(xi, z, rho1, rho2):
    """Distance between a point at axial offset xi on wire p and one at
    offset z on wire q, given radial separation rho1 and axial center
    offset rho2. Accepts scalars or arrays; raises if the distance is
    exactly zero anywhere (overlapping wire segments)."""
    axial = np.asarray(z) - np.asarray(xi) + rho2
    r = np.sqrt(rho1 * rho1 + axial * axial)
    if np.any(r == 0.0):
        raise DegenerateGeometryError(
            "wire segments overlap: distance kernel reached zero"
        )
    return r


@lru_cache(maxsize=32)
def _gauss_nodes(order: int):
    nodes, weights = leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _split_axis(h: float, order: int):
    # Map the reference rule onto [-h, 0] and [0, h]; concatenating the two
    # panels gives one composite rule for the whole axis with the kink at 0
    # on a panel boundary.
    x, w = _gauss_nodes(order)
    half = 0.5 * h
    nodes = np.concatenate((half * (x - 1.0), half * (x + 1.0)))
    weights = np.concatenate((half * w, half * w))
    return nodes, weights


def _tensor_estimate(k0, hp, hq, rho1, rho2, sin_p, sin_q, order):
    xi, w_xi = _split_axis(hp, order)
    z, w_z = _split_axis(hq, order)

    u = z[None, :] - xi[:, None] + rho2
    u2 = u * u
    r = np.sqrt(rho1 * rho1 + u2)
    r2 = r * r

    poly = (
        k0 * k0
        - 1j * k0 / r
        - (k0 * k0 * u2 + 1.0) / r2
        + 3j * k0 * u2 / (r2 * r)
        + 3.0 * u2 / (r2 * r2)
    )
    profile = (
        np.sin(k0 * (hp - np.abs(xi)))[:, None]
        * np.sin(k0 * (hq - np.abs(z)))[None, :]
    ) / (sin_p * sin_q)
    kernel = np.exp(-1j * k0 * r) / r * profile * poly
    return w_xi @ kernel @ w_z


def _integrate(k0, hp, hq, rho1, rho2, quad: QuadratureSpec):
    sin_p = math.sin(k0 * hp)
    sin_q = math.sin(k0 * hq)
    if abs(sin_p) < RESONANCE_TOL or abs(sin_q) < RESONANCE_TOL:
        raise ResonanceError(
            "sin(k0*h) is numerically zero; the sinusoidal current "
            f"normalization is singular (k0*h = {k0 * hp:.6g}, {k0 * hq:.6g})"
        )

    order = quad.base_order
    previous = latest = _tensor_estimate(k0, hp, hq, rho1, rho2, sin_p, sin_q, order)
    for _ in range(quad.max_refinements):
        order *= quad.refinement_factor
        latest = _tensor_estimate(k0, hp, hq, rho1, rho2, sin_p, sin_q, order)
        err = abs(latest - previous)
        if err <= quad.rel_tolerance * max(abs(latest), abs(previous)):
            return latest, err, order
        previous = latest
    raise QuadratureConvergenceError(
        f"impedance quadrature did not converge to rel_tolerance="
        f"{quad.rel_tolerance:g} within {quad.max_refinements} refinements "
        f"(last estimates {previous!r} and {latest!r})",
        previous=previous,
        latest=latest,
    )


def _pair_offsets(p: Radiator, q: Radiator):
    """(rho1, rho2) for a radiator pair; the self branch (same object)
    uses the wire radius as radial offset and no axial offset."""
    if p is q:
        return p.wire_radius, 0.0
    dx = p.position[0] - q.position[0]
    dy = p.position[1] - q.position[1]
    rho1 = math.hypot(dx, dy)
    rho2 = p.position[2] - q.position[2]
    if rho1 == 0.0 and abs(rho2) <= p.half_length + q.half_length:
        raise DegenerateGeometryError(
            "coaxial radiators overlap along z; the distance kernel "
            "would vanish"
        )
    return rho1, rho2


def mutual_impedance(
    p: Radiator,
    q: Radiator,
    constants: PhysicalConstants,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    *,
    full_output: bool = False,
):
    """Impedance (ohm) coupling two parallel thin-wire dipoles.

    Passing the same radiator (same position and dimensions) for ``p`` and
    ``q`` yields the self impedance. With ``full_output`` the absolute
    error estimate and the final quadrature order are returned as well.
    """
    rho1, rho2 = _pair_offsets(p, q)
    value, err, order = _integrate(
        constants.wavenumber, p.half_length, q.half_length, rho1, rho2, quad
    )
    value = value * (1j * constants.eta0 / (4.0 * math.pi * constants.wavenumber))
    err = err * (constants.eta0 / (4.0 * math.pi * constants.wavenumber))
    if not np.isfinite(value):
        raise ComputationError(f"impedance evaluated to a non-finite value {value!r}")
    if full_output:
        return value, err, order
    return value


def self_impedance(
    radiator: Radiator,
    constants: PhysicalConstants,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
):
    return mutual_impedance(radiator, radiator, constants, quad)


@dataclass(frozen=True)
class ImpedanceSet:
    """All impedances the channel model needs: Tx->RIS and RIS->Rx coupling
    vectors, the (identical) element self impedances, and the dense
    inter-element mutual matrix with zero diagonal."""

    z_st: np.ndarray        # (N,) complex, transmitter to each element
    z_rs: np.ndarray        # (N,) complex, each element to receiver
    z_ss_self: np.ndarray   # (N,) complex, diagonal of the scatter matrix
    z_ss_mutual: np.ndarray  # (N, N) complex, zero diagonal, symmetric

    def __post_init__(self):
        for name in ("z_st", "z_rs", "z_ss_self", "z_ss_mutual"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        n = self.z_st.shape[0]
        if self.z_rs.shape != (n,) or self.z_ss_self.shape != (n,):
            raise ValueError("impedance vectors disagree on element count")
        if self.z_ss_mutual.shape != (n, n):
            raise ValueError("mutual matrix shape does not match element count")
        if np.any(np.diagonal(self.z_ss_mutual) != 0.0):
            raise ValueError("mutual matrix must have a zero diagonal")
        if not np.array_equal(self.z_ss_mutual, self.z_ss_mutual.T):
            raise ValueError("mutual matrix must be symmetric (reciprocity)")

    @property
    def num_elements(self) -> int:
        return self.z_st.shape[0]

    @property
    def z_ss(self) -> np.ndarray:
        """Full scatter matrix: self diagonal plus mutual part."""
        return np.diag(self.z_ss_self) + self.z_ss_mutual


def impedance_matrix(
    elements: list[Radiator],
    constants: PhysicalConstants,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    *,
    dedupe: bool = True,
):
    """Self and mutual impedances among a set of parallel radiators.

    Returns ``(z_self, z_mutual)`` with the self impedances as an (N,)
    vector and the mutual part as an (N, N) matrix with zero diagonal.
    Each unordered pair is evaluated once and mirrored. With ``dedupe``
    (default) pairs with bit-identical geometry offsets share a single
    quadrature evaluation, which collapses the cost on regular grids.
    """
    n = len(elements)
    if n < 1:
        raise ValueError("need at least one element")

    cache: dict = {}

    def evaluate(p, q, label):
        try:
            rho1, rho2 = _pair_offsets(p, q)
        except ComputationError as exc:
            raise annotate(exc, label) from exc
        key = (p.half_length, q.half_length, rho1, rho2)
        if dedupe and key in cache:
            return cache[key]
        try:
            value, _, _ = _integrate(
                constants.wavenumber, p.half_length, q.half_length,
                rho1, rho2, quad,
            )
        except ComputationError as exc:
            raise annotate(exc, label) from exc
        value = value * (1j * constants.eta0 / (4.0 * math.pi * constants.wavenumber))
        if dedupe:
            cache[key] = value
        return value

    z_self = np.empty(n, dtype=complex)
    for i, elem in enumerate(elements):
        z_self[i] = evaluate(elem, elem, f"element {i} self term")

    z_mutual = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            value = evaluate(elements[i], elements[j], f"element pair ({i},{j})")
            z_mutual[i, j] = value
            z_mutual[j, i] = value
    return z_self, z_mutual


def coupling_vector(
    antenna: Radiator,
    elements: list[Radiator],
    constants: PhysicalConstants,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Mutual impedance of every element toward a single antenna."""
    out = np.empty(len(elements), dtype=complex)
    for i, elem in enumerate(elements):
        try:
            out[i] = mutual_impedance(elem, antenna, constants, quad)
        except ComputationError as exc:
            raise annotate(exc, f"element {i} to antenna") from exc
    return out


def build_impedance_set(
    tx: Radiator,
    rx: Radiator,
    elements: list[Radiator],
    constants: PhysicalConstants,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> ImpedanceSet:
    """Evaluate every impedance the end-to-end channel model needs."""
    z_self, z_mutual = impedance_matrix(elements, constants, quad)
    return ImpedanceSet(
        z_st=coupling_vector(tx, elements, constants, quad),
        z_rs=coupling_vector(rx, elements, constants, quad),
        z_ss_self=z_self,
        z_ss_mutual=z_mutual,
    )

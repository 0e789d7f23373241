"""End-to-end impedance channel, stacked pilot model, and realification.

The scalar channel for one RIS configuration is
``z_rs^T (Z_ss + diag(loads_g))^{-1} z_st``. Stacking the row vectors
``z_rs^T (Z_ss + diag(loads_g))^{-1}`` over G configurations gives the
complex model matrix B; mapping it to the real block form
``[[Re B, -Im B], [Im B, Re B]]`` turns complex least squares into an
ordinary real linear-Gaussian problem. Building B with the off-diagonal
part of the scatter matrix zeroed out yields the coupling-unaware model
used as the (mis)estimation model.

All linear systems go through an LU factorization with a reciprocal
condition estimate; nothing in production paths forms an explicit inverse.
RNG streams are derived from a master seed with fixed spawn keys so that
load sampling and noise generation never share or reorder draws.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.linalg import get_lapack_funcs

from .errors import SingularModelError
from .impedance import ImpedanceSet
from .scenario import Scenario

# Substream identifiers under the scenario master seed.
LOADS_STREAM = 0
NOISE_STREAM = 1

# Offset that keeps value-derived spawn keys non-negative.
_KEY_OFFSET = 2 ** 31

# Reciprocal condition estimate below which a system is treated as singular.
RCOND_FLOOR = 1e-13


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator for a named position under the master seed."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=path))


def noise_seed(master_seed: int, power_dbm: float) -> np.random.SeedSequence:
    """Seed sequence for the noise draws of one transmit-power point.

    Keyed by the power value (0.1 mdBm resolution), not its position in a
    sweep grid, so adding or removing grid points leaves the noise of the
    remaining points untouched. Per-trial child sequences are derived by
    appending the trial index.
    """
    key = int(round(power_dbm * 1e4)) + _KEY_OFFSET
    if key < 0:
        raise ValueError(f"power {power_dbm} dBm is out of the keyable range")
    return np.random.SeedSequence(master_seed, spawn_key=(NOISE_STREAM, key))


def trial_generators(seq: np.random.SeedSequence, trials: int):
    """Per-trial generators derived from ``seq`` without mutating it."""
    for t in range(trials):
        child = np.random.SeedSequence(entropy=seq.entropy,
                                       spawn_key=tuple(seq.spawn_key) + (t,))
        yield np.random.default_rng(child)


@dataclass(frozen=True)
class RisLoadSequence:
    """One tunable complex load per element per transmission.

    Loads are R + j*omega*L with positive inductance, hence strictly
    inductive (positive imaginary part).
    """

    loads: np.ndarray  # (G, N) complex ohm
    generation_seed: int

    def __post_init__(self):
        arr = np.asarray(self.loads, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("loads must be a (G, N) array")
        if np.any(arr.imag <= 0.0):
            raise ValueError("loads must be inductive (positive imaginary part)")
        arr.flags.writeable = False
        object.__setattr__(self, "loads", arr)

    @property
    def num_transmissions(self) -> int:
        return self.loads.shape[0]

    @property
    def num_elements(self) -> int:
        return self.loads.shape[1]


def sample_loads(scenario: Scenario, rng: np.random.Generator | None = None) -> RisLoadSequence:
    """Draw the G x N tunable loads, i.i.d. uniform in the scenario's
    resistance and inductance boxes.

    By default the draws come from the dedicated load substream of the
    scenario seed, so the sampled configurations do not depend on how much
    noise is drawn elsewhere. Resistance values are drawn first, then
    inductances, both row-major over (transmission, element).
    """
    r_min, r_max = scenario.load_resistance_range
    l_min, l_max = scenario.load_inductance_range
    if r_max < r_min or l_max < l_min:
        raise ValueError("load ranges must satisfy min <= max")
    if rng is None:
        rng = substream(scenario.rng_seed, LOADS_STREAM)
    shape = (scenario.num_transmissions, scenario.ris.num_elements)
    resistance = rng.uniform(r_min, r_max, shape)
    inductance = rng.uniform(l_min, l_max, shape)
    loads = resistance + 1j * scenario.constants.omega * inductance
    return RisLoadSequence(loads=loads, generation_seed=scenario.rng_seed)


def _factor(z: np.ndarray, context: str):
    anorm = np.linalg.norm(z, 1)
    with warnings.catch_warnings():
        # exact singularity is caught below via the condition estimate
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(z, check_finite=False)
    gecon = get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm)
    if info != 0 or not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        raise SingularModelError(
            f"{context}: impedance system is singular or numerically rank "
            f"deficient (reciprocal condition estimate {rcond:.3e})",
            rcond=float(rcond),
        )
    return lu, piv


def e2e_channel(z_rs, z_ss_total, z_ris_g, z_st) -> complex:
    """Scalar end-to-end channel for one RIS configuration.

    ``z_ris_g`` holds the N diagonal load values. The (N x N) system is
    solved via LU, never inverted.
    """
    z_rs = np.asarray(z_rs, dtype=complex)
    z_st = np.asarray(z_st, dtype=complex)
    z = np.array(z_ss_total, dtype=complex)
    n = z.shape[0]
    diag = np.arange(n)
    z[diag, diag] += np.asarray(z_ris_g, dtype=complex)
    lu_piv = _factor(z, "end-to-end channel")
    return complex(z_rs @ lu_solve(lu_piv, z_st, check_finite=False))


def build_B(z_rs, z_ss_self, z_ss_mutual, load_seq) -> np.ndarray:
    """Stack the per-configuration row vectors into the G x N model matrix.

    Row g is ``z_rs^T (diag(z_ss_self) + z_ss_mutual + diag(loads_g))^{-1}``.
    The system matrix is complex-symmetric, so the transposed solve that a
    row requires coincides with the plain solve of the factored system.
    Passing ``None`` (or zeros) for ``z_ss_mutual`` produces the
    coupling-unaware model.
    """
    z_rs = np.asarray(z_rs, dtype=complex)
    n = z_rs.shape[0]
    loads = load_seq.loads if isinstance(load_seq, RisLoadSequence) else np.asarray(load_seq)
    if loads.ndim != 2 or loads.shape[1] != n:
        raise ValueError(f"loads must be (G, {n}), got {loads.shape}")
    base = np.zeros((n, n), dtype=complex) if z_ss_mutual is None \
        else np.array(z_ss_mutual, dtype=complex)
    diag = np.arange(n)
    base[diag, diag] += np.asarray(z_ss_self, dtype=complex)

    g_total = loads.shape[0]
    b = np.empty((g_total, n), dtype=complex)
    z = np.empty_like(base)
    for g in range(g_total):
        np.copyto(z, base)
        z[diag, diag] += loads[g]
        lu_piv = _factor(z, f"configuration {g}")
        b[g] = lu_solve(lu_piv, z_rs, check_finite=False)
    return b


@dataclass(frozen=True)
class RealifiedModel:
    """Real 2G x 2N block form of a complex G x N model matrix."""

    matrix: np.ndarray
    includes_mutual_coupling: bool

    def __post_init__(self):
        d = np.asarray(self.matrix, dtype=float)
        if d.ndim != 2 or d.shape[0] % 2 or d.shape[1] % 2:
            raise ValueError("realified matrix must be 2G x 2N")
        g, n = d.shape[0] // 2, d.shape[1] // 2
        scale = np.linalg.norm(d)
        tol = 1e-12 * scale
        if np.linalg.norm(d[:g, :n] - d[g:, n:]) > tol or \
           np.linalg.norm(d[:g, n:] + d[g:, :n]) > tol:
            raise ValueError("matrix does not have the [[Re,-Im],[Im,Re]] block structure")
        d.flags.writeable = False
        object.__setattr__(self, "matrix", d)

    @property
    def num_configurations(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def num_elements(self) -> int:
        return self.matrix.shape[1] // 2

    @property
    def complex_model(self) -> np.ndarray:
        """Recover the complex G x N matrix from the top block row."""
        g, n = self.num_configurations, self.num_elements
        return self.matrix[:g, :n] + 1j * self.matrix[g:, :n]


def realify(b: np.ndarray, *, includes_mutual_coupling: bool) -> RealifiedModel:
    """Map complex G x N to the real [[Re,-Im],[Im,Re]] block matrix."""
    b = np.asarray(b, dtype=complex)
    re, im = b.real, b.imag
    d = np.block([[re, -im], [im, re]])
    return RealifiedModel(matrix=d, includes_mutual_coupling=includes_mutual_coupling)


def realify_vec(v) -> np.ndarray:
    """Stack [Re(v); Im(v)] of a complex vector."""
    v = np.asarray(v, dtype=complex)
    return np.concatenate((v.real, v.imag))


def complexify_vec(x) -> np.ndarray:
    """Inverse of realify_vec."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] % 2:
        raise ValueError("realified vector must have even length")
    n = x.shape[0] // 2
    return x[:n] + 1j * x[n:]


def as_model_matrix(d) -> np.ndarray:
    """Accept a RealifiedModel or a raw 2G x 2N array."""
    return d.matrix if isinstance(d, RealifiedModel) else np.asarray(d, dtype=float)


def model_pair(impedances: ImpedanceSet, load_seq) -> tuple[RealifiedModel, RealifiedModel, np.ndarray]:
    """Build the coupling-aware and coupling-unaware realified models plus
    the realified true channel vector for one impedance set."""
    b_true = build_B(impedances.z_rs, impedances.z_ss_self,
                     impedances.z_ss_mutual, load_seq)
    b_est = build_B(impedances.z_rs, impedances.z_ss_self, None, load_seq)
    d_true = realify(b_true, includes_mutual_coupling=True)
    d_est = realify(b_est, includes_mutual_coupling=False)
    return d_true, d_est, realify_vec(impedances.z_st)


def generate_observations(
    d_true,
    x_true,
    p_t: float,
    sigma2: float,
    rng: np.random.Generator,
    *,
    noiseless: bool = False,
) -> np.ndarray:
    """One stacked real observation vector: sqrt(P_T) * D x plus white
    Gaussian noise of per-component variance sigma2/2 (suppressed entirely
    when ``noiseless`` is set)."""
    if not p_t > 0.0:
        raise ValueError("transmit power must be positive")
    if not sigma2 > 0.0:
        raise ValueError("noise variance must be positive")
    d = as_model_matrix(d_true)
    x = np.asarray(x_true, dtype=float)
    r = np.sqrt(p_t) * (d @ x)
    if not noiseless:
        r = r + rng.standard_normal(d.shape[0]) * np.sqrt(sigma2 / 2.0)
    return r

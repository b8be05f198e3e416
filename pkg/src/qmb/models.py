"""Parameterized state families: tunable two-parameter qubit and SU(2) qubit/qutrit.

Each model produces the density matrix, its exact parameter derivatives, and
closed-form QFIM / Uhlmann-curvature cross-checks.

Conventions worth spelling out once:

* The tunable qubit encodes (lambda1, lambda2) via z-phase unitaries with an
  intermediate rotation ``exp(-i gamma n.sigma)``; the Bloch vector of the
  final state is ``Rz(2 lambda2) R_n(2 gamma) Rz(2 lambda1) r0``, and the
  parameters enter only through ``xi = 2 lambda1 - phi`` and
  ``eps = 2 lambda2 + phi``.
* The SU(2) models carry generator triples in the initial-frame convention
  ``H_k = i (d_k U^dag) U``; with this choice the closed-form QFIM and
  Uhlmann entries are expectation values in the *initial* state, and the
  exact derivative relation is ``d_k rho = U (i [H_k, rho0]) U^dag``.
  The forward convention ``i (d_k U) U^dag`` (what `unitary_generator`
  computes) is related by ``i (d_k U^dag) U = -U^dag [i (d_k U) U^dag] U``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import StepTooLarge
from .linalg import hermitian_part

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (PAULI_X, PAULI_Y, PAULI_Z)

MODEL_IDS = ("tunable_qubit", "su2_qubit", "su2_qutrit")

PARAM_NAMES: dict[str, tuple[str, ...]] = {
    "tunable_qubit": ("lambda1", "lambda2"),
    "su2_qubit": ("B", "theta"),
    "su2_qutrit": ("B", "theta", "phi"),
}


def su2_generators(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin matrices (Jx, Jy, Jz) for the spin-(dim-1)/2 representation.

    Basis ordering is by descending magnetic quantum number, i.e.
    (|1>, |0>, |-1>) for dim = 3.
    """
    j = (dim - 1) / 2.0
    m = j - np.arange(dim)
    jz = np.diag(m).astype(complex)
    ladder = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.zeros((dim, dim), dtype=complex)
    jp[np.arange(dim - 1), np.arange(1, dim)] = ladder
    jx = 0.5 * (jp + jp.conj().T)
    jy = -0.5j * (jp - jp.conj().T)
    return jx, jy, jz


def rotation_about_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_about_axis(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def expm_generator(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(-i t H) for Hermitian H via spectral decomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


@dataclass(frozen=True)
class ModelConfig:
    """A model family plus its fixed constants (angles, Bloch components, time)."""

    model_id: str
    constants: Mapping[str, float]

    @property
    def n_params(self) -> int:
        return len(PARAM_NAMES[self.model_id])


@dataclass(frozen=True)
class ModelPoint:
    """A model evaluated at one parameter vector."""

    params: tuple[float, ...]
    rho: np.ndarray
    derivs: tuple[np.ndarray, ...]
    analytic_geometry: tuple[np.ndarray, np.ndarray] | None = None
    analytic_slds: tuple[np.ndarray, ...] | None = None
    generators: tuple[np.ndarray, ...] | None = None


def model_config(model_id: str, **constants: float) -> ModelConfig:
    if model_id not in MODEL_IDS:
        raise ValueError(f"unknown model {model_id!r}; expected one of {MODEL_IDS}")
    for key, val in constants.items():
        if not math.isfinite(float(val)):
            raise ValueError(f"constant {key}={val!r} is not finite")
    constants = {k: float(v) for k, v in constants.items()}
    if model_id == "tunable_qubit":
        missing = {"gamma", "theta", "phi"} - constants.keys()
        if missing:
            raise ValueError(f"tunable_qubit requires constants {sorted(missing)}")
        r0 = tunable_qubit_r0(constants)
        if r0 @ r0 > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector norm {np.linalg.norm(r0)!r} exceeds 1")
    else:
        missing = {"alpha", "beta", "t"} - constants.keys()
        if missing:
            raise ValueError(f"{model_id} requires constants {sorted(missing)}")
        if constants["t"] <= 0:
            raise ValueError("evolution time t must be positive")
    return ModelConfig(model_id, constants)


def tunable_qubit_r0(constants: Mapping[str, float]) -> np.ndarray:
    """Initial Bloch vector, either explicit (r_x, r_y, r_z) or pure-state (alpha, beta)."""
    if "alpha" in constants or "beta" in constants:
        if not {"alpha", "beta"} <= constants.keys():
            raise ValueError("pure-state form needs both alpha and beta")
        a, b = constants["alpha"], constants["beta"]
        return np.array([math.sin(a) * math.cos(b), math.sin(a) * math.sin(b), math.cos(a)])
    try:
        return np.array([constants["r_x"], constants["r_y"], constants["r_z"]], dtype=float)
    except KeyError as exc:
        raise ValueError("tunable_qubit requires r_x, r_y, r_z (or alpha, beta)") from exc


def _bloch_closed_form(
    r0: np.ndarray, gamma: float, theta: float, phi: float, l1: float, l2: float
) -> np.ndarray:
    # Closed-form components in terms of xi, eps and the in-plane projections
    # A(e) = r_y cos(xi+e) + r_x sin(xi+e), B(e) = r_x cos(xi+e) - r_y sin(xi+e).
    rx, ry, rz = r0
    xi = 2.0 * l1 - phi
    eps = 2.0 * l2 + phi
    k1 = math.sin(gamma) * math.sin(theta)
    k2 = math.sin(gamma) * math.cos(theta)
    cg = math.cos(gamma)
    sg2 = math.sin(gamma) ** 2

    def a_of(e: float) -> float:
        return ry * math.cos(xi + e) + rx * math.sin(xi + e)

    def b_of(e: float) -> float:
        return rx * math.cos(xi + e) - ry * math.sin(xi + e)

    ce, se = math.cos(eps), math.sin(eps)
    rxp = (
        -2.0 * k2 * cg * a_of(eps)
        + (1.0 - 2.0 * k2 * k2) * b_of(eps)
        + 2.0 * k1 * k1 * se * a_of(0.0)
        + 2.0 * k1 * rz * (k2 * ce + cg * se)
    )
    ryp = (
        cg * cg * a_of(eps)
        + 2.0 * k2 * cg * b_of(eps)
        + 2.0 * k1 * rz * (k2 * se - cg * ce)
        - sg2 * (ce * a_of(0.0) + math.cos(2.0 * theta) * se * b_of(0.0))
    )
    rzp = (1.0 - 2.0 * k1 * k1) * rz + 2.0 * k1 * (cg * a_of(0.0) + k2 * b_of(0.0))
    return np.array([rxp, ryp, rzp])


def _rotation_axis(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [math.cos(phi) * math.sin(theta), math.sin(phi) * math.sin(theta), math.cos(theta)]
    )


def tunable_qubit_bloch(cfg: ModelConfig, l1: float, l2: float) -> np.ndarray:
    """Transformed Bloch vector Rz(2 l2) R_n(2 gamma) Rz(2 l1) r0.

    Evaluated both by composing the rotation matrices and by the closed-form
    component expressions; the two paths must agree to 1e-10.
    """
    c = cfg.constants
    r0 = tunable_qubit_r0(c)
    gamma, theta, phi = c["gamma"], c["theta"], c["phi"]
    composed = (
        rotation_about_z(2.0 * l2)
        @ rotation_about_axis(_rotation_axis(theta, phi), 2.0 * gamma)
        @ rotation_about_z(2.0 * l1)
        @ r0
    )
    closed = _bloch_closed_form(r0, gamma, theta, phi, l1, l2)
    mismatch = float(np.max(np.abs(composed - closed)))
    if mismatch > 1e-10:
        raise AssertionError(f"Bloch dual-path mismatch {mismatch:.3e}")
    return composed


def _tunable_qubit_bloch_derivs(
    cfg: ModelConfig, l1: float, l2: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(r, d1 r, d2 r) with the derivatives taken analytically.

    d Rz(2 l)/d l = 2 [z x] Rz(2 l), so each derivative is a rotated cross
    product; no finite differences are involved.
    """
    c = cfg.constants
    r0 = tunable_qubit_r0(c)
    gamma, theta, phi = c["gamma"], c["theta"], c["phi"]
    rot_v = rotation_about_axis(_rotation_axis(theta, phi), 2.0 * gamma)
    rz1 = rotation_about_z(2.0 * l1)
    rz2 = rotation_about_z(2.0 * l2)
    zhat = np.array([0.0, 0.0, 1.0])
    w = rz1 @ r0
    r = rz2 @ (rot_v @ w)
    d1 = rz2 @ (rot_v @ (2.0 * np.cross(zhat, w)))
    d2 = 2.0 * np.cross(zhat, r)
    return r, d1, d2


def bloch_geometry(
    r: np.ndarray, derivs: Sequence[np.ndarray], tangency_tol: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """QFIM and Uhlmann matrix of a qubit state from its Bloch vector path.

    Q_ij = di.dj + (r.di)(r.dj)/(1-|r|^2), U_ij = r.(di x dj).  At |r| = 1
    the radial term is 0/0; rotations keep r.di = 0 exactly, so the term is
    defined as 0 whenever |r.di| < tangency_tol.
    """
    d = len(derivs)
    rr = float(r @ r)
    radial = np.array([float(r @ dv) for dv in derivs])
    q = np.empty((d, d))
    u = np.zeros((d, d))
    purity_gap = 1.0 - rr
    for i in range(d):
        for j in range(i, d):
            val = float(derivs[i] @ derivs[j])
            if purity_gap > 1e-12:
                val += radial[i] * radial[j] / purity_gap
            elif abs(radial[i]) >= tangency_tol or abs(radial[j]) >= tangency_tol:
                raise ValueError("pure-state limit needs tangential derivatives")
            q[i, j] = q[j, i] = val
    for i in range(d):
        for j in range(i + 1, d):
            u[i, j] = float(r @ np.cross(derivs[i], derivs[j]))
            u[j, i] = -u[i, j]
    return q, u


def tunable_qubit_point(cfg: ModelConfig, params: Sequence[float]) -> ModelPoint:
    """Tunable-qubit model point: state, exact derivatives, analytic (Q, U), SLDs.

    The analytic SLDs are L_i = (d_i r).sigma, which solves the defining
    equation exactly because the Bloch path is an isometry (r.dr = 0).
    """
    l1, l2 = (float(x) for x in params)
    cross_check = tunable_qubit_bloch(cfg, l1, l2)
    r, d1, d2 = _tunable_qubit_bloch_derivs(cfg, l1, l2)
    if float(np.max(np.abs(r - cross_check))) > 1e-10:
        raise AssertionError("Bloch path mismatch between derivative and direct routes")
    eye = np.eye(2, dtype=complex)
    rho = 0.5 * (eye + sum(r[k] * PAULI[k] for k in range(3)))
    derivs = tuple(hermitian_part(0.5 * sum(dv[k] * PAULI[k] for k in range(3))) for dv in (d1, d2))
    slds = tuple(hermitian_part(sum(dv[k] * PAULI[k] for k in range(3))) for dv in (d1, d2))
    q, u = bloch_geometry(r, (d1, d2))
    return ModelPoint(
        params=(l1, l2),
        rho=hermitian_part(rho),
        derivs=derivs,
        analytic_geometry=(q, u),
        analytic_slds=slds,
    )


def _su2_qubit_axes(b: float, theta: float, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s, c = math.sin(b * t / 2.0), math.cos(b * t / 2.0)
    n_theta = np.array([math.cos(theta), 0.0, math.sin(theta)])
    n1 = np.array([c * math.sin(theta), -s, -c * math.cos(theta)])
    n2 = np.cross(n_theta, n1)
    return n_theta, n1, n2


def _su2_qutrit_axes(
    b: float, theta: float, phi: float, t: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s, c = math.sin(b * t / 2.0), math.cos(b * t / 2.0)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    n_theta = np.array([ct * cp, ct * sp, st])
    n1 = np.array([s * sp + c * st * cp, -s * cp + c * st * sp, -c * ct])
    n2 = np.array([c * sp - s * st * cp, -c * cp - s * st * sp, s * ct])
    return n_theta, n1, n2


def _dot_j(vec: np.ndarray, js: Sequence[np.ndarray]) -> np.ndarray:
    return vec[0] * js[0] + vec[1] * js[1] + vec[2] * js[2]


def _unitary_point(
    psi0: np.ndarray,
    hamiltonian_dir: np.ndarray,
    b: float,
    t: float,
    js: Sequence[np.ndarray],
    generators: Sequence[np.ndarray],
) -> tuple[np.ndarray, tuple[np.ndarray, ...], tuple[np.ndarray, ...]]:
    """Evolved state, exact derivatives, and pure-state SLDs from generators."""
    u = expm_generator(b * _dot_j(hamiltonian_dir, js), t)
    rho0 = np.outer(psi0, psi0.conj())
    rho = hermitian_part(u @ rho0 @ u.conj().T)
    derivs = []
    for gen in generators:
        commutator = gen @ rho0 - rho0 @ gen
        derivs.append(hermitian_part(u @ (1j * commutator) @ u.conj().T))
    slds = tuple(2.0 * dr for dr in derivs)
    return rho, tuple(derivs), slds


def su2_qubit_point(cfg: ModelConfig, b: float, theta: float) -> ModelPoint:
    """SU(2) qubit under H = B (cos(theta) Jx + sin(theta) Jz), pure probe."""
    c = cfg.constants
    alpha, beta, t = c["alpha"], c["beta"], c["t"]
    b, theta = float(b), float(theta)
    js = tuple(0.5 * p for p in PAULI)
    psi0 = np.array([math.cos(alpha / 2.0), math.sin(alpha / 2.0) * np.exp(1j * beta)])
    n_theta, n1, n2 = _su2_qubit_axes(b, theta, t)
    s = math.sin(b * t / 2.0)
    gens = (-t * _dot_j(n_theta, js), 2.0 * s * _dot_j(n1, js))
    rho, derivs, slds = _unitary_point(psi0, n_theta, b, t, js, gens)
    r0 = np.array(
        [math.sin(alpha) * math.cos(beta), math.sin(alpha) * math.sin(beta), math.cos(alpha)]
    )
    q = np.empty((2, 2))
    q[0, 0] = t**2 * (1.0 - (n_theta @ r0) ** 2)
    q[1, 1] = 4.0 * s**2 * (1.0 - (n1 @ r0) ** 2)
    q[0, 1] = q[1, 0] = 2.0 * t * s * (n1 @ r0) * (n_theta @ r0)
    u_theta_b = 2.0 * t * s * (n2 @ r0)
    u = np.array([[0.0, -u_theta_b], [u_theta_b, 0.0]])
    return ModelPoint(
        params=(b, theta),
        rho=rho,
        derivs=derivs,
        analytic_geometry=(q, u),
        analytic_slds=slds,
        generators=gens,
    )


def su2_qutrit_point(cfg: ModelConfig, b: float, theta: float, phi: float) -> ModelPoint:
    """SU(2) qutrit (spin-1) under H = B J_n with n = (ct cp, ct sp, st)."""
    c = cfg.constants
    alpha, beta, t = c["alpha"], c["beta"], c["t"]
    b, theta, phi = float(b), float(theta), float(phi)
    js = su2_generators(3)
    psi0 = np.array([math.cos(alpha / 2.0), 0.0, math.sin(alpha / 2.0) * np.exp(1j * beta)])
    n_theta, n1, n2 = _su2_qutrit_axes(b, theta, phi, t)
    s = math.sin(b * t / 2.0)
    ct = math.cos(theta)
    gens = (
        -t * _dot_j(n_theta, js),
        2.0 * s * _dot_j(n1, js),
        2.0 * ct * s * _dot_j(n2, js),
    )
    rho, derivs, slds = _unitary_point(psi0, n_theta, b, t, js, gens)
    q, u = _su2_qutrit_closed_geometry(alpha, beta, b, theta, phi, t)
    return ModelPoint(
        params=(b, theta, phi),
        rho=rho,
        derivs=derivs,
        analytic_geometry=(q, u),
        analytic_slds=slds,
        generators=gens,
    )


def _su2_qutrit_closed_geometry(
    alpha: float, beta: float, b: float, theta: float, phi: float, t: float
) -> tuple[np.ndarray, np.ndarray]:
    x = math.sin(alpha) * math.cos(beta - 2.0 * phi)
    y = math.sin(alpha) * math.sin(beta - 2.0 * phi)
    s, c = math.sin(b * t / 2.0), math.cos(b * t / 2.0)
    s_bt, c_bt = math.sin(b * t), math.cos(b * t)
    c2a = math.cos(2.0 * alpha)
    ct, st = math.cos(theta), math.sin(theta)
    q = np.empty((3, 3))
    q[0, 0] = 2.0 * t**2 * (1.0 - st**2 * c2a + ct**2 * x)
    q[1, 1] = 8.0 * s**2 * (
        1.0 - c**2 * c2a * ct**2 + (c**2 * st**2 - s**2) * x - s_bt * st * y
    )
    q[2, 2] = 8.0 * ct**2 * s**2 * (
        1.0 - s**2 * c2a * ct**2 - (c**2 - st**2 * s**2) * x + s_bt * st * y
    )
    q[0, 1] = q[1, 0] = 4.0 * t * ct * s * (s * y - c * st * (c2a + x))
    q[0, 2] = q[2, 0] = 4.0 * t * ct**2 * s * (s * st * (c2a + x) + c * y)
    q[1, 2] = q[2, 1] = 4.0 * ct * s**2 * (
        s_bt * (c2a * ct**2 - (st**2 + 1.0) * x) - 2.0 * c_bt * st * y
    )
    ca = math.cos(alpha)
    u = np.zeros((3, 3))
    u[0, 1] = 4.0 * t * ca * ct * s**2
    u[0, 2] = 2.0 * t * ca * ct**2 * s_bt
    u[1, 2] = -4.0 * ca * s**2 * math.sin(2.0 * theta)
    u -= u.T
    return q, u


def model_point(cfg: ModelConfig, params: Sequence[float]) -> ModelPoint:
    """Dispatch to the model family named in the config."""
    if cfg.model_id == "tunable_qubit":
        return tunable_qubit_point(cfg, params)
    if cfg.model_id == "su2_qubit":
        return su2_qubit_point(cfg, *params)
    if cfg.model_id == "su2_qutrit":
        return su2_qutrit_point(cfg, *params)
    raise ValueError(f"unknown model {cfg.model_id!r}")


def unitary_generator(
    u_path: Callable[[float], np.ndarray],
    x: float,
    h: float = 1e-3,
    full_output: bool = False,
):
    """Translation generator i (dU/dx) U^dag by 4-point central differences.

    The 4-point stencil is the Richardson extrapolation of the plain central
    difference; if the two disagree by more than 1e-4 the step is too large
    for the path's curvature.  The Hermiticity defect before symmetrization
    is available as a diagnostic via ``full_output``.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    u0 = u_path(x)
    d_one = (u_path(x + h) - u_path(x - h)) / (2.0 * h)
    d_two = (u_path(x + 2.0 * h) - u_path(x - 2.0 * h)) / (4.0 * h)
    d_rich = (4.0 * d_one - d_two) / 3.0
    gen_raw = 1j * d_rich @ u0.conj().T
    gen_one = 1j * d_one @ u0.conj().T
    if float(np.max(np.abs(gen_raw - gen_one))) > 1e-4:
        raise StepTooLarge(
            f"Richardson and one-step generator estimates differ by "
            f"{float(np.max(np.abs(gen_raw - gen_one))):.3e} at x={x!r}; reduce h"
        )
    defect = float(np.max(np.abs(gen_raw - gen_raw.conj().T)))
    gen = hermitian_part(gen_raw)
    if full_output:
        return gen, defect
    return gen


def generator_geometry(
    psi0: np.ndarray, gens: Sequence[np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Pure-state QFIM and Uhlmann matrix from translation generators.

    Q_kl = 2 <{H_k, H_l}> - 4 <H_k><H_l> and U_kl = -2i <[H_k, H_l]>,
    expectations in psi0.
    """
    psi = np.asarray(psi0, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"psi0 must be unit norm, got {norm!r}")
    d = len(gens)
    applied = [g @ psi for g in gens]
    means = np.array([np.real(psi.conj() @ v) for v in applied])
    q = np.empty((d, d))
    u = np.zeros((d, d))
    for k in range(d):
        for l in range(k, d):
            second = complex(applied[k].conj() @ applied[l])
            q[k, l] = q[l, k] = 4.0 * second.real - 4.0 * means[k] * means[l]
            if l > k:
                u[k, l] = 4.0 * second.imag
                u[l, k] = -u[k, l]
    return q, u


def tunable_qubit_pure_geometry_grid(
    alpha: np.ndarray,
    beta: np.ndarray,
    gamma: np.ndarray,
    theta: np.ndarray,
    phi: np.ndarray,
    l1: float = 0.0,
    l2: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (Q11, Q12, Q22, U12) over broadcastable pure-state angle grids.

    Same geometry as `tunable_qubit_point` restricted to |r0| = 1, evaluated
    without constructing density matrices; used by the weight-asymmetry
    figure preset, which maximizes over a large angle grid.
    """
    alpha, beta, gamma, theta, phi = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (alpha, beta, gamma, theta, phi))
    )
    r0 = np.stack(
        [np.sin(alpha) * np.cos(beta), np.sin(alpha) * np.sin(beta), np.cos(alpha)], axis=-1
    )
    zhat = np.zeros_like(r0)
    zhat[..., 2] = 1.0

    def rot_z(v: np.ndarray, ang: float) -> np.ndarray:
        c, s = math.cos(ang), math.sin(ang)
        out = np.empty_like(v)
        out[..., 0] = c * v[..., 0] - s * v[..., 1]
        out[..., 1] = s * v[..., 0] + c * v[..., 1]
        out[..., 2] = v[..., 2]
        return out

    def rot_axis(v: np.ndarray) -> np.ndarray:
        n = np.stack(
            [np.cos(phi) * np.sin(theta), np.sin(phi) * np.sin(theta), np.cos(theta)], axis=-1
        )
        cg = np.cos(2.0 * gamma)[..., None]
        sg = np.sin(2.0 * gamma)[..., None]
        ndotv = np.sum(n * v, axis=-1, keepdims=True)
        return v * cg + np.cross(n, v) * sg + n * ndotv * (1.0 - cg)

    w = rot_z(r0, 2.0 * l1)
    r = rot_z(rot_axis(w), 2.0 * l2)
    d1 = rot_z(rot_axis(2.0 * np.cross(zhat, w)), 2.0 * l2)
    d2 = 2.0 * np.cross(zhat, r)
    q11 = np.sum(d1 * d1, axis=-1)
    q22 = np.sum(d2 * d2, axis=-1)
    q12 = np.sum(d1 * d2, axis=-1)
    u12 = np.sum(r * np.cross(d1, d2), axis=-1)
    return q11, q12, q22, u12

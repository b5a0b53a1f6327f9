"""Validation-grade 7-DOF rigid-body dynamics of the tethered turbine.

A 6-DOF body (surge/sway/heave plus roll/pitch/yaw, with roll split
between body and rotor) is coupled to a 1-DOF rotor spinning about the
body x-axis. Inertial properties are inputs and are expected to already
include added-mass (virtual) contributions. Force and moment models are
pluggable callables; the shipped surrogate model is a deliberately simple,
non-physical stand-in (see SurrogateEnvironment) that keeps the equations
exercised end to end.

Frames: inertial z is down (depth positive), body axes are forward-right-
down, Euler angles are roll/pitch/yaw (ZYX convention).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

STATE_LABELS = ("u", "v", "w", "p_b", "p_r", "q", "r",
                "x", "y", "z", "phi", "theta", "psi")
FULL_STATE_LABELS = STATE_LABELS + ("phi_r",)
INPUT_LABELS = ("B_f", "B_a", "tau_em")

# Published operating point of the 700 kW turbine in a 1.6 m/s current:
# at 50 m depth, trailing 554.5 m downstream of the anchor, heading into
# the flow, rotor at 1.49 rad/s, both tanks at 0.4677 fill.
NOMINAL_STATE = np.array([0.0, 0.0, 0.0, 0.0, 1.49, 0.0, 0.0,
                          554.50, 0.38, 50.0, 0.01, 0.00, 3.14])
NOMINAL_CONTROLS = np.array([0.4677, 0.4677, -188280.0])

CONDITION_LIMIT = 1e12
GIMBAL_LIMIT_RAD = np.deg2rad(85.0)


@dataclass(frozen=True)
class InertiaSet:
    """Mass/inertia properties (actual plus added), all in the body frame."""

    m: float        # [kg] total translational mass
    m_b: float      # [kg] body (non-rotor) mass
    m_r: float      # [kg] rotor mass
    x_cg: float     # [m] combined CG offset along x
    x_cg_b: float   # [m] body CG offset along x
    x_cg_r: float   # [m] rotor CG offset along x
    z_cg_b: float   # [m] body CG offset along z
    I_x_b: float    # [kg m^2] body roll inertia
    I_y: float      # [kg m^2] total pitch inertia
    I_z: float      # [kg m^2] total yaw inertia
    I_xz_b: float   # [kg m^2] body roll/yaw product of inertia
    I_x_r: float    # [kg m^2] rotor spin inertia
    I_y_b: float    # [kg m^2]
    I_z_b: float    # [kg m^2]
    I_y_r: float    # [kg m^2]
    I_z_r: float    # [kg m^2]

    def __post_init__(self):
        for name in ("m", "m_b", "m_r"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("I_x_b", "I_y", "I_z", "I_x_r", "I_y_b", "I_z_b",
                     "I_y_r", "I_z_r"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


def default_inertia() -> InertiaSet:
    """Plausible magnitudes for the 500 t class turbine, added mass included."""
    return InertiaSet(
        m=7.0e5, m_b=6.2e5, m_r=8.0e4,
        x_cg=0.5, x_cg_b=0.4, x_cg_r=-8.0, z_cg_b=1.2,
        I_x_b=2.0e7, I_y=5.0e7, I_z=5.2e7, I_xz_b=1.0e5,
        I_x_r=3.0e6, I_y_b=4.5e7, I_z_b=4.7e7, I_y_r=1.6e6, I_z_r=1.6e6,
    )


def _wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = (a + np.pi) % (2.0 * np.pi) - np.pi
    return np.pi if w == -np.pi else w


@dataclass(frozen=True)
class RigidBodyState:
    """The 14 nonlinear states."""

    position: tuple[float, float, float]   # [m] inertial (x, y, z), z down
    velocity: tuple[float, float, float]   # [m/s] body (u, v, w)
    euler: tuple[float, float, float]      # [rad] (phi, theta, psi), each in (-pi, pi]
    rates: tuple[float, float, float]      # [rad/s] body (p_b, q, r)
    rotor_rate: float                      # [rad/s] p_r
    rotor_angle: float                     # [rad] phi_r, in (-pi, pi]

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))
        object.__setattr__(self, "velocity", tuple(float(x) for x in self.velocity))
        object.__setattr__(self, "euler",
                           tuple(_wrap_angle(float(a)) for a in self.euler))
        object.__setattr__(self, "rates", tuple(float(x) for x in self.rates))
        object.__setattr__(self, "rotor_angle", _wrap_angle(float(self.rotor_angle)))

    def to_vector(self) -> np.ndarray:
        """[u v w p_b p_r q r x y z phi theta psi phi_r]."""
        u, v, w = self.velocity
        p_b, q, r = self.rates
        return np.array([u, v, w, p_b, self.rotor_rate, q, r,
                         *self.position, *self.euler, self.rotor_angle])

    @classmethod
    def from_vector(cls, vec) -> "RigidBodyState":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (14,):
            raise ValueError(f"state vector must have 14 entries, got {vec.shape}")
        return cls(position=tuple(vec[7:10]), velocity=tuple(vec[0:3]),
                   euler=tuple(vec[10:13]), rates=(vec[3], vec[5], vec[6]),
                   rotor_rate=vec[4], rotor_angle=vec[13])


@dataclass(frozen=True)
class ForceSet:
    """External generalized forcing, all in the body frame."""

    forces: tuple[float, float, float]    # [N] (f_x, f_y, f_z)
    moments: tuple[float, float, float]   # [N m] (M_x_b, M_y, M_z)
    rotor_moment: float                   # [N m] M_x_r about body x
    shaft_torque: float                   # [N m] tau_em between rotor and body

    def __post_init__(self):
        values = (*self.forces, *self.moments, self.rotor_moment, self.shaft_torque)
        if not all(np.isfinite(v) for v in values):
            raise ValueError(f"non-finite entry in ForceSet: {values}")


@dataclass(frozen=True)
class LinearModel:
    A: np.ndarray       # (13, 13)
    B: np.ndarray       # (13, 3)
    x_eq: np.ndarray    # (13,)
    u_eq: np.ndarray    # (3,)

    def __post_init__(self):
        for name, shape in (("A", (13, 13)), ("B", (13, 3)),
                            ("x_eq", (13,)), ("u_eq", (3,))):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, arr)


def assemble_mass_matrix(inertia: InertiaSet) -> np.ndarray:
    """The 6x6 generalized mass matrix coupling translation and rotation."""
    m, mb = inertia.m, inertia.m_b
    xc, zb = inertia.x_cg, inertia.z_cg_b
    return np.array([
        [m,        0.0,      0.0,     0.0,            mb * zb,        0.0],
        [0.0,      m,        0.0,     -mb * zb,       0.0,            m * xc],
        [0.0,      0.0,      m,       0.0,            -m * xc,        0.0],
        [0.0,      -mb * zb, 0.0,     inertia.I_x_b,  0.0,            -inertia.I_xz_b],
        [mb * zb,  0.0,      -m * xc, 0.0,            inertia.I_y,    0.0],
        [0.0,      m * xc,   0.0,     -inertia.I_xz_b, 0.0,           inertia.I_z],
    ])


def assemble_forcing(state: RigidBodyState, forces: ForceSet,
                     inertia: InertiaSet) -> np.ndarray:
    """The 6-entry generalized forcing vector (rate-coupling terms included)."""
    u, v, w = state.velocity
    p_b, q, r = state.rates
    p_r = state.rotor_rate
    f_x, f_y, f_z = forces.forces
    M_x_b, M_y, M_z = forces.moments
    m, mb, mr = inertia.m, inertia.m_b, inertia.m_r
    xc, xb, xr, zb = inertia.x_cg, inertia.x_cg_b, inertia.x_cg_r, inertia.z_cg_b

    return np.array([
        f_x + m * (v * r - w * q) + m * xc * (q**2 + r**2) - mb * zb * p_b * r,
        (f_y - m * u * r + w * (mb * p_b + mr * p_r) - mb * zb * q * r
         - mb * xb * q * p_b - mr * xr * q * p_r),
        (f_z + m * u * q - v * (mb * p_b + mr * p_r) + mb * zb * (p_b**2 + q**2)
         - mb * xb * r * p_b - mr * xr * r * p_r),
        (M_x_b + forces.shaft_torque - q * r * (inertia.I_z_b - inertia.I_y_b)
         + inertia.I_xz_b * p_b * q - mb * zb * (w * p_b - u * r)),
        (M_y - r * p_b * (inertia.I_x_b - inertia.I_z_b)
         - r * p_r * (inertia.I_x_r - inertia.I_z_r)
         - inertia.I_xz_b * (p_b**2 - r**2)
         + mb * zb * (v * r - w * q) - m * xc * u * q
         + mb * xb * v * p_b + mr * xr * v * p_r),
        # The final w*p_r product mirrors the v*p_r term of the pitch row.
        (M_z - q * p_b * (inertia.I_y_b - inertia.I_x_b)
         - q * p_r * (inertia.I_y_r - inertia.I_x_r)
         - inertia.I_xz_b * r * q - m * xc * u * r
         + mb * xb * w * p_b + mr * xr * w * p_r),
    ])


def accelerations(state: RigidBodyState, forces: ForceSet,
                  inertia: InertiaSet) -> np.ndarray:
    """[du dv dw dp_b dq dr dp_r]: solve the 6-DOF system, then append the
    rotor spin acceleration about body x."""
    M = assemble_mass_matrix(inertia)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericalError(
            f"mass matrix condition number {cond:.3g} exceeds {CONDITION_LIMIT:.0e}")
    body = np.linalg.solve(M, assemble_forcing(state, forces, inertia))
    q, r = state.rates[1], state.rates[2]
    rotor = (forces.rotor_moment - forces.shaft_torque
             - q * r * (inertia.I_z_r - inertia.I_y_r)) / inertia.I_x_r
    return np.append(body, rotor)


def _rotation_body_to_inertial(phi: float, theta: float, psi: float) -> np.ndarray:
    cph, sph = np.cos(phi), np.sin(phi)
    cth, sth = np.cos(theta), np.sin(theta)
    cps, sps = np.cos(psi), np.sin(psi)
    return np.array([
        [cth * cps, sph * sth * cps - cph * sps, cph * sth * cps + sph * sps],
        [cth * sps, sph * sth * sps + cph * cps, cph * sth * sps - sph * cps],
        [-sth,      sph * cth,                   cph * cth],
    ])


def _derivative(vec: np.ndarray, force_model, controls, inertia: InertiaSet,
                M: np.ndarray) -> np.ndarray:
    state = RigidBodyState.from_vector(vec)
    forces = force_model(state, controls)
    body = np.linalg.solve(M, assemble_forcing(state, forces, inertia))
    q, r = vec[5], vec[6]
    rotor_acc = (forces.rotor_moment - forces.shaft_torque
                 - q * r * (inertia.I_z_r - inertia.I_y_r)) / inertia.I_x_r

    phi, theta, psi = vec[10], vec[11], vec[12]
    pos_dot = _rotation_body_to_inertial(phi, theta, psi) @ vec[0:3]
    p_b = vec[3]
    cph, sph = np.cos(phi), np.sin(phi)
    tth, cth = np.tan(theta), np.cos(theta)
    euler_dot = np.array([
        p_b + (q * sph + r * cph) * tth,
        q * cph - r * sph,
        (q * sph + r * cph) / cth,
    ])

    out = np.empty(14)
    out[0:3] = body[0:3]          # du dv dw
    out[3] = body[3]              # dp_b
    out[4] = rotor_acc            # dp_r
    out[5:7] = body[4:6]          # dq dr
    out[7:10] = pos_dot
    out[10:13] = euler_dot
    out[13] = vec[4]              # dphi_r = p_r
    return out


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray     # [s] (steps + 1,)
    states: np.ndarray    # (steps + 1, 14) rows in to_vector() order


def integrate(state0: RigidBodyState, force_model, inertia: InertiaSet,
              dt: float, steps: int, controls=(0.0, 0.0, 0.0)) -> Trajectory:
    """Fixed-step RK4 propagation of the 14 states under constant controls.

    force_model(state, controls) must return a ForceSet. Aborts near gimbal
    lock (|theta| > 85 deg) and on non-finite states.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    controls = np.asarray(controls, dtype=float)

    M = assemble_mass_matrix(inertia)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericalError(
            f"mass matrix condition number {cond:.3g} exceeds {CONDITION_LIMIT:.0e}")

    states = np.empty((steps + 1, 14))
    states[0] = state0.to_vector()
    x = states[0]
    for n in range(steps):
        k1 = _derivative(x, force_model, controls, inertia, M)
        k2 = _derivative(x + 0.5 * dt * k1, force_model, controls, inertia, M)
        k3 = _derivative(x + 0.5 * dt * k2, force_model, controls, inertia, M)
        k4 = _derivative(x + dt * k3, force_model, controls, inertia, M)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NumericalError(f"non-finite state at t={(n + 1) * dt:.6g} s")
        if abs(x[11]) > GIMBAL_LIMIT_RAD:
            raise NumericalError(
                f"pitch {np.rad2deg(x[11]):.1f} deg at t={(n + 1) * dt:.6g} s: "
                f"too close to gimbal lock for Euler-angle kinematics")
        states[n + 1] = x
    return Trajectory(times=dt * np.arange(steps + 1), states=states)


def linearize(force_model, x_eq, u_eq, inertia: InertiaSet,
              fd_step: float = 1e-6,
              residual_tolerance: float = 1e-6) -> LinearModel:
    """Central-difference linearization about (x_eq, u_eq).

    The rotor angle does not appear in the linear model: the 13 states are
    [u v w p_b p_r q r x y z phi theta psi], inputs [B_f B_a tau_em]. The
    force model must not depend on the rotor angle for the reduction to be
    valid. Warns (with the residual) when x_eq is not an equilibrium.
    """
    x_eq = np.asarray(x_eq, dtype=float)
    u_eq = np.asarray(u_eq, dtype=float)
    if x_eq.shape != (13,):
        raise ValueError(f"x_eq must have 13 entries, got {x_eq.shape}")
    if u_eq.shape != (3,):
        raise ValueError(f"u_eq must have 3 entries, got {u_eq.shape}")
    if fd_step <= 0:
        raise NumericalError(f"fd_step must be > 0, got {fd_step}")

    M = assemble_mass_matrix(inertia)

    def reduced(x13: np.ndarray, u3: np.ndarray) -> np.ndarray:
        full = np.append(x13, 0.0)   # rotor angle is dynamically irrelevant here
        return _derivative(full, force_model, u3, inertia, M)[:13]

    residual = float(np.linalg.norm(reduced(x_eq, u_eq)))
    if residual > residual_tolerance:
        warnings.warn(
            f"x_eq is not an equilibrium: ||xdot|| = {residual:.3g}; "
            f"the linear model is an expansion about a non-stationary point",
            stacklevel=2)

    A = np.empty((13, 13))
    for j in range(13):
        h = fd_step * max(1.0, abs(x_eq[j]))
        e = np.zeros(13)
        e[j] = h
        A[:, j] = (reduced(x_eq + e, u_eq) - reduced(x_eq - e, u_eq)) / (2.0 * h)
    B = np.empty((13, 3))
    for j in range(3):
        h = fd_step * max(1.0, abs(u_eq[j]))
        e = np.zeros(3)
        e[j] = h
        B[:, j] = (reduced(x_eq, u_eq + e) - reduced(x_eq, u_eq - e)) / (2.0 * h)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise NumericalError("finite differencing produced non-finite entries; "
                             "try a different fd_step")
    return LinearModel(A=A, B=B, x_eq=x_eq, u_eq=u_eq)


# --------------------------------------------------------------------------
# Surrogate force model. NOT a hydrodynamic model: linear tether spring,
# quadratic drag, fill-proportional buoyancy, and a quadratic rotor torque,
# chosen only to give smooth, sign-correct forcing for exercising the
# equations of motion.

@dataclass(frozen=True)
class SurrogateEnvironment:
    flow_speed: float = 1.6            # [m/s] uniform current along inertial +x
    water_density: float = 1025.0      # [kg/m^3]
    gravity: float = 9.81              # [m/s^2]
    dry_mass: float = 497800.0         # [kg] physical mass (no added mass)
    tank_volume: float = 31.215        # [m^3] per tank
    neutral_fill: float = 0.4677       # [-] fill of each tank for neutral trim
    drag_area: float = 380.0           # [m^2]
    drag_coefficient: float = 1.0      # [-]
    anchor_position: tuple[float, float, float] = (554.50, 0.38, 50.0)  # [m]
    tether_stiffness: float = 2.0e3    # [N/m]
    angular_stiffness: float = 5.0e6   # [N m/rad] roll/pitch restoring
    angular_damping: float = 2.0e6     # [N m s/rad]
    rotor_torque_coefficient: float = 2.0e4  # [N m / (m/s)^2]
    rotor_damping: float = 2.0e4       # [N m s/rad] keeps the free rotor bounded

    def displaced_volume(self) -> float:
        """Hull volume chosen so neutral_fill in both tanks floats the mass."""
        return (self.dry_mass / self.water_density
                - 2.0 * self.neutral_fill * self.tank_volume)


def surrogate_force_model(state: RigidBodyState, controls,
                          env: SurrogateEnvironment = SurrogateEnvironment()
                          ) -> ForceSet:
    """Smooth deterministic stand-in forcing; see the class docstring."""
    b_f, b_a, tau_em = (float(c) for c in controls)
    rot = _rotation_body_to_inertial(*state.euler)

    # Relative flow in the body frame (current minus body velocity).
    flow_body = rot.T @ np.array([env.flow_speed, 0.0, 0.0])
    v_rel = flow_body - np.asarray(state.velocity)
    drag = 0.5 * env.water_density * env.drag_coefficient * env.drag_area \
        * np.linalg.norm(v_rel) * v_rel

    # Weight minus buoyancy along inertial z (down); air fill lifts.
    displaced = env.displaced_volume() + (b_f + b_a) * env.tank_volume
    fz_down = env.gravity * (env.dry_mass - env.water_density * displaced)
    # Linear tether spring toward the anchor point.
    spring = -env.tether_stiffness * (np.asarray(state.position)
                                      - np.asarray(env.anchor_position))
    f_body = drag + rot.T @ (spring + np.array([0.0, 0.0, fz_down]))

    phi, theta, _ = state.euler
    p_b, q, r = state.rates
    moments = (
        -env.angular_stiffness * phi - env.angular_damping * p_b,
        -env.angular_stiffness * theta - env.angular_damping * q,
        -env.angular_damping * r,
    )
    rotor_moment = (env.rotor_torque_coefficient * v_rel[0] * abs(v_rel[0])
                    - env.rotor_damping * state.rotor_rate)
    return ForceSet(forces=tuple(f_body), moments=moments,
                    rotor_moment=float(rotor_moment), shaft_torque=tau_em)


def make_surrogate(env: SurrogateEnvironment = SurrogateEnvironment()):
    """Bind an environment, giving the (state, controls) -> ForceSet callable
    that integrate and linearize expect."""
    def model(state: RigidBodyState, controls) -> ForceSet:
        return surrogate_force_model(state, controls, env)
    return model


def surrogate_equilibrium(env: SurrogateEnvironment = SurrogateEnvironment()
                          ) -> tuple[np.ndarray, np.ndarray]:
    """A true rest point of the surrogate in still water (flow_speed = 0):
    at the anchor, level, neutral fills, no shaft torque."""
    if env.flow_speed != 0.0:
        raise ValueError("surrogate equilibrium requires flow_speed = 0")
    x_eq = np.zeros(13)
    x_eq[7:10] = env.anchor_position
    u_eq = np.array([env.neutral_fill, env.neutral_fill, 0.0])
    return x_eq, u_eq

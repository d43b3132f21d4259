"""6-DOF rigid-body rocket with gimballed thrust, integrated by fixed-step RK4."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .gimbal import GimbalGeometry, NozzleDeflection, servo_to_nozzle, thrust_vector
from .propulsion import ThrustCurve, _impulse_until, thrust_at, total_impulse
from .servo import ServoParams, ServoState, servo_step


class SimulationDiverged(RuntimeError):
    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite state at step {step} (t={t:.6f} s)")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class RocketParams:
    """Vehicle mass properties and aerodynamics.

    ``cp_ahead_of_cg`` places the centre of pressure of the lateral
    (normal-force) aerodynamics ahead of the CG; a finless TVC airframe has
    it forward, which is what makes it unstable without control. Set it to
    zero for an attitude-neutral vehicle.
    """

    mass: float = 0.8  # kg
    inertia: tuple[float, float, float] = (0.035, 0.035, 0.0008)  # kg m^2
    pivot_to_cg: float = 0.30  # m
    drag_coefficient: float = 0.5
    reference_area: float = math.pi * 0.037**2  # m^2, 74 mm frame
    gravity: float = 9.81
    air_density: float = 1.225
    normal_force_slope: float = 2.0  # per rad
    cp_ahead_of_cg: float = 0.05  # m

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if len(self.inertia) != 3 or not all(i > 0 for i in self.inertia):
            raise ValueError(f"inertia components must be > 0, got {self.inertia}")
        if not self.pivot_to_cg > 0:
            raise ValueError(f"pivot_to_cg must be > 0, got {self.pivot_to_cg}")
        if self.drag_coefficient < 0 or self.reference_area < 0:
            raise ValueError("drag_coefficient and reference_area must be >= 0")
        if self.gravity < 0 or self.air_density < 0 or self.normal_force_slope < 0:
            raise ValueError("gravity, air_density, normal_force_slope must be >= 0")


@dataclass(frozen=True)
class Disturbance:
    start: float  # s
    duration: float  # s
    torque: tuple[float, float, float] = (0.0, 0.0, 0.0)  # N m, body
    force: tuple[float, float, float] = (0.0, 0.0, 0.0)  # N, world

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"disturbance duration must be >= 0, got {self.duration}")

    def active(self, t: float) -> bool:
        return self.start <= t < self.start + self.duration


@dataclass
class RigidBodyState:
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    angular_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity, self.attitude,
                               self.angular_velocity]).astype(float)

    @classmethod
    def from_vector(cls, x: np.ndarray) -> RigidBodyState:
        x = np.asarray(x, dtype=float)
        return cls(x[0:3].copy(), x[3:6].copy(), x[6:10].copy(), x[10:13].copy())


def quat_multiply(a, b) -> np.ndarray:
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_to_matrix(q) -> np.ndarray:
    """Rotation matrix (body to world) of a unit quaternion ``(w, x, y, z)``."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    h = 0.5 * angle
    return np.concatenate([[math.cos(h)], math.sin(h) * axis])


def tilt_angles(q) -> tuple[float, float]:
    """Pitch and yaw tilt (deg) of the rocket axis from world vertical.

    Measured in body axes so they line up with the gimbal channels: pitch is
    rotation about body x, yaw about body y.
    """
    up = quat_to_matrix(q).T @ np.array([0.0, 0.0, 1.0])
    pitch = math.degrees(math.atan2(up[1], up[2]))
    yaw = math.degrees(math.atan2(-up[0], up[2]))
    return pitch, yaw


def _derivative_vector(x: np.ndarray, params: RocketParams, thrust_body: np.ndarray,
                       dist_torque: np.ndarray, dist_force: np.ndarray,
                       mass: float) -> np.ndarray:
    v = x[3:6]
    q = x[6:10]
    w = x[10:13]
    rot = quat_to_matrix(q)

    force = rot @ thrust_body + dist_force
    force[2] -= mass * params.gravity
    speed = math.sqrt(v @ v)
    half_rho = 0.5 * params.air_density
    if speed > 0.0:
        force -= half_rho * params.drag_coefficient * params.reference_area * speed * v

    # thrust acts at the gimbal pivot, pivot_to_cg below the CG on the body axis
    L = params.pivot_to_cg
    torque = np.array([L * thrust_body[1], -L * thrust_body[0], 0.0]) + dist_torque

    if params.normal_force_slope > 0.0 and speed > 0.0:
        v_body = rot.T @ v
        k = half_rho * speed * params.reference_area * params.normal_force_slope
        fn = np.array([-k * v_body[0], -k * v_body[1], 0.0])
        force += rot @ fn
        d = params.cp_ahead_of_cg
        torque += np.array([-d * fn[1], d * fn[0], 0.0])

    inertia = np.asarray(params.inertia)
    w_dot = (torque - np.cross(w, inertia * w)) / inertia
    q_dot = 0.5 * quat_multiply(q, (0.0, w[0], w[1], w[2]))

    out = np.empty(13)
    out[0:3] = v
    out[3:6] = force / mass
    out[6:10] = q_dot
    out[10:13] = w_dot
    return out


def _sum_disturbances(active: Sequence[Disturbance]) -> tuple[np.ndarray, np.ndarray]:
    torque = np.zeros(3)
    force = np.zeros(3)
    for d in active:
        torque += d.torque
        force += d.force
    return torque, force


def derivatives(state: RigidBodyState, params: RocketParams, thrust_body,
                active_disturbances: Sequence[Disturbance] = (),
                mass: float | None = None) -> RigidBodyState:
    """Time derivative of ``state``, returned in the same container."""
    torque, force = _sum_disturbances(active_disturbances)
    dx = _derivative_vector(state.to_vector(), params, np.asarray(thrust_body, float),
                            torque, force, params.mass if mass is None else mass)
    return RigidBodyState.from_vector(dx)


def _rk4(x: np.ndarray, dt: float, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    x[6:10] /= math.sqrt(x[6:10] @ x[6:10])
    return x


def rk4_step(state: RigidBodyState, params: RocketParams, thrust_body=(0.0, 0.0, 0.0),
             active_disturbances: Sequence[Disturbance] = (), dt: float = 1e-3,
             mass: float | None = None) -> RigidBodyState:
    """One classical RK4 step with inputs held over the step."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    torque, force = _sum_disturbances(active_disturbances)
    thrust_body = np.asarray(thrust_body, float)
    m = params.mass if mass is None else mass

    def f(x):
        return _derivative_vector(x, params, thrust_body, torque, force, m)

    return RigidBodyState.from_vector(_rk4(state.to_vector(), dt, f))


FLY_COLUMNS = ("t", "px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz",
               "wx", "wy", "wz", "servo_pitch", "servo_yaw", "nozzle_pitch",
               "nozzle_yaw", "thrust")


def simulate(initial: RigidBodyState, params: RocketParams, curve: ThrustCurve,
             controller=None, schedule: Sequence[Disturbance] = (), t_end: float = 5.0,
             dt: float = 1e-3, *, control_period: float = 0.02, record_every: int = 10,
             geom: GimbalGeometry = GimbalGeometry(),
             servo: ServoParams = ServoParams(),
             variable_mass: bool = False) -> list[tuple[float, ...]]:
    """Closed-loop flight simulation.

    ``controller`` is ``None`` (servos held at neutral) or any object with
    ``update(t, state) -> NozzleDeflection`` returning the commanded
    deflection; it is sampled every ``control_period`` seconds. Returns rows
    in ``FLY_COLUMNS`` order, one every ``record_every`` physics steps plus
    the initial state.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    ratio = control_period / dt
    n_ctrl = round(ratio)
    if n_ctrl < 1 or abs(ratio - n_ctrl) > 1e-9 * ratio:
        raise ValueError("control_period must be an integer multiple of dt (>= dt)")
    n_steps = round(t_end / dt)

    tau = servo.time_constant
    pitch_servo = ServoState(trial_tau=tau)
    yaw_servo = ServoState(trial_tau=tau)
    dt_ms = dt * 1e3
    x = initial.to_vector()
    x[6:10] /= math.sqrt(x[6:10] @ x[6:10])
    prop_total = total_impulse(curve) if variable_mass else 0.0

    def mass_at(t):
        if not variable_mass or curve.propellant_mass <= 0 or prop_total <= 0:
            return params.mass
        frac = min(_impulse_until(curve, t) / prop_total, 1.0)
        return params.mass - curve.propellant_mass * frac

    records = []

    def record(t, nozzle, thrust):
        records.append((t, *x[0:13], pitch_servo.shaft_angle, yaw_servo.shaft_angle,
                        nozzle.pitch, nozzle.yaw, thrust))

    nozzle = servo_to_nozzle(0.0, 0.0, geom)
    record(0.0, nozzle, thrust_at(curve, 0.0))
    # overflow is caught below as a non-finite state
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(n_steps):
            t = step * dt
            if controller is not None and step % n_ctrl == 0:
                cmd = controller.update(t, RigidBodyState.from_vector(x))
                g = geom.amplification
                pitch_servo = pitch_servo.command(g * cmd.pitch, servo)
                yaw_servo = yaw_servo.command(g * cmd.yaw, servo)
            nozzle = servo_to_nozzle(pitch_servo.shaft_angle, yaw_servo.shaft_angle, geom)
            thrust = thrust_at(curve, t)
            thrust_body = thrust_vector(nozzle, thrust)
            torque, force = _sum_disturbances([d for d in schedule if d.active(t)])
            m = mass_at(t)
            x = _rk4(x, dt, lambda s: _derivative_vector(s, params, thrust_body, torque, force, m))
            if not np.all(np.isfinite(x)):
                raise SimulationDiverged(step, t)
            pitch_servo = servo_step(pitch_servo, dt_ms, servo)
            yaw_servo = servo_step(yaw_servo, dt_ms, servo)
            if (step + 1) % record_every == 0:
                nozzle = servo_to_nozzle(pitch_servo.shaft_angle, yaw_servo.shaft_angle, geom)
                record((step + 1) * dt, nozzle, thrust_at(curve, (step + 1) * dt))
    return records

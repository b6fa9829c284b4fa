"""Deterministic planar pushing simulator.

A single point pusher moves at constant velocity for a fixed duration and
pushes a rigid object across a horizontal table. Two regimes are integrated
with fixed-step semi-implicit Euler:

* pusher speed <= ``v_qs``: quasi-static pushing. The object's twist follows
  the ellipsoidal limit-surface approximation of the friction wrench cone
  (uniform pressure over the footprint, center of friction at the centroid).
  Stick/slip at the pusher contact is resolved against a Coulomb cone around
  the inward contact normal.
* pusher speed > ``v_qs``: Newtonian sliding. The pusher transmits at most
  ``push_force_limit`` newtons through the contact; the object accelerates
  along the push direction against kinetic table friction and picks up yaw
  from the contact torque. This regime is what makes mass observable: a
  velocity-only quasi-static push moves every mass identically.

After contact ends the object slides freely, decelerating at mu_kinetic * g
(and a proportional angular rate), until it rests or its center leaves the
table, which counts as a drop.

All functions are pure; inner loops use scalar ``math`` ops so a full push at
dt=1e-3 costs a few milliseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, InputError

_TWO_PI = 2.0 * math.pi
# hard cap on integration time for a single push (guards mu_kinetic ~ 0)
_MAX_SIM_TIME = 60.0


def wrap_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.fmod(a + math.pi, _TWO_PI)
    if w <= 0.0:
        w += _TWO_PI
    return w - math.pi


@dataclass(frozen=True)
class PoseSE2:
    """Planar pose; yaw is normalized to (-pi, pi] on construction."""

    x: float
    y: float
    yaw: float

    def __post_init__(self):
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))


@dataclass(frozen=True)
class Rectangle:
    width: float
    depth: float

    def __post_init__(self):
        if self.width <= 0 or self.depth <= 0:
            raise InputError("rectangle sides must be positive")


@dataclass(frozen=True)
class Disk:
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise InputError("disk radius must be positive")


Shape = Rectangle | Disk

_SHAPE_CACHE: dict[Shape, tuple[float, float]] = {}


def _shape_constants(shape: Shape) -> tuple[float, float]:
    """(mean footprint radius rho, squared gyration radius I/m) for a shape.

    rho is the mean distance of footprint points from the centroid; with
    uniform pressure the limit torque is mu*m*g*rho. Cached per shape.
    """
    got = _SHAPE_CACHE.get(shape)
    if got is not None:
        return got
    if isinstance(shape, Disk):
        r = shape.radius
        out = (2.0 * r / 3.0, r * r / 2.0)
    else:
        a, b = shape.width / 2.0, shape.depth / 2.0
        # mean of sqrt(x^2+y^2) over the footprint via Gauss-Legendre product rule
        import numpy as np

        nodes, weights = np.polynomial.legendre.leggauss(48)
        xs = a * nodes
        ys = b * nodes
        rr = np.sqrt(xs[:, None] ** 2 + ys[None, :] ** 2)
        mean_r = float((weights[:, None] * weights[None, :] * rr).sum() / 4.0)
        out = (mean_r, (shape.width**2 + shape.depth**2) / 12.0)
    _SHAPE_CACHE[shape] = out
    return out


def boundary_point(shape: Shape, angle: float) -> tuple[float, float]:
    """Point where the object-frame ray at `angle` exits the boundary."""
    ux, uy = math.cos(angle), math.sin(angle)
    if isinstance(shape, Disk):
        return (shape.radius * ux, shape.radius * uy)
    a, b = shape.width / 2.0, shape.depth / 2.0
    tx = a / abs(ux) if ux != 0.0 else math.inf
    ty = b / abs(uy) if uy != 0.0 else math.inf
    t = min(tx, ty)
    return (t * ux, t * uy)


def on_boundary(shape: Shape, p: tuple[float, float], tol: float = 1e-6) -> bool:
    px, py = p
    if isinstance(shape, Disk):
        return abs(math.hypot(px, py) - shape.radius) <= tol
    a, b = shape.width / 2.0, shape.depth / 2.0
    inside = abs(px) <= a + tol and abs(py) <= b + tol
    on_edge = abs(abs(px) - a) <= tol or abs(abs(py) - b) <= tol
    return inside and on_edge


def inward_normal(shape: Shape, p: tuple[float, float]) -> tuple[float, float]:
    """Unit normal at boundary point `p`, pointing into the object."""
    px, py = p
    if isinstance(shape, Disk):
        r = math.hypot(px, py)
        return (-px / r, -py / r)
    a, b = shape.width / 2.0, shape.depth / 2.0
    on_x = abs(abs(px) - a) <= abs(abs(py) - b)
    nx = -math.copysign(1.0, px) if on_x else 0.0
    ny = 0.0 if on_x else -math.copysign(1.0, py)
    if abs(abs(px) - a) < 1e-9 and abs(abs(py) - b) < 1e-9:
        # corner: split the difference
        s = math.sqrt(0.5)
        nx, ny = -math.copysign(s, px), -math.copysign(s, py)
    return (nx, ny)


@dataclass(frozen=True)
class ObjectModel:
    """Identified quantities of one rigid object plus its known footprint."""

    mass: float
    mu_static: float
    mu_kinetic: float
    shape: Shape

    def __post_init__(self):
        if self.mass <= 0:
            raise InputError("mass must be positive")
        if not (0.0 <= self.mu_kinetic <= self.mu_static <= 2.0):
            raise InputError("need 0 <= mu_kinetic <= mu_static <= 2.0")


@dataclass(frozen=True)
class PushAction:
    """One commanded push: body contact point, world direction, speed, duration."""

    contact_point: tuple[float, float]
    direction: tuple[float, float]
    speed: float
    duration: float

    def __post_init__(self):
        dx, dy = self.direction
        if abs(math.hypot(dx, dy) - 1.0) > 1e-9:
            raise InputError("push direction must be a unit vector")
        if self.speed < 0:
            raise InputError("push speed must be >= 0")
        if self.duration <= 0:
            raise InputError("push duration must be > 0")


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    gravity: float = 9.81
    # (xmin, ymin, xmax, ymax)
    table_bounds: tuple[float, float, float, float] = (-0.6, -0.6, 0.6, 0.6)
    pressure: str = "uniform"
    v_qs: float = 0.05  # quasi-static speed threshold
    push_force_limit: float = 25.0  # max force the pusher can transmit [N]
    contact_mu: float = 0.5  # Coulomb friction at the pusher contact
    rest_speed: float = 1e-4
    rest_omega: float = 1e-3
    record_stride: int = 1  # keep every k-th integration step in the trajectory

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        xmin, ymin, xmax, ymax = self.table_bounds
        if xmin >= xmax or ymin >= ymax:
            raise ConfigError("table_bounds must be a non-degenerate rectangle")
        if self.pressure != "uniform":
            raise ConfigError("only a uniform pressure distribution is supported")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped poses of one simulated push or push sequence."""

    poses: tuple[tuple[float, PoseSE2], ...]
    dropped: bool = False
    drop_time: float | None = None

    @property
    def final_pose(self) -> PoseSE2:
        return self.poses[-1][1]

    @property
    def final_time(self) -> float:
        return self.poses[-1][0]


def _off_table(x: float, y: float, bounds: tuple[float, float, float, float]) -> bool:
    xmin, ymin, xmax, ymax = bounds
    return x < xmin or x > xmax or y < ymin or y > ymax


class _Recorder:
    """Collects (t, pose) samples at a fixed stride, always keeping the last."""

    def __init__(self, stride: int):
        self.stride = stride
        self.samples: list[tuple[float, PoseSE2]] = []
        self._count = 0

    def start(self, pose: PoseSE2):
        self.samples.append((0.0, pose))

    def step(self, t: float, x: float, y: float, yaw: float, force: bool = False):
        self._count += 1
        if force or self._count % self.stride == 0:
            self.samples.append((t, PoseSE2(x, y, yaw)))

    def ensure_final(self, t: float, x: float, y: float, yaw: float):
        if self.samples[-1][0] < t:
            self.samples.append((t, PoseSE2(x, y, yaw)))


def simulate_push(
    x0: PoseSE2, action: PushAction, model: ObjectModel, cfg: SimConfig
) -> Trajectory:
    """Simulate one push and the free slide that follows it.

    Returns the full trajectory; integration stops early (outcome `dropped`)
    as soon as the footprint center leaves the table.
    """
    if not on_boundary(model.shape, action.contact_point):
        raise InputError("contact point is not on the object boundary")
    if _off_table(x0.x, x0.y, cfg.table_bounds):
        raise InputError("initial pose is outside the table bounds")

    rec = _Recorder(cfg.record_stride)
    rec.start(x0)
    x, y, yaw = x0.x, x0.y, x0.yaw
    t = 0.0

    # release state fed into the free-slide phase
    rel_vx = rel_vy = rel_om = 0.0
    dropped = False

    if action.speed > 0.0:
        if action.speed <= cfg.v_qs:
            x, y, yaw, t, rel_vx, rel_vy, rel_om, dropped = _push_quasi_static(
                x, y, yaw, action, model, cfg, rec
            )
        else:
            x, y, yaw, t, rel_vx, rel_vy, rel_om, dropped = _push_newtonian(
                x, y, yaw, action, model, cfg, rec
            )
    else:
        t = action.duration
    rec.ensure_final(t, x, y, yaw)

    if not dropped:
        x, y, yaw, t, dropped = _free_slide(
            x, y, yaw, t, rel_vx, rel_vy, rel_om, model, cfg, rec
        )
        rec.ensure_final(t, x, y, yaw)

    return Trajectory(
        poses=tuple(rec.samples),
        dropped=dropped,
        drop_time=t if dropped else None,
    )


def _push_quasi_static(x, y, yaw, action, model, cfg, rec):
    """Limit-surface pushing: object twist solved from the sticking contact,
    clamped to the Coulomb cone edge when sticking would need too much
    tangential force."""
    dt = cfg.dt
    ux0, uy0 = action.direction
    ux, uy = action.speed * ux0, action.speed * uy0
    cbx, cby = action.contact_point
    nbx, nby = inward_normal(model.shape, action.contact_point)
    rho, _ = _shape_constants(model.shape)
    c2 = rho * rho
    mu_c = cfg.contact_mu
    cone = 1.0 / math.sqrt(1.0 + mu_c * mu_c)
    n_steps = max(1, int(round(action.duration / dt)))
    bounds = cfg.table_bounds

    wx = wy = om = 0.0
    for step in range(n_steps):
        cos_y, sin_y = math.cos(yaw), math.sin(yaw)
        rx = cos_y * cbx - sin_y * cby
        ry = sin_y * cbx + cos_y * cby
        nx = cos_y * nbx - sin_y * nby
        ny = sin_y * nbx + cos_y * nby
        if ux * nx + uy * ny <= 0.0:
            # pusher is moving away from the surface: contact broken
            break
        denom = c2 + rx * rx + ry * ry
        wx = ((c2 + rx * rx) * ux + rx * ry * uy) / denom
        wy = (rx * ry * ux + (c2 + ry * ry) * uy) / denom
        om = (rx * wy - ry * wx) / c2
        # the required contact force is parallel to the translation component
        fn = wx * nx + wy * ny
        ft = wy * nx - wx * ny  # component along (-ny, nx)
        if fn <= 0.0 or abs(ft) > mu_c * fn:
            # slipping: force sits on the cone edge; scale the twist so the
            # contact point still matches the pusher along the normal
            s = math.copysign(1.0, ft)
            fx = (nx - s * mu_c * ny) * cone
            fy = (ny + s * mu_c * nx) * cone
            tau = rx * fy - ry * fx
            gx = fx - (tau / c2) * ry
            gy = fy + (tau / c2) * rx
            den = nx * gx + ny * gy
            if den <= 1e-12:
                wx = wy = om = 0.0
            else:
                lam = max(0.0, (nx * ux + ny * uy) / den)
                wx, wy = lam * fx, lam * fy
                om = lam * tau / c2
        x += wx * dt
        y += wy * dt
        yaw += om * dt
        t = (step + 1) * dt
        if _off_table(x, y, bounds):
            rec.step(t, x, y, yaw, force=True)
            return x, y, yaw, t, 0.0, 0.0, 0.0, True
        rec.step(t, x, y, yaw)
    return x, y, yaw, action.duration, wx, wy, om, False


def _push_newtonian(x, y, yaw, action, model, cfg, rec):
    """Force-limited pushing above the quasi-static regime: the object
    accelerates along the push direction until it rides with the pusher."""
    dt = cfg.dt
    dx, dy = action.direction
    cbx, cby = action.contact_point
    m = model.mass
    g = cfg.gravity
    mu_k = model.mu_kinetic
    f_lim = cfg.push_force_limit
    rho, k2 = _shape_constants(model.shape)
    inertia = m * k2
    tau_fric = mu_k * m * g * rho
    bounds = cfg.table_bounds
    n_steps = max(1, int(round(action.duration / dt)))

    if f_lim <= model.mu_static * m * g:
        # pusher cannot break static friction: nothing moves
        return x, y, yaw, action.duration, 0.0, 0.0, 0.0, False

    v = 0.0
    om = 0.0
    v_p = action.speed
    accel = f_lim / m - mu_k * g
    for step in range(n_steps):
        if v < v_p:
            v = min(v_p, v + accel * dt)
            f_now = f_lim
        else:
            f_now = mu_k * m * g  # just sustains the ride
        cos_y, sin_y = math.cos(yaw), math.sin(yaw)
        rx = cos_y * cbx - sin_y * cby
        ry = sin_y * cbx + cos_y * cby
        tau = (rx * dy - ry * dx) * f_now
        if om == 0.0:
            excess = abs(tau) - tau_fric
            alpha = math.copysign(excess, tau) / inertia if excess > 0.0 else 0.0
            om += alpha * dt
        else:
            alpha = (tau - math.copysign(tau_fric, om)) / inertia
            om_new = om + alpha * dt
            om = 0.0 if om * om_new < 0.0 else om_new
        x += dx * v * dt
        y += dy * v * dt
        yaw += om * dt
        t = (step + 1) * dt
        if _off_table(x, y, bounds):
            rec.step(t, x, y, yaw, force=True)
            return x, y, yaw, t, 0.0, 0.0, 0.0, True
        rec.step(t, x, y, yaw)
    return x, y, yaw, action.duration, dx * v, dy * v, om, False


def _free_slide(x, y, yaw, t, vx, vy, om, model, cfg, rec):
    """Constant-deceleration slide to rest: mu*g on translation, a
    geometry-proportional rate on rotation. Mass cancels throughout."""
    dt = cfg.dt
    g = cfg.gravity
    mu_k = model.mu_kinetic
    rho, k2 = _shape_constants(model.shape)
    a_lin = mu_k * g
    a_ang = mu_k * g * rho / k2
    v = math.hypot(vx, vy)
    if v > 0.0:
        ux, uy = vx / v, vy / v
    else:
        ux = uy = 0.0
    bounds = cfg.table_bounds
    max_steps = int(_MAX_SIM_TIME / dt)

    steps = 0
    while (v > cfg.rest_speed or abs(om) > cfg.rest_omega) and steps < max_steps:
        v = max(0.0, v - a_lin * dt)
        if om != 0.0:
            om = math.copysign(max(0.0, abs(om) - a_ang * dt), om)
        x += ux * v * dt
        y += uy * v * dt
        yaw += om * dt
        t += dt
        steps += 1
        if _off_table(x, y, bounds):
            rec.step(t, x, y, yaw, force=True)
            return x, y, yaw, t, True
        rec.step(t, x, y, yaw)
    return x, y, yaw, t, False


def rollout_policy(x0: PoseSE2, policy, model: ObjectModel, cfg: SimConfig) -> Trajectory:
    """Chain the pushes a policy generates into one trajectory.

    `policy` must provide `n_pushes` and `action_at(pose, shape) -> PushAction`;
    the next push starts from the final pose of the previous one. The rollout
    halts immediately on a drop.
    """
    poses: list[tuple[float, PoseSE2]] = [(0.0, x0)]
    pose = x0
    t_off = 0.0
    for _ in range(policy.n_pushes):
        action = policy.action_at(pose, model.shape)
        traj = simulate_push(pose, action, model, cfg)
        poses.extend((t_off + t, p) for t, p in traj.poses[1:])
        t_off += traj.final_time
        pose = traj.final_pose
        if traj.dropped:
            return Trajectory(poses=tuple(poses), dropped=True, drop_time=t_off)
    return Trajectory(poses=tuple(poses))


def final_displacement(traj: Trajectory) -> tuple[float, float]:
    """(translation [m], |wrapped yaw change| [rad]) between first and last pose."""
    if not traj.poses:
        raise InputError("trajectory is empty")
    first = traj.poses[0][1]
    last = traj.poses[-1][1]
    translation = math.hypot(last.x - first.x, last.y - first.y)
    rotation = abs(wrap_angle(last.yaw - first.yaw))
    return translation, rotation

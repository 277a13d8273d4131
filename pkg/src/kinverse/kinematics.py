"""Analytic MacPherson-strut position analysis.

Rigid-link, massless, friction-free kinematics of one front corner in the
vehicle frame (x forward, y left, z up, meters). The knuckle is located by
three simultaneous constraints:

  (a) the lower ball joint rides on a circle about the lower-control-arm
      pivot axis (parameterized by the LCA angle),
  (b) the knuckle-fixed strut axis (lower ball joint -> strut top mount at
      design position) always passes through the fixed strut top mount, and
  (c) the tie rod keeps its design length, which pins the remaining steer
      rotation about the kingpin axis.

(c) is resolved by a bracketed 1-D root find on the steer angle; the wheel
travel sweep adds an outer root find on the LCA angle. Bracket seeds follow
the previous sweep step so the solver stays on one assembly branch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import EvaluationError, KinematicLockError
from .gp import DomainBounds

HARDPOINT_NAMES = (
    "strut_top_mount",
    "lca_front_pivot",
    "lca_rear_pivot",
    "lower_ball_joint",
    "inner_tie_rod",
    "outer_tie_rod",
    "wheel_center",
    "spindle_outer",
)

AXES = ("x", "y", "z")

LCA_ANGLE_LIMIT = 0.5    # rad
STEER_LIMIT = math.radians(30.0)
STEER_TOL = 1e-12        # rad
TRAVEL_TOL = 1e-12       # rad, on the LCA angle root find

DEFAULT_TRAVEL_HALF_RANGE = 0.08
DEFAULT_TRAVEL_SAMPLES = 33
DEFAULT_TRACK_WIDTH = 1.6
ROLL_TRAVEL = 0.02       # antisymmetric travel amplitude used for roll steer


@dataclass(frozen=True)
class HardpointSet:
    """Named 3-D suspension attachment points, meters, vehicle frame."""

    strut_top_mount: np.ndarray
    lca_front_pivot: np.ndarray
    lca_rear_pivot: np.ndarray
    lower_ball_joint: np.ndarray
    inner_tie_rod: np.ndarray
    outer_tie_rod: np.ndarray
    wheel_center: np.ndarray
    spindle_outer: np.ndarray

    def __post_init__(self):
        for name in HARDPOINT_NAMES:
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise ValueError(f"hardpoint {name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)
        kingpin = np.linalg.norm(self.strut_top_mount - self.lower_ball_joint)
        if kingpin < 0.05:
            raise ValueError(
                f"kingpin axis ill defined: |strut_top_mount - lower_ball_joint|"
                f" = {kingpin:.4f} m < 0.05 m"
            )
        pivot = np.linalg.norm(self.lca_rear_pivot - self.lca_front_pivot)
        if pivot < 1e-6:
            raise ValueError("LCA pivot axis ill defined: pivots coincide")
        tie = np.linalg.norm(self.outer_tie_rod - self.inner_tie_rod)
        if tie < 0.05:
            raise ValueError(
                f"tie rod too short: |outer - inner| = {tie:.4f} m < 0.05 m"
            )

    def as_dict(self) -> dict[str, list[float]]:
        return {name: [float(v) for v in getattr(self, name)]
                for name in HARDPOINT_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "HardpointSet":
        missing = [n for n in HARDPOINT_NAMES if n not in data]
        if missing:
            raise ValueError(f"missing hardpoints: {', '.join(missing)}")
        return cls(**{n: np.asarray(data[n], dtype=float) for n in HARDPOINT_NAMES})


@dataclass(frozen=True)
class KnucklePose:
    """Rigid-body placement of the knuckle: p -> rotation @ p + translation."""

    rotation: np.ndarray
    translation: np.ndarray
    lca_angle: float
    steer_angle: float

    def apply(self, point: np.ndarray) -> np.ndarray:
        return self.rotation @ np.asarray(point, dtype=float) + self.translation


@dataclass(frozen=True)
class KinematicCurve:
    """Toe / camber traces over a wheel-travel grid (degrees, meters)."""

    travel: np.ndarray
    toe: np.ndarray
    camber: np.ndarray

    def __post_init__(self):
        travel = np.atleast_1d(np.asarray(self.travel, dtype=float))
        toe = np.atleast_1d(np.asarray(self.toe, dtype=float))
        camber = np.atleast_1d(np.asarray(self.camber, dtype=float))
        if not (travel.shape == toe.shape == camber.shape):
            raise ValueError("travel, toe and camber must have equal length")
        if not (np.all(np.isfinite(toe)) and np.all(np.isfinite(camber))):
            raise ValueError("curve values must be finite")
        object.__setattr__(self, "travel", travel)
        object.__setattr__(self, "toe", toe)
        object.__setattr__(self, "camber", camber)


@dataclass(frozen=True)
class CurveStatistics:
    """Scalar characteristics extracted from a kinematic curve."""

    bump_steer: float   # deg/m, central slope of toe vs travel
    roll_steer: float   # deg/deg, toe change per degree of body roll
    static_toe: float   # deg at zero travel

    def as_dict(self) -> dict[str, float]:
        return {
            "bump_steer": self.bump_steer,
            "roll_steer": self.roll_steer,
            "static_toe": self.static_toe,
        }


def default_travel_grid(
    half_range: float = DEFAULT_TRAVEL_HALF_RANGE,
    samples: int = DEFAULT_TRAVEL_SAMPLES,
) -> np.ndarray:
    """Symmetric travel grid containing an exact zero sample."""
    if half_range <= 0:
        raise ValueError("half_range must be positive")
    if samples < 5 or samples % 2 == 0:
        raise ValueError("samples must be an odd count >= 5")
    k = samples // 2
    return np.arange(-k, k + 1) * (half_range / k)


def _rotate(v, k, cos_a, sin_a):
    """Rodrigues rotation of tuple v about unit-axis tuple k."""
    vx, vy, vz = v
    kx, ky, kz = k
    dot = kx * vx + ky * vy + kz * vz
    cx = ky * vz - kz * vy
    cy = kz * vx - kx * vz
    cz = kx * vy - ky * vx
    t = (1.0 - cos_a) * dot
    return (
        vx * cos_a + cx * sin_a + kx * t,
        vy * cos_a + cy * sin_a + ky * t,
        vz * cos_a + cz * sin_a + kz * t,
    )


def _unit(v):
    vx, vy, vz = v
    n = math.sqrt(vx * vx + vy * vy + vz * vz)
    return (vx / n, vy / n, vz / n), n


class _Corner:
    """Float-tuple precomputation of one corner; the hot solver core."""

    __slots__ = (
        "pivot", "axis", "lbj0", "strut_top", "strut_dir0", "r_otr", "r_wc",
        "r_spin", "itr", "tie_len", "wc_z0",
    )

    def __init__(self, hp: HardpointSet):
        p0 = tuple(map(float, hp.lca_front_pivot))
        p1 = tuple(map(float, hp.lca_rear_pivot))
        self.pivot = p0
        self.axis, _ = _unit((p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]))
        self.lbj0 = tuple(map(float, hp.lower_ball_joint))
        self.strut_top = tuple(map(float, hp.strut_top_mount))
        self.strut_dir0, _ = _unit(
            tuple(s - l for s, l in zip(self.strut_top, self.lbj0))
        )
        self.r_otr = tuple(o - l for o, l in zip(hp.outer_tie_rod, self.lbj0))
        self.r_wc = tuple(w - l for w, l in zip(hp.wheel_center, self.lbj0))
        spin = tuple(float(s - w) for s, w in zip(hp.spindle_outer, hp.wheel_center))
        self.r_spin = spin
        self.itr = tuple(map(float, hp.inner_tie_rod))
        self.tie_len = math.dist(hp.outer_tie_rod, hp.inner_tie_rod)
        self.wc_z0 = float(hp.wheel_center[2])

    def _lbj_at(self, lca_angle: float):
        rel = tuple(l - p for l, p in zip(self.lbj0, self.pivot))
        rot = _rotate(rel, self.axis, math.cos(lca_angle), math.sin(lca_angle))
        return tuple(r + p for r, p in zip(rot, self.pivot))

    def _context(self, lca_angle: float):
        """Per-LCA-angle state: moved LBJ, kingpin axis, aligned knuckle vectors."""
        lbj = self._lbj_at(lca_angle)
        raw = tuple(s - l for s, l in zip(self.strut_top, lbj))
        kingpin, _ = _unit(raw)
        a0 = self.strut_dir0
        cross = (
            a0[1] * kingpin[2] - a0[2] * kingpin[1],
            a0[2] * kingpin[0] - a0[0] * kingpin[2],
            a0[0] * kingpin[1] - a0[1] * kingpin[0],
        )
        sin_a = math.sqrt(cross[0] ** 2 + cross[1] ** 2 + cross[2] ** 2)
        cos_a = a0[0] * kingpin[0] + a0[1] * kingpin[1] + a0[2] * kingpin[2]
        if sin_a < 1e-15:
            if cos_a < 0:
                raise KinematicLockError(
                    "strut axis reversed; geometry is not assemblable"
                )
            r_otr, r_wc, r_spin = self.r_otr, self.r_wc, self.r_spin
        else:
            u = (cross[0] / sin_a, cross[1] / sin_a, cross[2] / sin_a)
            r_otr = _rotate(self.r_otr, u, cos_a, sin_a)
            r_wc = _rotate(self.r_wc, u, cos_a, sin_a)
            r_spin = _rotate(self.r_spin, u, cos_a, sin_a)
        return lbj, kingpin, r_otr, r_wc, r_spin

    def _tie_residual(self, ctx, steer: float) -> float:
        lbj, kingpin, r_otr = ctx[0], ctx[1], ctx[2]
        ox, oy, oz = _rotate(r_otr, kingpin, math.cos(steer), math.sin(steer))
        dx = ox + lbj[0] - self.itr[0]
        dy = oy + lbj[1] - self.itr[1]
        dz = oz + lbj[2] - self.itr[2]
        return math.sqrt(dx * dx + dy * dy + dz * dz) - self.tie_len

    def _solve_steer(self, ctx, seed: float) -> float:
        f = lambda phi: self._tie_residual(ctx, phi)
        lo_lim, hi_lim = -STEER_LIMIT, STEER_LIMIT
        for half in (0.02, 0.08, 0.25, STEER_LIMIT):
            a = max(seed - half, lo_lim)
            b = min(seed + half, hi_lim)
            if a >= b:
                continue
            fa, fb = f(a), f(b)
            if fa == 0.0:
                return a
            if fb == 0.0:
                return b
            if fa * fb < 0:
                return brentq(f, a, b, xtol=STEER_TOL)
        # Expansion failed: scan for the sign change closest to the seed.
        grid = np.linspace(lo_lim, hi_lim, 61)
        vals = [f(g) for g in grid]
        best = None
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                candidate = grid[i]
            elif vals[i] * vals[i + 1] < 0:
                candidate = brentq(f, grid[i], grid[i + 1], xtol=STEER_TOL)
            else:
                continue
            if best is None or abs(candidate - seed) < abs(best - seed):
                best = candidate
        if best is None:
            raise KinematicLockError(
                "tie-rod constraint has no solution within the steer range"
            )
        return best

    def _wheel_z(self, ctx, steer: float) -> float:
        lbj, kingpin, r_wc = ctx[0], ctx[1], ctx[3]
        w = _rotate(r_wc, kingpin, math.cos(steer), math.sin(steer))
        return w[2] + lbj[2]

    def solve_travel(self, dz: float, seed_angle: float, seed_steer: float):
        """Find (lca_angle, steer) placing the wheel center at height +dz."""
        if dz == 0.0:
            return 0.0, 0.0  # design position solves all constraints exactly
        last_steer = [seed_steer]

        def height_error(theta: float) -> float:
            ctx = self._context(theta)
            steer = self._solve_steer(ctx, last_steer[0])
            last_steer[0] = steer
            return self._wheel_z(ctx, steer) - self.wc_z0 - dz

        lo_lim, hi_lim = -LCA_ANGLE_LIMIT, LCA_ANGLE_LIMIT
        bracket = None
        for half in (0.03, 0.1, 0.25, LCA_ANGLE_LIMIT):
            a = max(seed_angle - half, lo_lim)
            b = min(seed_angle + half, hi_lim)
            if a >= b:
                continue
            try:
                fa, fb = height_error(a), height_error(b)
            except KinematicLockError:
                continue
            if fa == 0.0:
                bracket = (a, a)
                break
            if fb == 0.0:
                bracket = (b, b)
                break
            if fa * fb < 0:
                bracket = (a, b)
                break
        if bracket is None:
            raise KinematicLockError(
                "requested wheel travel is outside the solvable range", travel=dz
            )
        theta = bracket[0] if bracket[0] == bracket[1] else brentq(
            height_error, bracket[0], bracket[1], xtol=TRAVEL_TOL
        )
        ctx = self._context(theta)
        steer = self._solve_steer(ctx, last_steer[0])
        return theta, steer

    def sample(self, lca_angle: float, steer: float):
        """(toe_deg, camber_deg) of the spin axis at a solved configuration."""
        if lca_angle == 0.0 and steer == 0.0:
            spin = self.r_spin
        else:
            ctx = self._context(lca_angle)
            spin = _rotate(ctx[4], ctx[1], math.cos(steer), math.sin(steer))
        nx, ny, nz = spin
        toe = math.degrees(math.atan2(nx, ny))
        camber = math.degrees(math.atan2(nz, math.sqrt(nx * nx + ny * ny)))
        return toe, camber

    def pose(self, lca_angle: float, steer: float) -> KnucklePose:
        """Full rigid transform (cold path; sweeps use the tuple fast path)."""
        lbj1 = np.asarray(self._lbj_at(lca_angle))
        ctx = self._context(lca_angle)
        kingpin = np.asarray(ctx[1])
        a0 = np.asarray(self.strut_dir0)
        rot_align = _rotation_between(a0, kingpin)
        rot_steer = _axis_angle_matrix(kingpin, steer)
        rotation = rot_steer @ rot_align
        translation = lbj1 - rotation @ np.asarray(self.lbj0)
        return KnucklePose(rotation, translation, lca_angle, steer)


def _rotation_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimal rotation matrix taking unit vector a to unit vector b."""
    cross = np.cross(a, b)
    s = np.linalg.norm(cross)
    c = float(a @ b)
    if s < 1e-15:
        if c < 0:
            raise ValueError("vectors are anti-parallel")
        return np.eye(3)
    return _axis_angle_matrix(cross / s, math.atan2(s, c))


def _axis_angle_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    kx, ky, kz = axis
    k_cross = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(angle) * k_cross + (1 - math.cos(angle)) * (k_cross @ k_cross)


def solve_suspension_position(
    hardpoints: HardpointSet, lca_angle: float, steer_seed: float = 0.0
) -> KnucklePose:
    """Knuckle pose at a given LCA angle, steer resolved by the tie rod."""
    if abs(lca_angle) > LCA_ANGLE_LIMIT:
        raise ValueError(
            f"lca_angle {lca_angle:+.3f} outside +/-{LCA_ANGLE_LIMIT} rad"
        )
    corner = _Corner(hardpoints)
    if lca_angle == 0.0:
        return corner.pose(0.0, 0.0)
    ctx = corner._context(lca_angle)
    steer = corner._solve_steer(ctx, steer_seed)
    return corner.pose(lca_angle, steer)


def constraint_residuals(hardpoints: HardpointSet, pose: KnucklePose) -> dict[str, float]:
    """Per-constraint residuals (meters) of a pose; all ~0 for valid solves."""
    corner = _Corner(hardpoints)
    lbj1 = pose.apply(hardpoints.lower_ball_joint)
    circle = np.asarray(corner._lbj_at(pose.lca_angle))
    lca = float(np.linalg.norm(lbj1 - circle))

    strut_dir = pose.rotation @ np.asarray(corner.strut_dir0)
    rel = np.asarray(corner.strut_top) - lbj1
    strut = float(np.linalg.norm(rel - (rel @ strut_dir) * strut_dir))

    otr1 = pose.apply(hardpoints.outer_tie_rod)
    tie = float(abs(np.linalg.norm(otr1 - hardpoints.inner_tie_rod) - corner.tie_len))
    return {"lca": lca, "strut": strut, "tie_rod": tie}


def _solve_sweep(corner: _Corner, grid: np.ndarray) -> dict:
    """Solve every unique travel value, outward from zero, seeded chains."""
    solved: dict[float, tuple[float, float]] = {}
    unique = sorted(set(grid.tolist()))
    chains = [
        [t for t in unique if t >= 0.0],
        [t for t in reversed(unique) if t < 0.0],
    ]
    for chain in chains:
        seed_angle, seed_steer = 0.0, 0.0
        for dz in chain:
            angle, steer = corner.solve_travel(dz, seed_angle, seed_steer)
            seed_angle, seed_steer = angle, steer
            solved[dz] = (angle, steer)
    return solved


def _as_travel_grid(travel) -> np.ndarray:
    grid = default_travel_grid() if travel is None else np.atleast_1d(
        np.asarray(travel, dtype=float)
    )
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("travel grid must be non-empty and finite")
    return grid


def evaluate_kinematics(hardpoints: HardpointSet, travel=None) -> KinematicCurve:
    """Solve the sweep and return toe / camber curves.

    Travel samples are solved outward from zero travel (positive and negative
    chains) with brackets seeded from the previous sample, independent of the
    order of the input grid; results are returned in input order.
    """
    grid = _as_travel_grid(travel)
    corner = _Corner(hardpoints)
    solved = _solve_sweep(corner, grid)
    samples = {dz: corner.sample(angle, steer)
               for dz, (angle, steer) in solved.items()}
    toe = np.array([samples[t][0] for t in grid.tolist()])
    camber = np.array([samples[t][1] for t in grid.tolist()])
    return KinematicCurve(grid, toe, camber)


def sweep_poses(hardpoints: HardpointSet, travel=None) -> list[KnucklePose]:
    """Full knuckle poses along a travel sweep, in input-grid order."""
    grid = _as_travel_grid(travel)
    corner = _Corner(hardpoints)
    solved = _solve_sweep(corner, grid)
    return [corner.pose(*solved[t]) for t in grid.tolist()]


def curve_statistics(
    curve: KinematicCurve, track_width: float = DEFAULT_TRACK_WIDTH
) -> CurveStatistics:
    """Bump steer, roll steer and static toe from a kinematic curve.

    Bump steer is the least-squares slope of the five samples centered on
    zero travel. Roll steer divides the toe change over antisymmetric travel
    +/-ROLL_TRAVEL by the corresponding body-roll angle for the given track
    width. The curve must cover +/-ROLL_TRAVEL with strictly increasing
    travel containing an exact zero sample.
    """
    if track_width <= 0:
        raise ValueError("track width must be positive")
    t, toe = curve.travel, curve.toe
    if t.size < 5 or np.any(np.diff(t) <= 0):
        raise ValueError("curve travel must be strictly increasing with >= 5 samples")
    zero = np.where(t == 0.0)[0]
    if zero.size != 1:
        raise ValueError("curve travel must contain exactly one zero sample")
    i0 = int(zero[0])
    if i0 < 2 or i0 > t.size - 3:
        raise ValueError("zero travel must have two samples on each side")
    if t[0] > -ROLL_TRAVEL or t[-1] < ROLL_TRAVEL:
        raise ValueError(f"curve must cover +/-{ROLL_TRAVEL} m travel")

    ts = t[i0 - 2 : i0 + 3]
    ys = toe[i0 - 2 : i0 + 3]
    tc = ts - ts.mean()
    bump = float((tc @ (ys - ys.mean())) / (tc @ tc))

    toe_up = float(np.interp(ROLL_TRAVEL, t, toe))
    toe_dn = float(np.interp(-ROLL_TRAVEL, t, toe))
    roll_angle_deg = math.degrees(math.atan(2.0 * ROLL_TRAVEL / track_width))
    roll = (toe_up - toe_dn) / (2.0 * roll_angle_deg)

    return CurveStatistics(bump, roll, float(toe[i0]))


@dataclass(frozen=True)
class DesignVariables:
    """Which hardpoint coordinates are free, and their box bounds."""

    coordinates: tuple[tuple[str, str], ...]
    bounds: DomainBounds

    def __post_init__(self):
        coords = tuple((str(h), str(a)) for h, a in self.coordinates)
        if not 1 <= len(coords) <= 24:
            raise ValueError("between 1 and 24 free coordinates are supported")
        seen = set()
        for hp, axis in coords:
            if hp not in HARDPOINT_NAMES:
                raise ValueError(f"unknown hardpoint {hp!r}")
            if axis not in AXES:
                raise ValueError(f"unknown axis {axis!r} (use x, y or z)")
            if (hp, axis) in seen:
                raise ValueError(f"duplicate free coordinate {hp}.{axis}")
            seen.add((hp, axis))
        if self.bounds.dim != len(coords):
            raise ValueError(
                f"bounds dimension {self.bounds.dim} does not match "
                f"{len(coords)} free coordinates"
            )
        object.__setattr__(self, "coordinates", coords)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"{hp}.{axis}" for hp, axis in self.coordinates)

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def apply(self, base: HardpointSet, point: np.ndarray) -> HardpointSet:
        y = np.asarray(point, dtype=float)
        if y.shape != (self.dim,):
            raise ValueError(f"point must have shape ({self.dim},), got {y.shape}")
        data = {name: np.array(getattr(base, name)) for name in HARDPOINT_NAMES}
        for (hp, axis), value in zip(self.coordinates, y):
            data[hp][AXES.index(axis)] = value
        return HardpointSet(**data)

    def nominal(self, base: HardpointSet) -> np.ndarray:
        return np.array(
            [getattr(base, hp)[AXES.index(axis)] for hp, axis in self.coordinates]
        )

    @classmethod
    def around(
        cls,
        base: HardpointSet,
        coordinates,
        half_range: float = 0.025,
    ) -> "DesignVariables":
        """Free coordinates with symmetric bounds about the nominal geometry."""
        coords = tuple(coordinates)
        for hp, axis in coords:
            if hp not in HARDPOINT_NAMES:
                raise ValueError(f"unknown hardpoint {hp!r}")
            if axis not in AXES:
                raise ValueError(f"unknown axis {axis!r} (use x, y or z)")
        center = np.array(
            [getattr(base, hp)[AXES.index(axis)] for hp, axis in coords]
        )
        bounds = DomainBounds(center - half_range, center + half_range)
        return cls(coords, bounds)


class SuspensionModel:
    """Built-in discipline model: hardpoints -> kinematic-curve statistics."""

    output_names = ("bump_steer", "roll_steer", "static_toe")
    is_pure = True

    def __init__(
        self,
        base: HardpointSet,
        design: DesignVariables,
        travel=None,
        track_width: float = DEFAULT_TRACK_WIDTH,
        name: str = "macpherson",
    ):
        self.base = base
        self.design = design
        self.travel = default_travel_grid() if travel is None else np.asarray(
            travel, dtype=float
        )
        self.track_width = float(track_width)
        self.name = name

    @property
    def bounds(self) -> DomainBounds:
        return self.design.bounds

    @property
    def variable_names(self) -> tuple[str, ...]:
        return self.design.names

    def hardpoints_at(self, point: np.ndarray) -> HardpointSet:
        try:
            return self.design.apply(self.base, point)
        except ValueError as exc:
            raise EvaluationError(f"invalid geometry: {exc}") from exc

    def curve_at(self, point: np.ndarray) -> KinematicCurve:
        return evaluate_kinematics(self.hardpoints_at(point), self.travel)

    def evaluate(self, point: np.ndarray) -> dict[str, float]:
        stats = curve_statistics(self.curve_at(point), self.track_width)
        return stats.as_dict()


def nominal_fixture_path() -> Path:
    """Filesystem path of the packaged nominal geometry fixture."""
    return Path(resources.files("kinverse").joinpath("data/nominal_macpherson.json"))


def load_fixture(source) -> dict:
    """Read a fixture file; `source` may be a path or the string 'builtin'."""
    path = nominal_fixture_path() if str(source) == "builtin" else Path(source)
    try:
        payload = json.loads(path.read_text())
    except FileNotFoundError:
        raise EvaluationError(f"fixture file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise EvaluationError(f"fixture file {path} is not valid JSON: {exc}") from exc
    if "hardpoints" not in payload:
        raise EvaluationError(f"fixture file {path} lacks a 'hardpoints' block")
    return payload


def load_hardpoints(source) -> HardpointSet:
    return HardpointSet.from_dict(load_fixture(source)["hardpoints"])

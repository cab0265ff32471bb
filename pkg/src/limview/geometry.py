"""Acquisition curves, observation arcs and ray/curve intersections.

Points are numpy arrays of shape ``(..., 2)``.  All curve functions accept
scalar or array parameters and wrap them modulo the curve period.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import DegenerateTangent, NotInside, ValidationError

TWO_PI = 2.0 * math.pi
TOL_S = 1e-9  # boundary classification tolerance, parameter units

_POLAR_POLE = np.array([-0.5, 0.0])


@dataclass(frozen=True)
class AcquisitionCurve:
    """Closed convex curve of transducer positions.

    ``kind`` is one of ``"circle"``, ``"ellipse"``, ``"polar"`` or
    ``"tabulated"``.  Use the constructors below rather than building
    instances by hand.
    """

    kind: str
    a_axis: float = 1.0
    b_axis: float = 1.0
    samples: Optional[tuple] = field(default=None, repr=False)
    _spline: object = field(default=None, compare=False, repr=False)

    @classmethod
    def circle(cls) -> "AcquisitionCurve":
        return cls("circle")

    @classmethod
    def ellipse(cls, a_axis: float, b_axis: float) -> "AcquisitionCurve":
        if a_axis <= 0 or b_axis <= 0:
            raise ValidationError("ellipse axes must be positive")
        return cls("ellipse", float(a_axis), float(b_axis))

    @classmethod
    def polar(cls) -> "AcquisitionCurve":
        return cls("polar")

    @classmethod
    def tabulated(cls, s, x, y) -> "AcquisitionCurve":
        """Periodic cubic-spline curve through samples ``(s_i, x_i, y_i)``.

        If the last sample does not repeat the first one the curve is closed
        by appending the first point one mean spacing after the last.
        """
        s = np.asarray(s, dtype=float)
        pts = np.column_stack([x, y]).astype(float)
        if s.ndim != 1 or len(s) < 4 or len(pts) != len(s):
            raise ValidationError("tabulated curve needs at least 4 (s, x, y) samples")
        if np.any(np.diff(s) <= 0):
            raise ValidationError("tabulated curve parameters must be strictly increasing")
        if np.max(np.abs(pts[-1] - pts[0])) > 1e-12:
            s = np.append(s, s[-1] + np.mean(np.diff(s)))
            pts = np.vstack([pts, pts[:1]])
        else:
            pts[-1] = pts[0]
        spline = CubicSpline(s, pts, bc_type="periodic", axis=0)
        samples = (tuple(s), tuple(map(tuple, pts)))
        curve = cls("tabulated", samples=samples, _spline=spline)
        curve.validate()
        return curve

    @property
    def period(self) -> float:
        if self.kind == "tabulated":
            s = self.samples[0]
            return s[-1] - s[0]
        return TWO_PI

    @property
    def s_origin(self) -> float:
        return self.samples[0][0] if self.kind == "tabulated" else 0.0

    @property
    def name(self) -> str:
        if self.kind == "ellipse":
            return f"ellipse:{self.a_axis:g},{self.b_axis:g}"
        return self.kind

    def wrap(self, s):
        return self.s_origin + np.mod(np.asarray(s, dtype=float) - self.s_origin, self.period)

    def point(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind == "circle":
            return np.stack([np.cos(s), np.sin(s)], axis=-1)
        if self.kind == "ellipse":
            return np.stack([self.a_axis * np.cos(s), self.b_axis * np.sin(s)], axis=-1)
        if self.kind == "polar":
            c = np.cos(s)
            return np.stack([0.5 * ((2.0 + c) * c - 1.0), 0.5 * (2.0 + c) * np.sin(s)], axis=-1)
        return self._spline(self.wrap(s))

    def derivative(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind == "circle":
            return np.stack([-np.sin(s), np.cos(s)], axis=-1)
        if self.kind == "ellipse":
            return np.stack([-self.a_axis * np.sin(s), self.b_axis * np.cos(s)], axis=-1)
        if self.kind == "polar":
            c, sn = np.cos(s), np.sin(s)
            return np.stack([-sn * (1.0 + c), 0.5 * (np.cos(2.0 * s) + 2.0 * c)], axis=-1)
        return self._spline(self.wrap(s), 1)

    def sample(self, n: int = 4096) -> np.ndarray:
        s = self.s_origin + self.period * np.arange(n) / n
        return self.point(s)

    @property
    def orientation(self) -> float:
        """+1 for counter-clockwise traversal, -1 for clockwise."""
        p = self.sample(1024)
        q = np.roll(p, -1, axis=0)
        area = 0.5 * np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1])
        return 1.0 if area > 0 else -1.0

    def diameter(self) -> float:
        """Largest distance between two points of the curve."""
        p = self.sample(1024)
        d = p[:, None, :] - p[None, :, :]
        return float(np.sqrt(np.max(np.sum(d * d, axis=-1))))

    def validate(self) -> None:
        """Check closedness and convexity on a 4096-point sample."""
        if np.max(np.abs(self.point(self.s_origin) - self.point(self.s_origin + self.period))) > 1e-12:
            raise ValidationError(f"curve {self.name} is not closed")
        p = self.sample(4096)
        d = np.diff(np.vstack([p, p[:2]]), axis=0)
        cross = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]
        scale = np.max(np.abs(cross))
        if not (np.all(cross >= -1e-9 * scale) or np.all(cross <= 1e-9 * scale)):
            raise ValidationError(f"curve {self.name} is not convex")

    def level(self, pts) -> np.ndarray:
        """Signed containment function: negative inside, zero on the curve."""
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        if self.kind == "circle":
            return np.sqrt(x * x + y * y) - 1.0
        if self.kind == "ellipse":
            return np.sqrt((x / self.a_axis) ** 2 + (y / self.b_axis) ** 2) - 1.0
        if self.kind == "polar":
            dx, dy = x - _POLAR_POLE[0], y - _POLAR_POLE[1]
            rho = np.sqrt(dx * dx + dy * dy)
            cos_theta = np.divide(dx, rho, out=np.ones_like(rho), where=rho > 0)
            return rho - (1.0 + 0.5 * cos_theta)
        return self._polygon_level(pts)

    def _polygon_level(self, pts: np.ndarray) -> np.ndarray:
        # max signed distance to the edge lines of a dense convex polygon
        verts = self.sample(4096)
        edges = np.roll(verts, -1, axis=0) - verts
        normals = self.orientation * np.column_stack([edges[:, 1], -edges[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        offsets = np.sum(normals * verts, axis=1)
        flat = pts.reshape(-1, 2)
        out = np.empty(len(flat))
        for lo in range(0, len(flat), 2048):
            chunk = flat[lo:lo + 2048]
            out[lo:lo + 2048] = np.max(chunk @ normals.T - offsets, axis=1)
        return out.reshape(pts.shape[:-1])

    def contains(self, pts) -> np.ndarray:
        return self.level(pts) < 0


class Frame(NamedTuple):
    tangent: np.ndarray
    normal: np.ndarray
    speed: float


def curve_point(curve: AcquisitionCurve, s) -> np.ndarray:
    return curve.point(s)


def curve_frame(curve: AcquisitionCurve, s: float) -> Frame:
    """Unit tangent, outward unit normal and speed ``|z'(s)|`` at ``s``."""
    d = curve.derivative(s)
    speed = float(np.hypot(d[0], d[1]))
    if speed < 1e-10:
        raise DegenerateTangent(f"|z'({s})| = {speed:.3g}")
    t = d / speed
    n = curve.orientation * np.array([t[1], -t[0]])
    return Frame(t, n, speed)


def outward_normals(curve: AcquisitionCurve, s) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised outward normals and speeds for an array of parameters."""
    d = curve.derivative(s)
    speed = np.sqrt(d[..., 0] ** 2 + d[..., 1] ** 2)
    if np.any(speed < 1e-10):
        raise DegenerateTangent("vanishing tangent on the sampled arc")
    t = d / speed[..., None]
    n = curve.orientation * np.stack([t[..., 1], -t[..., 0]], axis=-1)
    return n, speed


@dataclass(frozen=True)
class Arc:
    """Observation arc: the part of ``curve`` with parameters in [s_start, s_end]."""

    curve: AcquisitionCurve
    s_start: float
    s_end: float

    def __post_init__(self):
        if not self.s_start < self.s_end <= self.s_start + self.curve.period + 1e-12:
            raise ValidationError("arc needs s_start < s_end <= s_start + period")

    @classmethod
    def full(cls, curve: AcquisitionCurve) -> "Arc":
        return cls(curve, curve.s_origin, curve.s_origin + curve.period)

    @property
    def length(self) -> float:
        """Parameter length ``b`` of the arc."""
        return self.s_end - self.s_start

    @property
    def closed(self) -> bool:
        return self.length >= self.curve.period - 1e-12

    @property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return self.curve.point(self.s_start), self.curve.point(self.s_end)

    def offset(self, s):
        """Arc offset of curve parameter ``s``, in [0, period)."""
        return np.mod(np.asarray(s, dtype=float) - self.s_start, self.curve.period)


@dataclass(frozen=True)
class Covector:
    x: tuple
    xi: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "xi", tuple(float(v) for v in self.xi))
        if math.hypot(*self.xi) == 0:
            raise ValidationError("covector direction must be nonzero")

    def flipped(self) -> "Covector":
        return Covector(self.x, (-self.xi[0], -self.xi[1]))


class Hit(NamedTuple):
    point: np.ndarray
    param: float
    t: float


class Visibility(enum.Enum):
    DOUBLY_VISIBLE = "doubly_visible"
    SINGLY_VISIBLE = "singly_visible"
    INVISIBLE = "invisible"
    BOUNDARY = "boundary"


def ray_intersections(curve: AcquisitionCurve, x, xi) -> tuple[Hit, Hit]:
    """Intersections ``z+`` and ``z-`` of the line ``x + t*xi`` with the curve.

    The roots of ``cross(xi, z(s) - x)`` are bracketed on a uniform parameter
    sample and refined with Brent's method; convexity guarantees exactly one
    root with ``t > 0`` and one with ``t < 0``.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    norm = math.hypot(xi[0], xi[1])
    if norm == 0:
        raise ValidationError("ray direction must be nonzero")
    if not curve.level(x) < 0:
        raise NotInside(f"point {tuple(x)} is not strictly inside {curve.name}")
    u = xi / norm

    s0, period = curve.s_origin, curve.period

    def cross(s):
        # evaluate the end of the period at s0 so that both ends agree exactly
        s = np.where(np.asarray(s) >= s0 + period, s0, s)
        z = curve.point(s)
        return u[0] * (z[..., 1] - x[1]) - u[1] * (z[..., 0] - x[0])

    grid = s0 + period * np.arange(1025) / 1024
    vals = cross(grid)
    signs = np.sign(vals)  # not vals[i] * vals[i+1], which can underflow to 0
    roots = []
    for i in range(1024):
        if signs[i] == 0:
            roots.append(grid[i])
        elif signs[i] * signs[i + 1] < 0:
            roots.append(brentq(cross, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15))
    hits = {}
    for s in roots:
        z = curve.point(s)
        t = float(np.dot(z - x, u)) / norm
        key = "plus" if t > 0 else "minus"
        if key in hits:
            raise ValidationError("ray meets the curve twice on one side; curve not convex")
        hits[key] = Hit(z, float(curve.wrap(s)), t)
    if len(hits) != 2:
        raise ValidationError("failed to locate both ray intersections")
    return hits["plus"], hits["minus"]


def _arc_status(arc: Arc, s: float) -> str:
    off = float(arc.offset(s))
    if arc.closed:
        return "interior"
    period = arc.curve.period
    if off < TOL_S or period - off < TOL_S or abs(off - arc.length) < TOL_S:
        return "boundary"
    return "interior" if off < arc.length else "outside"


def classify_covector(arc: Arc, cov: Covector) -> Visibility:
    z_plus, z_minus = ray_intersections(arc.curve, cov.x, cov.xi)
    status = (_arc_status(arc, z_plus.param), _arc_status(arc, z_minus.param))
    if "boundary" in status:
        return Visibility.BOUNDARY
    inside = status.count("interior")
    if inside == 2:
        return Visibility.DOUBLY_VISIBLE
    if inside == 1:
        return Visibility.SINGLY_VISIBLE
    return Visibility.INVISIBLE


def parse_curve(text: str) -> AcquisitionCurve:
    """Curve from its CLI name: circle, ellipse:a,b, polar, or a CSV path."""
    text = text.strip()
    if text == "circle":
        return AcquisitionCurve.circle()
    if text == "polar":
        return AcquisitionCurve.polar()
    if text.startswith("ellipse:"):
        try:
            a, b = (float(v) for v in text[len("ellipse:"):].split(","))
        except ValueError as exc:
            raise ValidationError(f"bad ellipse spec {text!r}") from exc
        return AcquisitionCurve.ellipse(a, b)
    try:
        data = np.loadtxt(text, delimiter=",", ndmin=2, comments="#")
    except ValueError:
        # a header row such as "s,x,y"
        data = np.loadtxt(text, delimiter=",", ndmin=2, comments="#", skiprows=1)
    if data.shape[1] != 3:
        raise ValidationError(f"{text}: expected three columns s,x,y")
    return AcquisitionCurve.tabulated(data[:, 0], data[:, 1], data[:, 2])

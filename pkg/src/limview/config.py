"""Run configuration, the flat ``key = value`` config format and presets.

Example config file::

    curve = circle
    arc = 0, pi/2
    phantom = (0, 0, 0.3, 1)
    n = 256
    window = rational
    eps = 0.2
    order = 2
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .backprojection import ReconGrid
from .errors import IoFailure, ValidationError
from .filter import FilterPlan
from .geometry import AcquisitionCurve, Arc, parse_curve
from .phantom import Phantom
from .window import KINDS, WindowSpec

PI = math.pi
_ANGLE = re.compile(r"^\s*([+-]?\d*\.?\d*(?:[eE][+-]?\d+)?)?\s*\*?\s*(pi)?\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text) -> float:
    """Parse ``1.5``, ``pi``, ``pi/2``, ``3pi/2`` or ``3*pi/2``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _ANGLE.match(str(text))
    if not m or not (m.group(1) or m.group(2)):
        raise ValidationError(f"cannot parse angle {text!r}")
    coef = float(m.group(1)) if m.group(1) not in (None, "", "+", "-") else (-1.0 if m.group(1) == "-" else 1.0)
    value = coef * (PI if m.group(2) else 1.0)
    if m.group(3):
        value /= float(m.group(3))
    return value


def parse_tuples(text: str) -> list[tuple]:
    groups = re.findall(r"\(([^)]*)\)", text)
    if not groups and text.strip():
        groups = [text]
    try:
        return [tuple(float(v) for v in g.split(",")) for g in groups]
    except ValueError as exc:
        raise ValidationError(f"bad tuple list {text!r}") from exc


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    curve: str = "circle"
    s_start: float = 0.0
    s_end: float = 2 * PI
    phantom: list = field(default_factory=lambda: [(0.0, 0.0, 0.3, 1.0)])
    n: int = 512
    extent: float = 1.0
    mask_outside: bool = True
    n_a: int = 1024
    n_r: int = 1024
    r_max: Optional[float] = None
    window: str = "sharp"
    eps: float = 0.2
    order: int = 1
    filter_dim: int = 2
    pad: int = 2
    taper: float = 0.1
    n_t: Optional[int] = None
    label: str = "recon"
    experiment: str = ""

    # -- derived objects -------------------------------------------------
    def curve_obj(self) -> AcquisitionCurve:
        curve = parse_curve(self.curve)
        curve.validate()
        return curve

    def arc(self) -> Arc:
        return Arc(self.curve_obj(), self.s_start, self.s_end)

    def phantom_obj(self) -> Phantom:
        for row in self.phantom:
            if len(row) != 4:
                raise ValidationError(f"phantom entries are (cx, cy, radius, amplitude), got {row}")
        return Phantom.from_tuples(self.phantom)

    def window_spec(self) -> WindowSpec:
        return WindowSpec(self.window, self.s_end - self.s_start, self.eps, self.order)

    def plan(self) -> FilterPlan:
        return FilterPlan(self.filter_dim, self.n_t, self.pad, self.taper)

    def grid(self) -> ReconGrid:
        return ReconGrid(self.n, self.extent, self.mask_outside)

    def radial_max(self) -> float:
        return self.r_max if self.r_max is not None else self.curve_obj().diameter()

    def validate(self) -> None:
        """Check every component invariant; raise ValidationError naming it."""
        arc = self.arc()
        self.phantom_obj().validate_inside(arc.curve)
        if self.window not in KINDS:
            raise ValidationError(f"window must be one of {KINDS}")
        self.window_spec()
        self.plan().t_size(self.n_r)
        self.grid()
        if self.n_a < 2 or self.n_r < 2:
            raise ValidationError("n_a and n_r must be >= 2")
        diameter = arc.curve.diameter()
        if self.radial_max() < diameter - 1e-9:
            raise ValidationError(f"r_max = {self.radial_max()} is below the curve diameter {diameter:.6g}")

    @property
    def window_label(self) -> str:
        return self.window_spec().label

    # -- (de)serialisation -----------------------------------------------
    def update(self, mapping: dict) -> "RunConfig":
        """New config with ``mapping`` (strings or values) applied."""
        known = {f.name: f for f in fields(self)}
        aliases = {"na": "n_a", "nr": "n_r", "rmax": "r_max", "k": "order", "epsilon": "eps"}
        changes = {}
        for key, value in mapping.items():
            key = key.strip().replace("-", "_")
            key = aliases.get(key, key)
            if value is None:
                continue
            if key == "arc":
                parts = value if isinstance(value, (tuple, list)) else str(value).split(",")
                if len(parts) != 2:
                    raise ValidationError("arc needs two values: s_start, s_end")
                changes["s_start"], changes["s_end"] = (parse_angle(p) for p in parts)
                continue
            if key not in known:
                raise ValidationError(f"unknown config key {key!r}")
            changes[key] = _coerce(key, value)
        return replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if value is None:
                continue
            if key == "phantom":
                value = ", ".join("(" + ", ".join(repr(float(v)) for v in row) + ")" for row in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def _coerce(key: str, value):
    if key == "phantom":
        return parse_tuples(value) if isinstance(value, str) else [tuple(map(float, r)) for r in value]
    if key in ("s_start", "s_end"):
        return parse_angle(value)
    if key in ("n", "n_a", "n_r", "order", "filter_dim", "pad", "n_t"):
        try:
            return int(value)
        except ValueError as exc:
            raise ValidationError(f"{key} must be an integer, got {value!r}") from exc
    if key in ("extent", "eps", "taper", "r_max"):
        try:
            return float(value)
        except ValueError as exc:
            raise ValidationError(f"{key} must be a number, got {value!r}") from exc
    if key == "mask_outside":
        return _bool(value)
    return str(value).strip()


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path, base: Optional[RunConfig] = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return (base or RunConfig()).update(parse_config_text(text))


# -- presets ------------------------------------------------------------------
# PRESET_FIGURES holds a one-line description of each preset.

QUARTER = (0.0, PI / 2)
THREE_QUARTERS = (0.0, 3 * PI / 2)
FULL = (0.0, 2 * PI)


def _p(arc, window="sharp", eps=0.2, order=1, curve="circle"):
    return {"curve": curve, "s_start": arc[0], "s_end": arc[1],
            "window": window, "eps": eps, "order": order}


PRESETS = {
    "fig1": _p(FULL),
    "fig2": _p(FULL, curve="polar"),
    "fig3": _p(QUARTER),
    "fig5a": _p(QUARTER, "rational", 0.05, 1),
    "fig5b": _p(QUARTER, "rational", 0.2, 1),
    "fig5c": _p(QUARTER, "rational", 1.0, 1),
    "fig6a": _p(QUARTER, "rational", 0.2, 1),
    "fig6b": _p(QUARTER, "rational", 0.2, 2),
    "fig6c": _p(QUARTER, "rational", 0.2, 3),
    "fig7": _p(THREE_QUARTERS),
    "fig8a": _p(THREE_QUARTERS, "rational", 0.05, 1),
    "fig8b": _p(THREE_QUARTERS, "rational", 0.2, 1),
    "fig8c": _p(THREE_QUARTERS, "rational", 1.0, 1),
    "fig9a": _p(THREE_QUARTERS, "rational", 0.2, 1),
    "fig9b": _p(THREE_QUARTERS, "rational", 0.2, 2),
    "fig9c": _p(THREE_QUARTERS, "rational", 0.2, 3),
    "fig11a": _p(THREE_QUARTERS, "plateau", 0.1, 1),
    "fig11b": _p(THREE_QUARTERS, "plateau", 0.25, 1),
    "fig11c": _p(THREE_QUARTERS, "plateau", 0.4, 1),
    "fig12a": _p(THREE_QUARTERS),
    "fig12b": _p(THREE_QUARTERS, "plateau", 0.4, 1),
    "fig12c": _p(THREE_QUARTERS, "plateau", 0.4, 2),
}

PRESET_FIGURES = {
    "fig1": "full unit circle, sharp cutoff (near-perfect inversion)",
    "fig2": "full polar curve, sharp cutoff",
    "fig3": "quarter circle, no artifact reduction",
    "fig5a": "quarter circle, rational window k=1, eps=0.05",
    "fig5b": "quarter circle, rational window k=1, eps=0.2",
    "fig5c": "quarter circle, rational window k=1, eps=1",
    "fig6a": "quarter circle, rational window eps=0.2, k=1",
    "fig6b": "quarter circle, rational window eps=0.2, k=2",
    "fig6c": "quarter circle, rational window eps=0.2, k=3",
    "fig7": "three-quarter circle, no artifact reduction",
    "fig8a": "three-quarter circle, rational window k=1, eps=0.05",
    "fig8b": "three-quarter circle, rational window k=1, eps=0.2",
    "fig8c": "three-quarter circle, rational window k=1, eps=1",
    "fig9a": "three-quarter circle, rational window eps=0.2, k=1",
    "fig9b": "three-quarter circle, rational window eps=0.2, k=2",
    "fig9c": "three-quarter circle, rational window eps=0.2, k=3",
    "fig11a": "three-quarter circle, plateau window k=1, eps=0.1",
    "fig11b": "three-quarter circle, plateau window k=1, eps=0.25",
    "fig11c": "three-quarter circle, plateau window k=1, eps=0.4",
    "fig12a": "three-quarter circle, no smoothing (plateau baseline)",
    "fig12b": "three-quarter circle, plateau window k=1, eps=0.4",
    "fig12c": "three-quarter circle, plateau window k=2, eps=0.4",
}


def _sweep(arc, runs, curve="circle"):
    return [(label, _p(arc, window, eps, order, curve)) for label, window, eps, order in runs]


_RATIONAL_SWEEP = [
    ("sharp", "sharp", 0.2, 1),
    ("rational_eps0.05_k1", "rational", 0.05, 1),
    ("rational_eps0.2_k1", "rational", 0.2, 1),
    ("rational_eps1_k1", "rational", 1.0, 1),
    ("rational_eps0.2_k2", "rational", 0.2, 2),
    ("rational_eps0.2_k3", "rational", 0.2, 3),
]

EXPERIMENTS = {
    "exp1": _sweep(QUARTER, _RATIONAL_SWEEP),
    "exp2": _sweep(THREE_QUARTERS, _RATIONAL_SWEEP),
    "exp3": _sweep(THREE_QUARTERS, [("sharp", "sharp", 0.2, 1)] + [
        (f"plateau_eps{eps:g}_k{k}", "plateau", eps, k)
        for k in (1, 2) for eps in (0.1, 0.25, 0.4)]),
    "fullcircle": _sweep(FULL, [("sharp", "sharp", 0.2, 1)]),
    "polar": _sweep(FULL, [("sharp", "sharp", 0.2, 1)], curve="polar"),
}

SCALES = (256, 512, 1024, 2048)


def scale_overrides(scale: int) -> dict:
    """Image size ``scale`` with ``n_a = n_r = max(scale, 1024)``."""
    if scale not in SCALES:
        raise ValidationError(f"scale must be one of {SCALES}")
    samples = max(scale, 1024)
    return {"n": scale, "n_a": samples, "n_r": samples}

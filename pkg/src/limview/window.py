"""Smoothing windows on the observation arc.

All windows are functions of the arc offset ``s`` in ``[0, b]``:

* ``sharp``: the characteristic function of the arc.
* ``rational``: ``(H(s) / H(b/2))**k`` with ``H(s) = s(b-s) / (s(b-s) + eps)``.
* ``plateau``: ``h0(s/b)**k`` where ``h0`` rises as ``sigma(2 eps - sigma) / eps^2``
  on ``[0, eps]``, equals 1 on the middle and mirrors on ``[1 - eps, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange, ValidationError

KINDS = ("sharp", "rational", "plateau")


@dataclass(frozen=True)
class WindowSpec:
    kind: str
    b: float
    epsilon: float = 0.2
    order_k: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown window kind {self.kind!r}")
        if not self.b > 0:
            raise ValidationError("window arc length b must be positive")
        if self.kind == "sharp":
            return
        if int(self.order_k) != self.order_k or self.order_k < 1:
            raise ValidationError("order_k must be an integer >= 1")
        if self.kind == "rational" and not self.epsilon > 0:
            raise ValidationError("rational window needs epsilon > 0")
        if self.kind == "plateau" and not 0 < self.epsilon < 0.5:
            raise ValidationError("plateau window needs epsilon in (0, 0.5)")

    @property
    def label(self) -> str:
        if self.kind == "sharp":
            return "sharp"
        return f"{self.kind}_eps{self.epsilon:g}_k{self.order_k}"


def _rational(s, b, eps):
    q = s * (b - s)
    return q / (q + eps)


def _plateau_base(sigma, eps):
    sigma = np.minimum(sigma, 1.0 - sigma)
    return np.where(sigma <= eps, sigma * (2.0 * eps - sigma) / (eps * eps), 1.0)


def eval_window(spec: WindowSpec, s, tol: float = 1e-12):
    """Window value at arc offset(s) ``s``; raises OutOfRange outside [0, b]."""
    s = np.asarray(s, dtype=float)
    if np.any(s < -tol) or np.any(s > spec.b + tol):
        raise OutOfRange(f"arc offset outside [0, {spec.b}]")
    s = np.clip(s, 0.0, spec.b)
    if spec.kind == "sharp":
        out = np.ones_like(s)
    elif spec.kind == "rational":
        out = (_rational(s, spec.b, spec.epsilon) / _rational(0.5 * spec.b, spec.b, spec.epsilon)) ** spec.order_k
    else:
        out = _plateau_base(s / spec.b, spec.epsilon) ** spec.order_k
    return out if out.ndim else float(out)


def sample_window(spec: WindowSpec, s_grid, s_start: float = 0.0) -> np.ndarray:
    """Window weights aligned with sinogram rows at curve parameters ``s_grid``."""
    return np.asarray(eval_window(spec, np.asarray(s_grid, dtype=float) - s_start, tol=1e-9), dtype=float)


def verify_vanishing_order(spec: WindowSpec) -> float:
    """Fitted exponent of the window near ``s = 0`` (log-log slope)."""
    if spec.kind == "sharp":
        raise ValidationError("the sharp window does not vanish at the endpoints")
    delta = spec.b * np.logspace(-2, -5, 13)
    values = eval_window(spec, delta)
    slope, _ = np.polyfit(np.log(delta), np.log(values), 1)
    return float(slope)

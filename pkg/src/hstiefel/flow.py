"""Gradient flow x' = grad h(x): closed form through the relative SVD, and RK4.

Along the flow the interior singular values of P evolve independently as
``c(t)^2 = C e^{4t} / (1 + C e^{4t})`` with ``C = c^2 / (1 - c^2)``; the
frames m, a, b stay fixed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_expit

from .morse import gradient_field, height
from .quaternion import QuaternionMatrix, unitarity_residual
from .qsvd import SV_THRESHOLD, RelativeSVD, relative_svd
from .stiefel import ManifoldError, StiefelPoint, as_point, polar_retract


@dataclass(frozen=True)
class FlowData:
    decomposition: RelativeSVD
    C: np.ndarray

    def interior_values(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(c_i(t), s_i(t)), evaluated in the log domain so that |t| may be huge."""
        z = 4.0 * t + np.log(self.C)
        c = np.exp(0.5 * log_expit(z))
        s = np.exp(0.5 * log_expit(-z))
        return c, s

    def at(self, t: float) -> StiefelPoint:
        c, s = self.interior_values(t)
        return StiefelPoint(self.decomposition.reconstruct(c, s))


def flow_constants(x0, eps: float = SV_THRESHOLD) -> FlowData:
    x0 = as_point(x0)
    rel = relative_svd(x0, eps)
    c2 = rel.c**2
    return FlowData(decomposition=rel, C=c2 / (1.0 - c2))


def closed_form_flow(x0, t: float) -> StiefelPoint:
    data = x0 if isinstance(x0, FlowData) else flow_constants(x0)
    return data.at(t)


def flow_limits(x0) -> tuple[StiefelPoint, StiefelPoint]:
    """(backward, forward) limits: interior values sent to 0, resp. to 1.

    The backward limit is critical at level p, the forward one at level k - r.
    """
    data = x0 if isinstance(x0, FlowData) else flow_constants(x0)
    rel = data.decomposition
    zeros, ones = np.zeros(rel.q), np.ones(rel.q)
    backward = StiefelPoint(rel.reconstruct(c=zeros, s=ones))
    forward = StiefelPoint(rel.reconstruct(c=ones, s=zeros))
    return backward, forward


@dataclass
class FlowTrajectory:
    times: list = field(default_factory=list)
    points: list = field(default_factory=list)
    heights: list = field(default_factory=list)
    gradient_norms: list = field(default_factory=list)

    def append(self, t: float, point: StiefelPoint) -> None:
        self.times.append(float(t))
        self.points.append(point)
        self.heights.append(height(point))
        self.gradient_norms.append(gradient_field(point.mat, point.k).norm())

    @property
    def drift(self) -> float:
        """Largest deviation from x* x = I along the trajectory."""
        return max((unitarity_residual(p.mat) for p in self.points), default=0.0)

    def to_csv(self, with_points: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["t", "h", "grad_norm"]
        if with_points and self.points:
            header += point_columns(self.points[0].n, self.points[0].k)
        writer.writerow(header)
        for i, t in enumerate(self.times):
            row = [t, self.heights[i], self.gradient_norms[i]]
            if with_points:
                row += list(self.points[i].mat.real_vector())
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def point_columns(n: int, k: int) -> list[str]:
    return [f"x_{i}_{j}_{c}" for i in range(n) for j in range(k) for c in "wxyz"]


def closed_form_trajectory(x0, t0: float, t1: float, steps: int) -> FlowTrajectory:
    data = x0 if isinstance(x0, FlowData) else flow_constants(x0)
    traj = FlowTrajectory()
    for t in np.linspace(t0, t1, steps + 1):
        traj.append(t, data.at(t))
    return traj


def _rk4_step(y: QuaternionMatrix, k: int, dt: float) -> QuaternionMatrix:
    k1 = gradient_field(y, k)
    k2 = gradient_field(y + k1 * (0.5 * dt), k)
    k3 = gradient_field(y + k2 * (0.5 * dt), k)
    k4 = gradient_field(y + k3 * dt, k)
    return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)


def numerical_flow(x0, t0: float, t1: float, steps: int, reproject: bool = False) -> FlowTrajectory:
    """Fixed-step classical RK4 on the ambient ODE, sampled at every step.

    With ``reproject`` the iterate is pulled back to the manifold by the
    polar retraction after each step.
    """
    x0 = as_point(x0)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if not t0 < t1:
        raise ValueError("need t0 < t1")
    dt = (t1 - t0) / steps
    traj = FlowTrajectory()
    traj.append(t0, x0)
    y = x0.mat
    for i in range(1, steps + 1):
        y = _rk4_step(y, x0.k, dt)
        if not np.all(np.isfinite(y.data)):
            raise ManifoldError(f"integration blew up at step {i}; reduce the step size")
        if reproject:
            y = polar_retract(y).mat
        traj.append(t0 + i * dt, StiefelPoint(y))
    return traj


def limit_levels(x0) -> tuple[int, int]:
    data = x0 if isinstance(x0, FlowData) else flow_constants(x0)
    rel = data.decomposition
    return rel.p, rel.k - rel.r


def ode_rhs(x: StiefelPoint) -> QuaternionMatrix:
    return gradient_field(x.mat, x.k)


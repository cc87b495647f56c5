"""SU(2) arithmetic on unit quaternions.

A group element w + x*i + y*j + z*k with w^2+x^2+y^2+z^2 = 1 corresponds to
the SU(2) matrix [[w+x*i, y+z*i], [-y+z*i, w-x*i]]; its matrix trace is 2w.
Tangent vectors are pure quaternions, standing for traceless skew-Hermitian
matrices.  On top of the group operations this module provides Haar sampling
and the circle machinery used by the twist flows: the variation function
(traceless projection), the one-parameter subgroup through an element, the
time at which that subgroup returns to the element, and its period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CentralElement",
    "GroupElement",
    "TangentElement",
    "IDENTITY",
    "TANGENT_BASIS",
    "make_rng",
    "haar_sample",
    "trace",
    "variation",
    "exp_tangent",
    "one_param",
    "twist_time",
    "period",
]

# Renormalize a product when the squared norm has drifted past this.
_RENORM_TOL = 1e-13
# An element counts as central (trace within this of +-2) for twist_time/period.
CENTRAL_TOL = 1e-12


class CentralElement(ValueError):
    """Raised when an operation needs an element with trace strictly inside (-2, 2)."""


@dataclass(frozen=True, slots=True)
class TangentElement:
    """Pure quaternion x*i + y*j + z*k, a traceless skew-Hermitian tangent vector."""

    x: float
    y: float
    z: float

    def pairing(self, other: "TangentElement") -> float:
        """Bilinear form <X, Y> = tr(XY) of the matrix pictures (= -2 * dot product)."""
        return -2.0 * (self.x * other.x + self.y * other.y + self.z * other.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def scaled(self, c: float) -> "TangentElement":
        return TangentElement(c * self.x, c * self.y, c * self.z)


@dataclass(frozen=True, slots=True)
class GroupElement:
    """Unit quaternion; immutable, safe to share across threads."""

    w: float
    x: float
    y: float
    z: float

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        a, b = self, other
        w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z
        x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y
        y = a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z
        z = a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x
        n2 = w * w + x * x + y * y + z * z
        if abs(n2 - 1.0) > _RENORM_TOL:
            s = 1.0 / math.sqrt(n2)
            return GroupElement(w * s, x * s, y * s, z * s)
        return GroupElement(w, x, y, z)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.w, -self.x, -self.y, -self.z)

    def power(self, k: int) -> "GroupElement":
        if k < 0:
            return self.inverse().power(-k)
        out = IDENTITY
        for _ in range(k):
            out = out * self
        return out

    def conjugated_by(self, h: "GroupElement") -> "GroupElement":
        """h * self * h^-1."""
        return h * self * h.inverse()

    def distance(self, other: "GroupElement") -> float:
        """Sup-norm distance of quaternion components (0 iff equal group elements)."""
        return max(
            abs(self.w - other.w),
            abs(self.x - other.x),
            abs(self.y - other.y),
            abs(self.z - other.z),
        )

    def normalized(self) -> "GroupElement":
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        return GroupElement(self.w / n, self.x / n, self.y / n, self.z / n)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)


IDENTITY = GroupElement(1.0, 0.0, 0.0, 0.0)

TANGENT_BASIS = (
    TangentElement(1.0, 0.0, 0.0),
    TangentElement(0.0, 1.0, 0.0),
    TangentElement(0.0, 0.0, 1.0),
)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based random stream (Philox), reproducible from a 64-bit seed.

    Distinct ``stream`` values give independent streams for the same seed;
    every experiment records (seed, stream) so runs are bit-reproducible.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,) if stream else ())
    return np.random.Generator(np.random.Philox(ss))


def haar_sample(rng: np.random.Generator) -> GroupElement:
    """Uniform (Haar) element: a normalized 4-dimensional Gaussian draw."""
    v = rng.standard_normal(4)
    n = math.sqrt(float(v @ v))
    while n < 1e-12:  # pragma: no cover - probability zero
        v = rng.standard_normal(4)
        n = math.sqrt(float(v @ v))
    return GroupElement(float(v[0]) / n, float(v[1]) / n, float(v[2]) / n, float(v[3]) / n)


def trace(g: GroupElement) -> float:
    """Matrix trace, 2w, in [-2, 2]."""
    return 2.0 * g.w


def variation(g: GroupElement) -> TangentElement:
    """Traceless projection g - (tr(g)/2) * I, i.e. the pure quaternion part.

    It is dual to the differential of the trace: <variation(g), v> equals
    d/dt tr(g * exp(t v)) at t = 0 for every tangent v.
    """
    return TangentElement(g.x, g.y, g.z)


def exp_tangent(v: TangentElement) -> GroupElement:
    """Exponential of a pure quaternion: cos|v| + sin|v| * v/|v|."""
    m = v.norm()
    if m < 1e-300:
        return IDENTITY
    s = math.sin(m) / m
    return GroupElement(math.cos(m), s * v.x, s * v.y, s * v.z)


def one_param(g: GroupElement, t: float) -> GroupElement:
    """Point exp(t * variation(g)) on the circle subgroup through g.

    In axis-angle form g = cos(theta) + sin(theta) * u the result is
    cos(t sin theta) + sin(t sin theta) * u; it commutes with g, and
    t -> one_param(g, t) is a homomorphism from the reals.
    """
    s = math.sqrt(g.x * g.x + g.y * g.y + g.z * g.z)  # sin(theta) >= 0
    if s < 1e-300:
        return IDENTITY  # central g: variation vanishes, flow is constant
    a = t * s
    c, sn = math.cos(a), math.sin(a) / s
    return GroupElement(c, sn * g.x, sn * g.y, sn * g.z)


def _require_noncentral(g: GroupElement) -> float:
    f = trace(g)
    if abs(f) >= 2.0 - CENTRAL_TOL:
        raise CentralElement(f"trace {f!r} is within {CENTRAL_TOL} of +-2")
    return f


def twist_time(g: GroupElement) -> float:
    """Time s with one_param(g, s) = g, namely 2/sqrt(4-f^2) * arccos(f/2) for f = tr(g).

    Equals theta/sin(theta) in axis-angle form.  Raises CentralElement when
    |tr(g)| is within tolerance of 2 (degenerate holonomy, no circle).
    """
    f = _require_noncentral(g)
    half = 0.5 * f
    return math.acos(half) / math.sqrt(1.0 - half * half)


def period(g: GroupElement) -> float:
    """Minimal T > 0 with one_param(g, T) = identity: 4*pi/sqrt(4 - tr(g)^2)."""
    f = _require_noncentral(g)
    return 4.0 * math.pi / math.sqrt(4.0 - f * f)

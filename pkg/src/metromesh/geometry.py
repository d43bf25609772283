"""Planar predicates and area-coordinate transforms for linear triangles."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

Point2 = tuple[float, float]


class SingularTransformError(ValueError):
    pass


class Orientation(enum.Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"
    DEGENERATE = "degenerate"


class AreaCoords(NamedTuple):
    L1: float
    L2: float

    @property
    def L3(self) -> float:
        return 1.0 - self.L1 - self.L2

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.L1, self.L2, self.L3)


def signed_area(p1: Sequence[float], p2: Sequence[float], p3: Sequence[float]) -> float:
    """Half the determinant of the edge vectors; positive for counterclockwise order."""
    return 0.5 * ((p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1]))


def degeneracy_eps(points: np.ndarray | Sequence[Point2]) -> float:
    """Area threshold below which a triangle counts as degenerate.

    Scaled by the squared diagonal of the bounding box of ``points``.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    diag = float(np.hypot(*(pts.max(axis=0) - pts.min(axis=0))))
    return 1e-12 * diag * diag


@dataclass(frozen=True)
class TriangleGeom:
    vertices: tuple[Point2, Point2, Point2]
    signed_area: float
    # a_k, b_k, c_k such that L_k = (a_k x + b_k y + c_k) / (2 * signed_area)
    a: tuple[float, float, float]
    b: tuple[float, float, float]
    c: tuple[float, float, float]

    @classmethod
    def from_points(cls, p1: Sequence[float], p2: Sequence[float], p3: Sequence[float]) -> "TriangleGeom":
        (x1, y1), (x2, y2), (x3, y3) = (
            (float(p1[0]), float(p1[1])),
            (float(p2[0]), float(p2[1])),
            (float(p3[0]), float(p3[1])),
        )
        a = (y2 - y3, y3 - y1, y1 - y2)
        b = (x3 - x2, x1 - x3, x2 - x1)
        c = (x2 * y3 - x3 * y2, x3 * y1 - x1 * y3, x1 * y2 - x2 * y1)
        return cls(
            vertices=((x1, y1), (x2, y2), (x3, y3)),
            signed_area=signed_area((x1, y1), (x2, y2), (x3, y3)),
            a=a,
            b=b,
            c=c,
        )

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    def jacobian(self) -> np.ndarray:
        """d(x, y, L1+L2+L3) / d(L1, L2, L3); its determinant is twice the signed area."""
        (x1, y1), (x2, y2), (x3, y3) = self.vertices
        return np.array([[x1, x2, x3], [y1, y2, y3], [1.0, 1.0, 1.0]])

    def gradient_transform(self) -> np.ndarray:
        """3x2 matrix T with [d/dx, d/dy] = [d/dL1, d/dL2, d/dL3] @ T."""
        two_delta = 2.0 * self.signed_area
        if two_delta == 0.0:
            raise SingularTransformError("singular transform")
        return np.column_stack([self.a, self.b]) / two_delta

    def to_cartesian(self, lc: AreaCoords) -> Point2:
        L = lc.as_tuple()
        x = sum(L[k] * self.vertices[k][0] for k in range(3))
        y = sum(L[k] * self.vertices[k][1] for k in range(3))
        return (x, y)


def orientation(tri: TriangleGeom, eps: float | None = None) -> Orientation:
    """Classify by the sign of the z-component of t12 x t13."""
    if eps is None:
        eps = degeneracy_eps(tri.vertices)
    if abs(tri.signed_area) < eps or tri.signed_area == 0.0:
        return Orientation.DEGENERATE
    return Orientation.COUNTERCLOCKWISE if tri.signed_area > 0 else Orientation.CLOCKWISE


def area_coords(tri: TriangleGeom, p: Sequence[float]) -> AreaCoords:
    two_delta = 2.0 * tri.signed_area
    if abs(tri.signed_area) < degeneracy_eps(tri.vertices) or two_delta == 0.0:
        raise SingularTransformError("singular transform")
    x, y = float(p[0]), float(p[1])
    L1 = (tri.a[0] * x + tri.b[0] * y + tri.c[0]) / two_delta
    L2 = (tri.a[1] * x + tri.b[1] * y + tri.c[1]) / two_delta
    return AreaCoords(L1, L2)


def incircle_ccw(a: Sequence[float], b: Sequence[float], c: Sequence[float], p: Sequence[float]) -> float:
    """Standard in-circle determinant, translated to ``p`` for accuracy.

    Positive when ``p`` is inside the circumcircle of counterclockwise ``abc``.
    Equals the 4x4 determinant with rows (x, y, x^2 + y^2, 1) for a, b, c, p.
    """
    adx, ady = a[0] - p[0], a[1] - p[1]
    bdx, bdy = b[0] - p[0], b[1] - p[1]
    cdx, cdy = c[0] - p[0], c[1] - p[1]
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    return (
        adx * (bdy * cd - bd * cdy)
        - ady * (bdx * cd - bd * cdx)
        + ad * (bdx * cdy - bdy * cdx)
    )


def in_circumcircle(tri: TriangleGeom, p: Sequence[float]) -> float:
    """In-circle determinant with the triangle rows put in clockwise order.

    Negative means ``p`` is strictly inside the circumcircle, positive outside,
    zero co-circular.
    """
    v1, v2, v3 = tri.vertices
    if tri.signed_area > 0:
        # swapping two rows makes the order clockwise and flips the sign
        return incircle_ccw(v1, v3, v2, p)
    return incircle_ccw(v1, v2, v3, p)


def circumcircle(tri: TriangleGeom) -> tuple[Point2, float]:
    """Circumcenter and squared radius."""
    (ax, ay), (bx, by), (cx, cy) = tri.vertices
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        raise SingularTransformError("singular transform")
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    return (ux, uy), (ax - ux) ** 2 + (ay - uy) ** 2


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def triangle_areas(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Signed areas of all triangles, vectorised."""
    p = points[triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e2[:, 0] * e1[:, 1])

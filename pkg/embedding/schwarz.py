"""
Numerical Schwarz–Christoffel maps and the continuum Cardy map Cdy_D.

A polygon with three distinguished vertices a, b, c (counterclockwise) is
the image of the upper half-plane H under

    f(z) = w_j + C ∫_{p_j}^{z} Π_k (t − p_k)^{β_k} dt

with prevertices p_a = 0, p_b = 1, p_c = ∞ and β_k = −(turning angle)/π.
Powers use the branch that is continuous on the closed upper half-plane.
Integrals start at the nearest prevertex with a Gauss–Jacobi rule that
absorbs its singularity. Cdy_D is T ∘ f⁻¹ where T is the same kind of map
onto Δ, so marked points go to the corners of Δ.
"""

from functools import lru_cache

import numpy as np
from matplotlib.path import Path
from scipy.optimize import brentq, least_squares
from scipy.special import ellipk, gamma, hyp2f1, roots_jacobi, roots_legendre

from embedding.cardy import DELTA_CORNERS, BaryCoords, plane_to_bary, project_rows
from lattice.shapes import signed_area
from state.errors import QueryTooCloseToCorner, ValidationError


def _hpow(d, beta):
    """d^β with arg(d) ∈ [0, π]; d lies in the closed upper half-plane."""
    d = np.asarray(d, dtype=np.complex128)
    angle = np.angle(d)
    angle = np.where(angle < -np.pi / 2, angle + 2 * np.pi, np.maximum(angle, 0.0))
    return np.abs(d) ** beta * np.exp(1j * beta * angle)


@lru_cache(maxsize=256)
def _jacobi(nodes: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    return roots_jacobi(nodes, alpha, beta)


@lru_cache(maxsize=8)
def _legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    return roots_legendre(nodes)


def turning_exponents(vertices: np.ndarray) -> np.ndarray:
    """β_k = −turn_k/π for a counterclockwise polygon (interior angle (1+β_k)π)."""
    incoming = vertices - np.roll(vertices, 1, axis=0)
    outgoing = np.roll(vertices, -1, axis=0) - vertices
    cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
    dot = (incoming * outgoing).sum(axis=1)
    return -np.arctan2(cross, dot) / np.pi


class SchwarzChristoffelMap:
    def __init__(self, vertices, a: int, b: int, c: int, nodes: int = 32, verbose: bool = False):
        vertices = np.asarray(vertices, dtype=np.float64)
        n = vertices.shape[0]
        if n < 3 or signed_area(vertices) <= 0:
            raise ValidationError("Schwarz–Christoffel map needs a counterclockwise polygon with >= 3 vertices")
        if not 0 < (b - a) % n < (c - a) % n:
            raise ValidationError(f"marked vertices ({a}, {b}, {c}) are not distinct and counterclockwise")

        self.nodes    = nodes
        self.vertices = vertices
        self.a, self.b, self.c = a, b, c
        beta = turning_exponents(vertices)
        if np.any(np.abs(beta) >= 1):
            raise ValidationError("polygon has a zero-angle or reflex-360° corner")

        # finite prevertices in boundary order, starting just after c
        self.order    = np.array([(c + 1 + k) % n for k in range(n - 1)])
        self.w        = vertices[self.order, 0] + 1j * vertices[self.order, 1]
        self.beta     = beta[self.order]
        self.ia       = int(np.flatnonzero(self.order == a)[0])
        self.ib       = int(np.flatnonzero(self.order == b)[0])
        self.diameter = float(np.ptp(vertices, axis=0).max())

        self.prevertices = self._solve_parameters(verbose)
        self.constant = self._scale_constant()

        if verbose:
            err = max(abs(self.forward(p) - w) for p, w in zip(self.prevertices, self.w))
            print(f"[SchwarzChristoffelMap] n={n} vertex reproduction error={err:.2e}")

    # ── parameter problem ───────────────────────────────────────────────────
    def _unpack(self, u: np.ndarray) -> np.ndarray:
        k3 = self.ia
        k1 = self.ib - self.ia - 1
        u3, u1, u2 = u[:k3], u[k3:k3 + k1], u[k3 + k1:]
        left = -np.cumsum(np.exp(u3))[::-1]
        gaps = np.exp(np.concatenate([[0.0], u1]))
        middle = np.cumsum(gaps / gaps.sum())[:-1]
        right = 1.0 + np.cumsum(np.exp(u2))
        return np.concatenate([left, [0.0], middle, [1.0], right])

    def _side_integrals(self, p: np.ndarray) -> np.ndarray:
        """∫_{p_k}^{p_k+1} Π_j |t − p_j|^{β_j} dt for consecutive finite prevertices."""
        beta = self.beta
        out = np.empty(p.shape[0] - 1)
        for k in range(p.shape[0] - 1):
            lo, hi = p[k], p[k + 1]
            mid = (lo + hi) / 2
            total = 0.0
            # left half: singular at lo; right half: singular at hi
            for start, end, j, sign in ((lo, mid, k, 1.0), (hi, mid, k + 1, -1.0)):
                x, wts = _jacobi(self.nodes, 0.0, float(beta[j]))
                half = abs(end - start) / 2
                t = start + sign * half * (1 + x)
                others = np.delete(np.arange(p.shape[0]), j)
                integrand = np.prod(np.abs(t[:, None] - p[None, others]) ** beta[None, others], axis=1)
                total += half ** (1 + beta[j]) * float(np.dot(wts, integrand))
            out[k] = total
        return out

    def _solve_parameters(self, verbose: bool) -> np.ndarray:
        n_free = self.w.shape[0] - 2
        if n_free == 0:
            return self._unpack(np.zeros(0))
        lengths = np.abs(np.diff(self.w))

        def residual(u):
            sides = self._side_integrals(self._unpack(u))
            return np.log(sides[1:] / sides[0]) - np.log(lengths[1:] / lengths[0])

        solution = least_squares(residual, np.zeros(n_free), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
        worst = float(np.abs(solution.fun).max())
        if worst > 1e-9:
            print(f"[SchwarzChristoffelMap] Warning: parameter problem residual {worst:.2e}")
        elif verbose:
            print(f"[SchwarzChristoffelMap] parameter problem solved, residual {worst:.2e}")
        return self._unpack(solution.x)

    def _scale_constant(self) -> complex:
        p = self.prevertices
        first = self._side_integrals(p)[0]
        phase = np.exp(1j * np.pi * self.beta[1:].sum())
        return complex((self.w[1] - self.w[0]) / (first * phase))

    # ── evaluation ──────────────────────────────────────────────────────────
    def integrand(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.complex128)
        return np.prod(_hpow(t[..., None] - self.prevertices, self.beta), axis=-1)

    def derivative(self, z: complex) -> complex:
        return complex(self.constant * self.integrand(np.array([z]))[0])

    def forward(self, z: complex) -> complex:
        """f(z) for z in the closed upper half-plane."""
        z = complex(z)
        if z.imag < 0:
            raise ValueError(f"point {z} is below the real axis")
        p = self.prevertices
        j = int(np.argmin(np.abs(z - p)))
        d = z - p[j]
        if d == 0:
            return complex(self.w[j])

        # [p_j, p_j + d/2] with the singular factor (t − p_j)^{β_j} as Jacobi weight
        x, wts = _jacobi(self.nodes, 0.0, float(self.beta[j]))
        quarter = d / 4
        t = p[j] + quarter * (1 + x)
        others = np.delete(np.arange(p.shape[0]), j)
        rest = np.prod(_hpow(t[:, None] - p[None, others], self.beta[None, others]), axis=1)
        near = quarter * _hpow(quarter, self.beta[j]) * np.dot(wts, rest)

        # [p_j + d/2, z] is regular
        xl, wl = _legendre(self.nodes)
        t2 = p[j] + d / 2 + quarter * (1 + xl)
        far = quarter * np.dot(wl, self.integrand(t2))
        return complex(self.w[j] + self.constant * (near + far))

    def inverse(self, w: complex, tol: float = 1e-12, steps: int = 16, max_newton: int = 40) -> complex:
        """
        f⁻¹(w) by Newton continuation along the straight segment from f(z0)
        to w; valid for convex polygons, where the segment stays inside.
        """
        w = complex(w)
        z = 0.5 + 0.5j
        w0 = self.forward(z)
        scale = tol * self.diameter
        for s in np.linspace(0, 1, steps + 1)[1:]:
            target = w0 + s * (w - w0)
            for _ in range(max_newton):
                miss = self.forward(z) - target
                if abs(miss) < scale:
                    break
                dz = miss / self.derivative(z)
                candidate = z - dz
                halvings = 0
                while candidate.imag <= 0 and halvings < 60:
                    dz /= 2
                    candidate = z - dz
                    halvings += 1
                z = candidate
        if abs(self.forward(z) - w) > 1e3 * scale:
            raise RuntimeError(f"Schwarz–Christoffel inversion did not converge at w={w}")
        return z

    def prevertex_of(self, vertex: int) -> float:
        """Prevertex of polygon vertex `vertex` (inf for c)."""
        if vertex == self.c:
            return np.inf
        return float(self.prevertices[int(np.flatnonzero(self.order == vertex)[0])])


def _with_marks(vertices: np.ndarray, marks: np.ndarray, tol: float) -> tuple[np.ndarray, list[int]]:
    """Insert marked boundary points as straight (β = 0) vertices; return the vertex list and mark indices."""
    points = [tuple(v) for v in vertices]
    for mark in marks:
        if min(np.hypot(*(np.array(p) - mark)) for p in points) <= tol:
            continue
        for k in range(len(points)):
            p, q = np.array(points[k]), np.array(points[(k + 1) % len(points)])
            edge = q - p
            t = float(np.dot(mark - p, edge) / np.dot(edge, edge))
            if 0 < t < 1 and np.hypot(*(p + t * edge - mark)) <= tol:
                points.insert(k + 1, tuple(mark))
                break
        else:
            raise ValidationError(f"marked point {tuple(mark)} is not on the polygon boundary")
    out = np.array(points)
    indices = [int(np.argmin(np.hypot(*(out - m).T))) for m in marks]
    return out, indices


def riemann_to_delta(
    polygon,
    marks,
    queries,
    nodes: int = 32,
    corner_exclusion: float = 1e-3,
    newton_tol: float = 1e-12,
    verbose: bool = False,
) -> list[BaryCoords]:
    """
    Cdy_D at each query point: the conformal map of the polygon onto Δ
    sending marks a, b, c to (1,0,0), (0,1,0), (0,0,1). A query exactly at
    a polygon vertex is mapped through its prevertex; a query closer than
    `corner_exclusion` to a vertex (but not on it) is rejected.
    """
    vertices = np.asarray(polygon, dtype=np.float64)
    if signed_area(vertices) < 0:
        vertices = vertices[::-1].copy()
    marks = np.asarray(marks, dtype=np.float64).reshape(3, 2)
    diameter = float(np.ptp(vertices, axis=0).max())
    snap = 1e-12 * diameter
    vertices, (ia, ib, ic) = _with_marks(vertices, marks, snap)

    domain_map = SchwarzChristoffelMap(vertices, ia, ib, ic, nodes=nodes, verbose=verbose)
    delta_map = SchwarzChristoffelMap(DELTA_CORNERS, 0, 1, 2, nodes=nodes)
    outline = Path(np.vstack([vertices, vertices[:1]]), closed=True)

    results = []
    for q in np.asarray(queries, dtype=np.float64).reshape(-1, 2):
        gaps = np.hypot(*(vertices - q).T)
        j = int(np.argmin(gaps))
        if gaps[j] <= snap:
            z = domain_map.prevertex_of(j)
            if np.isinf(z):
                results.append(BaryCoords(0.0, 0.0, 1.0))
                continue
            z = complex(z, 0.0)
        elif gaps[j] < corner_exclusion:
            raise QueryTooCloseToCorner(
                f"query {tuple(q)} is {gaps[j]:.2e} from polygon vertex {tuple(vertices[j])}; "
                f"embedding.corner_exclusion is {corner_exclusion}"
            )
        elif not outline.contains_point(q, radius=snap) and not outline.contains_point(q, radius=-snap):
            raise ValidationError(f"query {tuple(q)} lies outside the polygon")
        else:
            z = domain_map.inverse(complex(q[0], q[1]), tol=newton_tol)
        image = delta_map.forward(z)
        bary = project_rows(np.clip(plane_to_bary([image.real, image.imag]), 0.0, None))[0]
        results.append(BaryCoords(*(float(x) for x in bary)))
    return results


def cardy_rectangle_crossing(aspect: float) -> float:
    """
    Cardy's formula for the left-right crossing of a rectangle of
    width/height `aspect`: with 2K(m)/K(1−m) = aspect, k = √m and
    η = ((1−k)/(1+k))², P = 3Γ(2/3)/Γ(1/3)² · η^{1/3} · ₂F₁(1/3, 2/3; 4/3; η).
    """
    if aspect <= 0:
        raise ValueError(f"aspect ratio must be positive, got {aspect}")
    m = brentq(lambda m: 2 * ellipk(m) / ellipk(1 - m) - aspect, 1e-300, 1 - 1e-16, xtol=1e-300, rtol=1e-15)
    k = np.sqrt(m)
    eta = ((1 - k) / (1 + k)) ** 2
    return float(3 * gamma(2 / 3) / gamma(1 / 3) ** 2 * eta ** (1 / 3) * hyp2f1(1 / 3, 2 / 3, 4 / 3, eta))

"""Compact convex bodies with metric projections and Hausdorff distances.

Bodies are balls, polytopes (vertex hulls), or ball-polytope intersections.
All projections come with certificates: polytope projections certify the
variational inequality over the vertex set, alternating projections onto
intersections report membership residuals for both factors. Hausdorff
distances are exact when the source is a polytope and bracketed otherwise.

Everything is vectorized over batches of query points; the public
single-point entry points are thin wrappers around the batch kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampling import sphere_points

PROJECTION_TOL = 1e-12
PROJECTION_BUDGET = 100_000
DYKSTRA_TOL = 1e-10
DYKSTRA_BUDGET = 100_000
FEASIBILITY_TOL = 1e-8


class GeometryError(ValueError):
    pass


class DimensionMismatch(GeometryError):
    pass


class SlaterViolation(GeometryError):
    pass


class EmptyIntersection(GeometryError):
    pass


class ProjectionDidNotConverge(RuntimeError):
    """Raised instead of returning an uncertified point."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


# ---------------------------------------------------------------------------
# bodies


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        if c.ndim != 1:
            raise GeometryError("ball center must be a vector")
        if not np.isfinite(c).all() or not np.isfinite(self.radius):
            raise GeometryError("ball data must be finite")
        if self.radius < 0.0:
            raise GeometryError("ball radius must be nonnegative")

    @property
    def dim(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class Polytope:
    vertices: np.ndarray  # (n, d)

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "vertices", v)
        if v.shape[0] == 0:
            raise GeometryError("polytope needs at least one vertex")
        if not np.isfinite(v).all():
            raise GeometryError("polytope vertices must be finite")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


@dataclass(frozen=True)
class BallCapPolytope:
    ball: Ball
    polytope: Polytope

    def __post_init__(self):
        if self.ball.dim != self.polytope.dim:
            raise DimensionMismatch("ball and polytope dimensions differ")
        # The intersection is empty exactly when the hull misses the closed
        # ball; one certified projection of the center decides that and
        # spares the alternating iteration its full budget on empty pairs.
        gap = float(_distance_rows(self.ball.center[None, :], self.polytope)[0])
        if gap > self.ball.radius + FEASIBILITY_TOL:
            raise EmptyIntersection(
                f"ball-polytope intersection infeasible "
                f"(center-to-hull gap {gap - self.ball.radius:.3e})")
        # Feasibility witness: the ball center projected onto the pair must
        # land within FEASIBILITY_TOL of both factors.
        witness, res_ball, res_poly, _ = _dykstra_ball_polytope(
            self.ball.center[None, :], self.ball, self.polytope,
            tol=DYKSTRA_TOL, max_iter=20_000)
        res = max(float(res_ball[0]), float(res_poly[0]))
        if res > FEASIBILITY_TOL:
            raise EmptyIntersection(
                f"ball-polytope intersection infeasible (witness residual {res:.3e})")
        object.__setattr__(self, "_witness", witness[0])

    @property
    def dim(self) -> int:
        return self.ball.dim


ConvexBody = Ball | Polytope | BallCapPolytope


@dataclass(frozen=True)
class HausdorffBracket:
    lower: float
    upper: float
    resolution: int

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper + 1e-15):
            raise GeometryError("bracket must satisfy 0 <= lower <= upper")


@dataclass(frozen=True)
class BoundCheck:
    """Outcome of a two-sided inequality check."""
    lhs: float
    rhs: float
    passed: bool


# ---------------------------------------------------------------------------
# batch kernels


def _rows(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[None, :] if x.ndim == 1 else x


def project_rows_to_simplex(y: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean projection onto the probability simplex."""
    y = np.atleast_2d(y)
    n = y.shape[1]
    u = -np.sort(-y, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    ks = np.arange(1, n + 1, dtype=float)
    k = np.sum(u * ks > css, axis=1)
    tau = css[np.arange(y.shape[0]), k - 1] / k
    return np.maximum(y - tau[:, None], 0.0)


def project_balls(x: np.ndarray, centers: np.ndarray, radii) -> np.ndarray:
    """Row-wise projection onto balls B[centers[i], radii[i]]."""
    x = _rows(x)
    centers = _rows(centers)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (x.shape[0],))
    delta = x - centers
    dist = np.linalg.norm(delta, axis=1)
    scale = np.ones_like(dist)
    outside = dist > radii
    scale[outside] = radii[outside] / dist[outside]
    return centers + delta * scale[:, None]


def _wolfe_min_norm(vertices: np.ndarray, x: np.ndarray, gap_tol: float,
                    max_major: int = 1000):
    """Wolfe's minimum-norm-point method for one hull, exact up to gap_tol.

    Finite active-face refinement used when the spectral-step iteration
    stalls on a degenerate Gram matrix. Returns (lam, gap) with
    gap = max_v <x - p, v - p>.
    """
    w = vertices - x
    n = w.shape[0]
    sq = np.einsum("nd,nd->n", w, w)
    j = int(np.argmin(sq))
    corral = [j]
    lam_c = np.array([1.0])
    p = w[j].copy()
    for _ in range(max_major):
        inner = w @ p
        gap = float(p @ p - inner.min())
        if gap <= gap_tol:
            break
        j = int(np.argmin(inner))
        if j not in corral:
            corral.append(j)
            lam_c = np.append(lam_c, 0.0)
        for _ in range(2 * n + 10):
            ws = w[corral]
            k = len(corral)
            kkt = np.zeros((k + 1, k + 1))
            kkt[:k, :k] = ws @ ws.T
            kkt[:k, k] = 1.0
            kkt[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            try:
                sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            except np.linalg.LinAlgError:  # pragma: no cover
                sol = np.linalg.pinv(kkt) @ rhs
            alpha = sol[:k]
            if np.all(alpha > 1e-14):
                lam_c = alpha
                p = ws.T @ alpha
                break
            diff = lam_c - alpha
            mask = diff > 1e-14
            theta = np.min(lam_c[mask] / diff[mask]) if mask.any() else 0.0
            theta = min(max(theta, 0.0), 1.0)
            lam_c = (1.0 - theta) * lam_c + theta * alpha
            lam_c[lam_c < 1e-14] = 0.0
            keep = lam_c > 0.0
            if not keep.any():
                keep[int(np.argmax(lam_c))] = True
            corral = [c for c, k_ in zip(corral, keep) if k_]
            lam_c = lam_c[keep]
            s = lam_c.sum()
            lam_c = lam_c / s if s > 0 else np.full(len(corral), 1.0 / len(corral))
            p = w[corral].T @ lam_c
    lam = np.zeros(n)
    lam[corral] = lam_c
    inner = w @ p
    gap = float(p @ p - inner.min())
    return lam, gap


class HullProjector:
    """Batched projection onto convex hulls, one vertex set per row.

    Solves the simplex-constrained least-squares problems
    min_lam ||V[i]^T lam - x[i]|| with Barzilai-Borwein projected-gradient
    steps; keeps the last barycentric iterate for warm starts across calls
    (the alternating-projection loops call it with slowly moving inputs).
    The warm-start state makes instances single-threaded; the module-level
    entry points construct a fresh projector per call and stay pure.
    """

    _bb_cap = 500  # spectral-step phase before the exact fallback kicks in

    def __init__(self, vertices: np.ndarray):
        v = np.asarray(vertices, dtype=float)
        if v.ndim == 2:
            v = v[None, :, :]
        self.v = v
        self.m, self.n, self.d = v.shape
        self.gram = np.einsum("mid,mjd->mij", v, v)
        self.lam = np.full((self.m, self.n), 1.0 / self.n)
        trace = np.einsum("mii->m", self.gram)
        self._step0 = 1.0 / np.maximum(trace, 1e-30)

    def project(self, x: np.ndarray, tol: float = PROJECTION_TOL,
                max_iter: int = PROJECTION_BUDGET, polish: bool = False):
        """Returns (points, gaps). gaps[i] = max_v <x-p, v-p> at return.

        Raises ProjectionDidNotConverge when the certificate
        gap <= tol * (1 + ||x||) cannot be met within the budget.

        With `polish`, the barycentric weights are refined by one exact
        affine least-squares solve on the detected support, which removes
        the sqrt-of-gap distance error of the certificate-stopped iteration
        (needed when downstream residuals must resolve below ~1e-9).
        """
        x = _rows(x)
        if x.shape != (self.m, self.d):
            raise DimensionMismatch(
                f"expected query shape {(self.m, self.d)}, got {x.shape}")
        if self.n == 1:
            p = self.v[:, 0, :]
            gaps = np.zeros(self.m)
            return p.copy(), gaps
        scale = tol * (1.0 + np.linalg.norm(x, axis=1))
        lam_all = self.lam
        gaps_all = self._gaps_at(np.arange(self.m), x, lam_all)
        # Rows leave the active set as soon as their certificate holds, so the
        # cost of stragglers does not multiply with the batch size.
        active = np.flatnonzero(gaps_all > scale)
        if active.size:
            v = self.v[active]
            gram = self.gram[active]
            xa = x[active]
            b = np.einsum("mnd,md->mn", v, xa)
            lam = lam_all[active]
            grad = np.einsum("mij,mj->mi", gram, lam) - b
            step0 = self._step0[active]
            step = step0.copy()
            sc = scale[active]
            for _ in range(min(max_iter, self._bb_cap)):
                lam_new = project_rows_to_simplex(lam - step[:, None] * grad)
                grad_new = np.einsum("mij,mj->mi", gram, lam_new) - b
                s = lam_new - lam
                y = grad_new - grad
                sy = np.einsum("mi,mi->m", s, y)
                ss = np.einsum("mi,mi->m", s, s)
                step = np.where(sy > 1e-300, ss / np.maximum(sy, 1e-300), step0 * 1e3)
                np.clip(step, 1e-8 * step0, 1e8 * step0, out=step)
                lam, grad = lam_new, grad_new
                p = np.einsum("mnd,mn->md", v, lam)
                gaps = np.einsum("mnd,md->mn", v - p[:, None, :], xa - p).max(axis=1)
                done = gaps <= sc
                if done.any():
                    sel = np.flatnonzero(done)
                    rows = active[sel]
                    lam_all[rows] = lam[sel]
                    gaps_all[rows] = gaps[sel]
                    keep = np.flatnonzero(~done)
                    if keep.size == 0:
                        active = active[:0]
                        break
                    active = active[keep]
                    v, gram, xa, b = v[keep], gram[keep], xa[keep], b[keep]
                    lam, grad = lam[keep], grad[keep]
                    step, step0, sc = step[keep], step0[keep], sc[keep]
            if active.size:
                lam_all[active] = lam
                # Spectral steps can limit-cycle when the Gram matrix is rank
                # deficient; finish stragglers with the finite active-face
                # method, which meets the certificate exactly.
                for row_pos, row in enumerate(active):
                    lam_w, gap_w = _wolfe_min_norm(
                        self.v[row], x[row], gap_tol=scale[row])
                    lam_all[row] = lam_w
                    gaps_all[row] = gap_w
                self.lam = lam_all
                if not np.all(gaps_all <= scale):
                    worst = float(np.max(gaps_all - scale))
                    raise ProjectionDidNotConverge(
                        "hull projection budget exhausted without certificate",
                        worst)
        if polish:
            lam_all = self._polish(x, lam_all)
            gaps_all = self._gaps_at(np.arange(self.m), x, lam_all)
        self.lam = lam_all
        return np.einsum("mnd,mn->md", self.v, lam_all), gaps_all

    def _polish(self, x: np.ndarray, lam: np.ndarray) -> np.ndarray:
        out = lam.copy()
        for i in range(self.m):
            li = lam[i]
            support = np.flatnonzero(li > 1e-10 * max(1.0, float(li.max())))
            if support.size == 0:
                continue
            alpha = None
            # Affine least squares on the support; indices whose weight
            # turns negative are dropped and the face re-solved.
            for _ in range(self.n):
                ws = self.v[i, support, :]
                k = support.size
                kkt = np.zeros((k + 1, k + 1))
                kkt[:k, :k] = ws @ ws.T
                kkt[:k, k] = 1.0
                kkt[k, :k] = 1.0
                rhs = np.zeros(k + 1)
                rhs[:k] = ws @ x[i]
                rhs[k] = 1.0
                try:
                    alpha = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
                except np.linalg.LinAlgError:  # pragma: no cover
                    alpha = None
                    break
                negative = alpha < -1e-12
                if not negative.any():
                    break
                keep = ~negative
                if not keep.any():
                    alpha = None
                    break
                support = support[keep]
            if alpha is None:
                continue
            alpha = np.clip(alpha, 0.0, None)
            total = alpha.sum()
            if total <= 0.0:
                continue
            alpha /= total
            old = self.v[i].T @ li - x[i]
            new = self.v[i, support, :].T @ alpha - x[i]
            if new @ new <= old @ old + 1e-300:
                cand = np.zeros(self.n)
                cand[support] = alpha
                out[i] = cand
        return out

    def _gaps_at(self, rows, x, lam):
        v = self.v[rows] if rows.size != self.m else self.v
        p = np.einsum("mnd,mn->md", v, lam)
        inner = np.einsum("mnd,md->mn", v - p[:, None, :], x - p)
        return inner.max(axis=1)



def _polytope_stack(poly: Polytope, m: int) -> np.ndarray:
    return np.broadcast_to(poly.vertices, (m,) + poly.vertices.shape)


def _distance_rows(x: np.ndarray, body: ConvexBody,
                   tol: float = PROJECTION_TOL) -> np.ndarray:
    """Row-wise Euclidean distance to a body."""
    x = _rows(x)
    if isinstance(body, Ball):
        d = np.linalg.norm(x - body.center, axis=1) - body.radius
        return np.maximum(d, 0.0)
    if isinstance(body, Polytope):
        proj = HullProjector(_polytope_stack(body, x.shape[0]))
        p, _ = proj.project(x, tol=tol, polish=True)
        return np.linalg.norm(x - p, axis=1)
    p, _, _, _ = _dykstra_ball_polytope(x, body.ball, body.polytope)
    return np.linalg.norm(x - p, axis=1)


def _project_rows(x: np.ndarray, body: ConvexBody) -> np.ndarray:
    x = _rows(x)
    if isinstance(body, Ball):
        return project_balls(x, body.center, body.radius)
    if isinstance(body, Polytope):
        proj = HullProjector(_polytope_stack(body, x.shape[0]))
        p, _ = proj.project(x, polish=True)
        return p
    p, _, _, _ = _dykstra_ball_polytope(x, body.ball, body.polytope)
    return p


def _dykstra_ball_polytope(x: np.ndarray, ball: Ball, poly: Polytope,
                           tol: float = DYKSTRA_TOL,
                           max_iter: int = DYKSTRA_BUDGET):
    """Dykstra iteration specialized to one ball and one polytope."""
    x = _rows(x)
    hull = HullProjector(_polytope_stack(poly, x.shape[0]))

    def proj_a(z):
        return project_balls(z, ball.center, ball.radius)

    def proj_b(z):
        p, _ = hull.project(z, tol=max(tol * 1e-2, 1e-14))
        return p

    return dykstra(x, proj_a, proj_b, tol=tol, max_iter=max_iter)


def dykstra(x: np.ndarray, proj_a, proj_b, tol: float = DYKSTRA_TOL,
            max_iter: int = DYKSTRA_BUDGET):
    """Batched Dykstra alternating projections onto an intersection A cap B.

    Returns (points, residual_a, residual_b, converged). The residuals
    measure the final iterate's distance to each factor via one extra
    projection; `converged` records whether the per-cycle iterate change
    fell below tol. Callers decide whether the residuals certify
    feasibility; the iterate change criterion alone never does.
    """
    x = _rows(x).copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    converged = False
    for _ in range(max_iter):
        y = proj_a(x + p)
        p = x + p - y
        x_new = proj_b(y + q)
        q = y + q - x_new
        delta = np.max(np.linalg.norm(x_new - x, axis=1))
        x = x_new
        if delta <= tol:
            converged = True
            break
    res_a = np.linalg.norm(x - proj_a(x), axis=1)
    res_b = np.linalg.norm(x - proj_b(x), axis=1)
    return x, res_a, res_b, converged


# ---------------------------------------------------------------------------
# projections (single-point API)


def project_ball(x, c, r: float) -> np.ndarray:
    """Nearest point of B[c, r] to x."""
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    if x.shape != c.shape:
        raise DimensionMismatch("point and center dimensions differ")
    if r < 0.0:
        raise GeometryError("radius must be nonnegative")
    return project_balls(x[None, :], c[None, :], r)[0]


def project_polytope(x, poly: Polytope, tol: float = PROJECTION_TOL,
                     max_iter: int = PROJECTION_BUDGET) -> np.ndarray:
    """Nearest point of the vertex hull to x, certified over the vertices."""
    x = np.asarray(x, dtype=float)
    if x.size != poly.dim:
        raise DimensionMismatch("point and polytope dimensions differ")
    if tol <= 0.0:
        raise GeometryError("tol must be positive")
    proj = HullProjector(poly.vertices[None, :, :])
    p, _ = proj.project(x[None, :], tol=tol, max_iter=max_iter)
    return p[0]


@dataclass(frozen=True)
class IntersectionProjection:
    point: np.ndarray
    ball_residual: float
    polytope_residual: float


def project_intersection(x, body: BallCapPolytope, tol: float = DYKSTRA_TOL,
                         max_iter: int = DYKSTRA_BUDGET) -> IntersectionProjection:
    """Dykstra projection onto ball cap polytope with membership residuals."""
    x = np.asarray(x, dtype=float)
    if x.size != body.dim:
        raise DimensionMismatch("point and body dimensions differ")
    p, res_a, res_b, converged = _dykstra_ball_polytope(
        x[None, :], body.ball, body.polytope, tol=tol, max_iter=max_iter)
    res = max(float(res_a[0]), float(res_b[0]))
    if not converged or res > max(100.0 * tol, FEASIBILITY_TOL):
        raise ProjectionDidNotConverge(
            "alternating projections left uncertified membership", res)
    return IntersectionProjection(p[0], float(res_a[0]), float(res_b[0]))


def distance_to(x, body: ConvexBody) -> float:
    """Euclidean distance of x to the body."""
    return float(_distance_rows(np.asarray(x, dtype=float)[None, :], body)[0])


# ---------------------------------------------------------------------------
# batched polytope utilities


def pad_vertex_stack(polys) -> np.ndarray:
    """(m, n_max, d) vertex stack; padding repeats the last vertex, which
    leaves every hull unchanged."""
    n_max = max(p.vertices.shape[0] for p in polys)
    d = polys[0].dim
    out = np.empty((len(polys), n_max, d))
    for i, poly in enumerate(polys):
        k = poly.vertices.shape[0]
        out[i, :k] = poly.vertices
        out[i, k:] = poly.vertices[-1]
    return out


def project_points_onto_polytopes(points: np.ndarray, polys,
                                  tol: float = PROJECTION_TOL) -> np.ndarray:
    """One certified projection per (point, polytope) pair, batched."""
    stacks = pad_vertex_stack(polys)
    proj = HullProjector(stacks)
    pts, _ = proj.project(_rows(points), tol=tol, polish=True)
    return pts


def polytope_pair_hausdorff(list_a, list_b,
                            tol: float = PROJECTION_TOL) -> np.ndarray:
    """Exact Hausdorff distances for paired polytopes, batched.

    Each directed value is the max over the source's vertices of the
    distance to the target hull.
    """
    if len(list_a) != len(list_b):
        raise GeometryError("need one target per source")
    m = len(list_a)
    stack_a = pad_vertex_stack(list_a)
    stack_b = pad_vertex_stack(list_b)
    na, nb = stack_a.shape[1], stack_b.shape[1]
    d = stack_a.shape[2]

    def directed(src, tgt, n_src):
        queries = src.reshape(m * n_src, d)
        targets = np.repeat(tgt, n_src, axis=0)
        proj = HullProjector(targets)
        pts, _ = proj.project(queries, tol=tol, polish=True)
        dists = np.linalg.norm(queries - pts, axis=1)
        return dists.reshape(m, n_src).max(axis=1)

    return np.maximum(directed(stack_a, stack_b, na),
                      directed(stack_b, stack_a, nb))


# ---------------------------------------------------------------------------
# diameters


def diameter_upper(body: ConvexBody) -> float:
    """Diameter; exact for balls and polytopes, an upper bound for caps."""
    if isinstance(body, Ball):
        return 2.0 * body.radius
    if isinstance(body, Polytope):
        v = body.vertices
        diff = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1)).max())
    return min(diameter_upper(body.ball), diameter_upper(body.polytope))


def _cross_sup(a: ConvexBody, b: ConvexBody) -> float:
    """sup over a x b of the pair distance (upper bound for caps)."""
    if isinstance(a, BallCapPolytope):
        return min(_cross_sup(a.ball, b), _cross_sup(a.polytope, b))
    if isinstance(b, BallCapPolytope):
        return _cross_sup(b, a)
    if isinstance(a, Ball) and isinstance(b, Ball):
        return float(np.linalg.norm(a.center - b.center)) + a.radius + b.radius
    if isinstance(a, Ball):
        return float(np.linalg.norm(b.vertices - a.center, axis=1).max()) + a.radius
    if isinstance(b, Ball):
        return _cross_sup(b, a)
    diff = a.vertices[:, None, :] - b.vertices[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def union_diameter_upper(a: ConvexBody, b: ConvexBody) -> float:
    return max(diameter_upper(a), diameter_upper(b), _cross_sup(a, b))


# ---------------------------------------------------------------------------
# Hausdorff distances


def _source_sample(body: ConvexBody, resolution: int):
    """(sample points inside the body, Lipschitz slack for the sup)."""
    if isinstance(body, Ball):
        dirs = sphere_points(resolution, body.dim)
        pts = body.center + body.radius * dirs
        return pts, 2.0 * np.pi * body.radius / resolution
    if isinstance(body, BallCapPolytope):
        dirs = sphere_points(resolution, body.dim)
        cloud = np.vstack([body.ball.center + body.ball.radius * dirs,
                           body.polytope.vertices])
        pts, _, _, _ = _dykstra_ball_polytope(cloud, body.ball, body.polytope)
        return pts, 2.0 * np.pi * body.ball.radius / resolution
    raise GeometryError("polytope sources are handled exactly")  # pragma: no cover


def directed_hausdorff(source: ConvexBody, target: ConvexBody,
                       resolution: int = 256) -> HausdorffBracket:
    """Bracket on sup_{a in source} dist(a, target).

    Exact when the source is a polytope (the sup of the convex distance
    function over a hull is attained at a vertex) and for ball-to-ball;
    otherwise a deterministic boundary sample plus Lipschitz slack.
    """
    if _body_dim(source) != _body_dim(target):
        raise DimensionMismatch("bodies must share dimension")
    if isinstance(source, Polytope):
        val = float(_distance_rows(source.vertices, target).max())
        return HausdorffBracket(val, val, resolution)
    if isinstance(source, Ball) and isinstance(target, Ball):
        delta = float(np.linalg.norm(source.center - target.center))
        val = max(0.0, delta + source.radius - target.radius)
        return HausdorffBracket(val, val, resolution)
    pts, slack = _source_sample(source, resolution)
    lower = float(_distance_rows(pts, target).max())
    return HausdorffBracket(lower, lower + slack, resolution)


def hausdorff_distance(a: ConvexBody, b: ConvexBody,
                       resolution: int = 256) -> HausdorffBracket:
    """Symmetric Hausdorff bracket: max of the two directed brackets."""
    ab = directed_hausdorff(a, b, resolution)
    ba = directed_hausdorff(b, a, resolution)
    return HausdorffBracket(max(ab.lower, ba.lower),
                            max(ab.upper, ba.upper), resolution)


def _body_dim(body: ConvexBody) -> int:
    return body.dim


# ---------------------------------------------------------------------------
# lemma checks


def _contained_in_origin_ball(body: ConvexBody, radius: float,
                              tol: float = 1e-9) -> bool:
    if isinstance(body, Ball):
        return float(np.linalg.norm(body.center)) + body.radius <= radius + tol
    if isinstance(body, Polytope):
        return float(np.linalg.norm(body.vertices, axis=1).max()) <= radius + tol
    return (_contained_in_origin_ball(body.ball, radius, tol)
            or _contained_in_origin_ball(body.polytope, radius, tol))


def projection_difference_check(x, c_body: ConvexBody, d_body: ConvexBody,
                                big_radius: float,
                                resolution: int = 512) -> BoundCheck:
    """||p_C(x) - p_D(x)|| against sqrt((4||x|| + 2R) d_Hd(C, D))."""
    x = np.asarray(x, dtype=float)
    for body in (c_body, d_body):
        if not _contained_in_origin_ball(body, big_radius):
            raise GeometryError("bodies must lie in the ball of radius R at 0")
    pc = _project_rows(x[None, :], c_body)[0]
    pd = _project_rows(x[None, :], d_body)[0]
    lhs = float(np.linalg.norm(pc - pd))
    hd = hausdorff_distance(c_body, d_body, resolution)
    rhs = float(np.sqrt((4.0 * np.linalg.norm(x) + 2.0 * big_radius) * hd.upper))
    return BoundCheck(lhs, rhs, lhs <= rhs + 1e-8)


def _verify_inner_ball(x0: np.ndarray, rho: float, body: ConvexBody,
                       directions: int = 128, tol: float = 1e-8) -> bool:
    """Numerically check B[x0, rho] subset of body (sampled for polytopes)."""
    if isinstance(body, Ball):
        return float(np.linalg.norm(x0 - body.center)) + rho <= body.radius + tol
    dirs = sphere_points(directions, x0.size)
    shell = x0 + rho * dirs
    return bool(np.all(_distance_rows(shell, body) <= tol))


def slater_intersection_check(x, a_body: ConvexBody, b_body: ConvexBody,
                              x0, rho: float, slack: float = 1e-8) -> BoundCheck:
    """dist(x, A cap B) against (1 + diam(A u B)/rho)(dist(x,A) + dist(x,B)).

    Requires a verified interior witness: x0 in A cap B with B[x0, rho]
    inside B. Verification failures raise SlaterViolation.
    """
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    feas_tol = 1e-8
    if distance_to(x0, a_body) > feas_tol or distance_to(x0, b_body) > feas_tol:
        raise SlaterViolation("witness point is not in the intersection")
    if rho <= 0.0 or not _verify_inner_ball(x0, rho, b_body, tol=feas_tol):
        raise SlaterViolation("B[x0, rho] is not contained in the second body")

    if isinstance(a_body, Ball) and isinstance(b_body, Polytope):
        point = project_intersection(x, BallCapPolytope(a_body, b_body)).point
    elif isinstance(b_body, Ball) and isinstance(a_body, Polytope):
        point = project_intersection(x, BallCapPolytope(b_body, a_body)).point
    else:
        point, _, _, _ = dykstra(
            x[None, :],
            lambda z: _project_rows(z, a_body),
            lambda z: _project_rows(z, b_body))
        point = point[0]
    lhs = float(np.linalg.norm(x - point))
    d = union_diameter_upper(a_body, b_body)
    rhs = (1.0 + d / rho) * (distance_to(x, a_body) + distance_to(x, b_body))
    return BoundCheck(lhs, rhs, lhs <= rhs + slack)


@dataclass(frozen=True)
class IntersectionContinuityResult:
    values: list
    hypothesis_ok: bool
    empty_indices: list


def intersection_continuity_probe(c_seq, b_seq, r: float, c, b: Polytope,
                                  resolution: int = 2048,
                                  dykstra_tol: float = 1e-8,
                                  max_iter: int = 20_000) -> IntersectionContinuityResult:
    """Sampled Hausdorff gaps d(B[c_n, r] cap B_n, B[c, r] cap B) per n.

    A fixed deterministic cloud (limit-ball boundary plus limit vertices) is
    projected onto each intersection; the reported value per n is the larger
    of the two directed sampled sups plus the boundary-sampling slack.
    hypothesis_ok records whether the open ball B(c, r) genuinely meets B;
    members of the sequence with empty intersection are flagged, their value
    set to NaN, and the probe continues. Families violating the open-ball
    hypothesis (tangency) make the alternating projections sublinear, so
    callers running such demonstrations should shrink `max_iter`.
    """
    c = np.asarray(c, dtype=float)
    limit_ball = Ball(c, r)
    strict = distance_to(c, b) < r - 1e-12
    cloud = np.vstack([c + r * sphere_points(resolution, c.size), b.vertices])
    slack = 2.0 * np.pi * r / resolution

    try:
        limit = BallCapPolytope(limit_ball, b)
    except EmptyIntersection:
        return IntersectionContinuityResult([float("nan")] * len(c_seq), False,
                                            list(range(len(c_seq))))
    limit_sample, _, _, _ = _dykstra_ball_polytope(
        cloud, limit.ball, limit.polytope, tol=dykstra_tol, max_iter=max_iter)

    values = []
    empty = []
    for idx, (cn, bn) in enumerate(zip(c_seq, b_seq)):
        cn = np.asarray(cn, dtype=float)
        try:
            member = BallCapPolytope(Ball(cn, r), bn)
        except EmptyIntersection:
            empty.append(idx)
            values.append(float("nan"))
            continue
        sample_n, _, _, _ = _dykstra_ball_polytope(
            cloud, member.ball, member.polytope, tol=dykstra_tol,
            max_iter=max_iter)
        to_limit = _dykstra_distance(sample_n, limit, dykstra_tol, max_iter)
        to_member = _dykstra_distance(limit_sample, member, dykstra_tol,
                                      max_iter)
        values.append(float(max(to_limit.max(), to_member.max())) + slack)
    return IntersectionContinuityResult(values, strict, empty)


def _dykstra_distance(points: np.ndarray, body: BallCapPolytope, tol: float,
                      max_iter: int = DYKSTRA_BUDGET) -> np.ndarray:
    proj, _, _, _ = _dykstra_ball_polytope(points, body.ball, body.polytope,
                                           tol=tol, max_iter=max_iter)
    return np.linalg.norm(points - proj, axis=1)

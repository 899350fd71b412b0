"""Property batteries behind the `verify` command.

Each battery runs a family of seeded checks and reports one line's worth of
data per check: a tag, the trial count, and the worst margin observed
(negative margins are failures). Trials derive their generators from
(seed, trial index) so batteries are reproducible and independent of
execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from . import monotone as mono
from . import rhs as rhsmod
from . import selection as sel
from . import semigroup as sg
from . import solver as sv
from .paths import TimePath, constant_path, path_distance, path_l2_norm, zero_path

SUITES = ("convex", "selection", "semigroup", "monotone", "solver")


@dataclass(frozen=True)
class CheckResult:
    name: str
    trials: int
    worst_margin: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name} trials={self.trials} "
                f"worst_margin={self.worst_margin:.3e}")


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _random_polytope(rng, dim: int, radius: float, max_vertices: int = 8):
    count = int(rng.integers(dim + 1, max_vertices + 1))
    center = rng.normal(size=dim)
    center *= rng.uniform(0.0, 0.5 * radius) / max(np.linalg.norm(center), 1e-9)
    verts = center + rng.normal(size=(count, dim)) * rng.uniform(0.1, 0.45) * radius
    norms = np.linalg.norm(verts, axis=1)
    over = norms > radius
    verts[over] *= (radius / norms[over])[:, None]
    return geo.Polytope(verts)


def _min_margin(margins) -> float:
    return float(min(margins)) if len(margins) else math.inf


# ---------------------------------------------------------------------------
# convex battery


def convex_battery(seed: int = 7, trials: int | None = None) -> list:
    results = []
    n_pairs = trials or 200

    margins = []
    for i in range(n_pairs):
        rng = _rng(seed, 1000 + i)
        dim = int(rng.integers(2, 4))
        body = _random_polytope(rng, dim, 3.0) if rng.random() < 0.5 \
            else geo.Ball(rng.normal(size=dim), float(rng.uniform(0.2, 2.0)))
        x = rng.normal(size=dim) * 3.0
        y = rng.normal(size=dim) * 3.0
        px = geo._project_rows(x[None, :], body)[0]
        py = geo._project_rows(y[None, :], body)[0]
        margins.append(np.linalg.norm(x - y) + 1e-8
                       - np.linalg.norm(px - py))
    results.append(CheckResult("projection-nonexpansive", n_pairs,
                               _min_margin(margins), _min_margin(margins) >= 0))

    margins = []
    for i in range(n_pairs):
        rng = _rng(seed, 2000 + i)
        dim = int(rng.integers(2, 4))
        poly = _random_polytope(rng, dim, 3.0)
        x = rng.normal(size=dim) * 3.0
        p = geo.project_polytope(x, poly)
        gap = float(np.einsum("nd,d->n", poly.vertices - p, x - p).max())
        margins.append(1e-9 * (1.0 + np.linalg.norm(x)) - gap)
    results.append(CheckResult("variational-certificate", n_pairs,
                               _min_margin(margins), _min_margin(margins) >= 0))

    margins = []
    for i in range(n_pairs // 2):
        rng = _rng(seed, 3000 + i)
        dim = 2
        a = _random_polytope(rng, dim, 2.0)
        b = _random_polytope(rng, dim, 2.0)
        c = _random_polytope(rng, dim, 2.0)
        shift = rng.normal(size=dim)
        d_ab = geo.hausdorff_distance(a, b).upper
        d_ba = geo.hausdorff_distance(b, a).upper
        d_self = geo.hausdorff_distance(a, a).upper
        d_shift = geo.hausdorff_distance(
            geo.Polytope(a.vertices + shift), geo.Polytope(b.vertices + shift)).upper
        d_ac = geo.hausdorff_distance(a, c).upper
        d_cb = geo.hausdorff_distance(c, b).upper
        margins.append(1e-9 - abs(d_ab - d_ba))
        margins.append(1e-9 - d_self)
        margins.append(1e-9 - abs(d_shift - d_ab))
        margins.append(d_ac + d_cb + 1e-9 - d_ab)
    results.append(CheckResult("hausdorff-metric-properties", n_pairs // 2,
                               _min_margin(margins), _min_margin(margins) >= 0))

    results.append(projection_difference_battery(seed, trials or 1000))
    results.append(slater_battery(seed, trials or 500))
    results.append(intersection_continuity_battery(seed))
    return results


def projection_difference_battery(seed: int = 7, trials: int = 1000,
                                  dim: int = 3,
                                  radius: float = 5.0) -> CheckResult:
    """Seeded random body pairs against the projection-difference estimate.

    All trials share batched projections: the per-pair exact Hausdorff
    distances and both projected points come from three stacked solves.
    """
    bodies_c, bodies_d, queries = [], [], []
    for i in range(trials):
        rng = _rng(seed, 4000 + i)
        bodies_c.append(_random_polytope(rng, dim, radius))
        bodies_d.append(_random_polytope(rng, dim, radius))
        queries.append(rng.normal(size=dim) * radius)
    xs = np.asarray(queries)
    hd = geo.polytope_pair_hausdorff(bodies_c, bodies_d)
    pc = geo.project_points_onto_polytopes(xs, bodies_c)
    pd = geo.project_points_onto_polytopes(xs, bodies_d)
    lhs = np.linalg.norm(pc - pd, axis=1)
    rhs = np.sqrt((4.0 * np.linalg.norm(xs, axis=1) + 2.0 * radius) * hd)
    worst = float((rhs + 1e-8 - lhs).min())
    return CheckResult("projection-difference-bound", trials, worst, worst >= 0)


def slater_battery(seed: int = 7, trials: int = 500,
                   dim: int = 3) -> CheckResult:
    """Interior-witness intersections against the linear-regularity bound."""
    margins = []
    for i in range(trials):
        rng = _rng(seed, 5000 + i)
        center = rng.normal(size=dim)
        radius = float(rng.uniform(0.8, 2.0))
        ball = geo.Ball(center, radius)
        x0 = center + rng.normal(size=dim) * 0.1
        rho = float(rng.uniform(0.1, 0.3))
        x0 = geo.project_ball(x0, center, max(radius - rho - 1e-6, 1e-3))
        # polytope containing x0: a simplex around it plus random spread
        simplex = x0 + 0.5 * np.vstack([np.eye(dim), -np.ones((1, dim))])
        extra = x0 + rng.normal(size=(3, dim)) * rng.uniform(0.5, 2.0)
        poly = geo.Polytope(np.vstack([simplex, extra]))
        x = rng.normal(size=dim) * 4.0
        chk = geo.slater_intersection_check(x, poly, ball, x0, rho)
        margins.append(chk.rhs + 1e-8 - chk.lhs)
    worst = _min_margin(margins)
    return CheckResult("slater-intersection-bound", trials, worst, worst >= 0)


def intersection_continuity_battery(seed: int = 7, families: int = 10,
                                    resolution: int = 2048,
                                    threshold: float = 1e-2) -> CheckResult:
    """Convergent ball/polytope families: gaps must drop below threshold."""
    margins = []
    ns = [2, 4, 8, 16, 32, 64, 128, 256, 512]
    for i in range(families):
        rng = _rng(seed, 6000 + i)
        base = _random_polytope(rng, 2, 1.5)
        c = np.asarray(geo._project_rows(rng.normal(size=2)[None, :], base)[0])
        r = float(rng.uniform(0.6, 1.4))
        direction = rng.normal(size=2)
        direction /= np.linalg.norm(direction)
        c_seq = [c + direction / n * 0.5 for n in ns]
        b_seq = [geo.Polytope(base.vertices + direction / n * 0.5) for n in ns]
        probe = geo.intersection_continuity_probe(
            c_seq, b_seq, r, c, base, resolution=resolution)
        if probe.empty_indices:
            margins.append(-1.0)
            continue
        margins.append(threshold - probe.values[-1])
    worst = _min_margin(margins)
    return CheckResult("intersection-continuity", families, worst, worst >= 0)


# ---------------------------------------------------------------------------
# selection battery


def _random_growth_map(rng, dim_u: int, dim_v: int, weight_v: float,
                       directions: int = 4, scale: float = 0.5):
    coeffs = []
    for k in range(directions):
        direction = rng.normal(size=dim_v)
        nu = rhsmod.Affine(scale * 0.5 * float(rng.uniform(0.2, 1.0)), 0.0,
                           rhsmod.Tanh(rhsmod.Inner("v", direction, weight_v)))
        coeffs.append(rhsmod.GrowthCoefficient(
            scale * float(rng.uniform(0.2, 1.0)), nu))
    basis = np.eye(dim_u)[:directions]
    return rhsmod.BasisFamilyMap(basis, tuple(coeffs), target_weight=1.0,
                                 u_weight=1.0, v_weight=weight_v)


def selection_battery(seed: int = 7, trials: int | None = None) -> list:
    results = []
    n = trials or 100

    # eps-tube regeneration: L2 distance <= eps * sqrt(span)
    margins = []
    valid = []
    for i in range(n):
        rng = _rng(seed, 7000 + i)
        dim_u, dim_v, k = 5, 4, 33
        family = _random_growth_map(rng, dim_u, dim_v, 1.0)
        t1 = float(rng.uniform(0.5, 2.0))
        u = TimePath(0.0, t1, rng.normal(size=(k, dim_u)))
        v = TimePath(0.0, t1, rng.normal(size=(k, dim_v)))
        anchor = zero_path(0.0, t1, k, dim_u)
        f = sel.nearest_point_selection(family, u, v, anchor)
        valid.append(f.is_valid())
        eps = float(rng.uniform(0.05, 0.5))
        delta = rng.normal(size=(k, dim_u))
        delta *= 0.02 * eps / max(np.linalg.norm(delta, axis=1).max(), 1e-12)
        u_new = u.with_values(u.values + delta)
        try:
            f_new = sel.approximate_selection(family, u_new, v, f, eps)
        except sel.SelectionError:
            margins.append(-1.0)
            continue
        valid.append(f_new.is_valid())
        dist = path_distance(f_new.path, f.path)
        margins.append(eps * math.sqrt(t1) + 1e-6 - dist)
    worst = _min_margin(margins)
    results.append(CheckResult("close-selection-l2-bound", n, worst,
                               worst >= 0 and all(valid)))

    # convex combinations of selections stay selections
    margins = []
    for i in range(n // 4):
        rng = _rng(seed, 8000 + i)
        dim_u, dim_v, k = 4, 3, 17
        family = _random_growth_map(rng, dim_u, dim_v, 1.0)
        u = TimePath(0.0, 1.0, rng.normal(size=(k, dim_u)))
        v = TimePath(0.0, 1.0, rng.normal(size=(k, dim_v)))
        f1 = sel.nearest_point_selection(
            family, u, v, TimePath(0.0, 1.0, rng.normal(size=(k, dim_u))))
        f2 = sel.nearest_point_selection(
            family, u, v, TimePath(0.0, 1.0, rng.normal(size=(k, dim_u))))
        theta = float(rng.uniform(0.0, 1.0))
        mix = sel.convex_combination(f1, f2, theta)
        res = sel.selection_residual(family, u, v, mix)
        margins.append(1e-8 - res)
    worst = _min_margin(margins)
    results.append(CheckResult("selection-convexity-closure", n // 4, worst,
                               worst >= 0))

    # trapezoid path norm against the analytic linear-ramp integral
    k = 10_001
    ramp = TimePath(0.0, 1.0, np.linspace(0.0, 1.0, k)[:, None])
    margin = 1e-6 - abs(path_l2_norm(ramp) - 1.0 / math.sqrt(3.0))
    results.append(CheckResult("path-norm-analytic", 1, margin, margin >= 0))
    return results


# ---------------------------------------------------------------------------
# semigroup battery


def semigroup_battery(seed: int = 7, trials: int | None = None) -> list:
    results = []
    n = trials or 100

    margins = []
    iso_margins = []
    for kind in ("heat", "schroedinger", "wave"):
        gen = sg.SpectralGenerator(kind, 12)
        for i in range(n):
            rng = _rng(seed, 9000 + i)
            state = rng.normal(size=gen.state_dim)
            t1, t2 = rng.uniform(0.0, 1.0, size=2)
            two_step = sg.propagate(gen, sg.propagate(gen, state, t1), t2)
            one_step = sg.propagate(gen, state, t1 + t2)
            margins.append(1e-12 - float(np.linalg.norm(two_step - one_step)))
            drift = float(np.linalg.norm(sg.propagate(gen, state, t1))
                          - np.linalg.norm(state))
            if kind == "heat":
                iso_margins.append(1e-12 - drift)
            else:
                iso_margins.append(1e-12 - abs(drift))
    results.append(CheckResult("semigroup-law", 3 * n, _min_margin(margins),
                               _min_margin(margins) >= 0))
    results.append(CheckResult("isometry-contraction", 3 * n,
                               _min_margin(iso_margins),
                               _min_margin(iso_margins) >= 0))

    # Duhamel linearity and the fine-step integrator cross-check
    margins = []
    oracle_margins = []
    for kind in ("heat", "schroedinger", "wave"):
        gen = sg.SpectralGenerator(kind, 12)
        rng = _rng(seed, 9500)
        k = 2 ** 10 + 1
        f1 = TimePath(0.0, 1.0, rng.normal(size=(k, gen.state_dim)))
        f2 = TimePath(0.0, 1.0, rng.normal(size=(k, gen.state_dim)))
        u0 = rng.normal(size=gen.state_dim)
        a = sg.duhamel_solve(gen, u0, f1.with_values(f1.values + f2.values))
        b = sg.duhamel_solve(gen, u0, f1)
        c = sg.duhamel_solve(gen, gen.zero_state(), f2)
        margins.append(1e-10 - path_distance(a, b.with_values(b.values + c.values)))
        oracle = sg.rk4_oracle(gen, u0, f1, refine=16)
        mild = sg.duhamel_solve(gen, u0, f1)
        oracle_margins.append(1e-6 - path_distance(mild, oracle))
    results.append(CheckResult("duhamel-linearity", 3, _min_margin(margins),
                               _min_margin(margins) >= 0))
    results.append(CheckResult("duhamel-integrator-oracle", 3,
                               _min_margin(oracle_margins),
                               _min_margin(oracle_margins) >= 0))

    # resolvent smoothing ladder and the quadratic stability estimate
    margins = []
    for kind in ("heat", "schroedinger", "wave"):
        gen = sg.SpectralGenerator(kind, 12)
        rng = _rng(seed, 9600)
        k = 129
        f = TimePath(0.0, 1.0, rng.normal(size=(k, gen.state_dim)))
        u0 = rng.normal(size=gen.state_dim)
        ladder = [10.0 ** j for j in range(0, 7)]
        report = sv.yosida_stability_check(gen, u0, f, ladder)
        margins.append(1.0 if report.passed else -1.0)
        devs = [path_distance(sg.yosida_smooth(gen, lam, f), f)
                for lam in ladder]
        margins.append(_min_margin([devs[i] - devs[i + 1] + 1e-12
                                    for i in range(len(devs) - 1)]))
    worst = _min_margin(margins)
    results.append(CheckResult("yosida-ladder", 3, worst, worst >= 0))

    # rough-data deviation profile and truncation stability
    t_list = np.logspace(-4, -2, 25)
    prof = sg.counterexample_profile(2000, t_list)
    slope_ok = 0.4 <= prof.slope <= 0.6
    ratio_factor = (sg.deviation_norm(2000, 1e-6) / 1e-6) \
        / (sg.deviation_norm(2000, 1e-2) / 1e-2)
    ratio_ok = 80.0 <= ratio_factor <= 120.0
    trunc = abs(sg.deviation_norm(2000, 5e-3) ** 2
                - sg.deviation_norm(4000, 5e-3) ** 2)
    trunc_ok = trunc <= 4.0 * sg.coefficient_tail_bound(2000)
    passed = slope_ok and ratio_ok and trunc_ok
    margin = min(prof.slope - 0.4, 0.6 - prof.slope, ratio_factor - 80.0,
                 120.0 - ratio_factor)
    results.append(CheckResult("rough-data-profile", 25, float(margin), passed))
    return results


# ---------------------------------------------------------------------------
# monotone battery


def monotone_battery(seed: int = 7, trials: int | None = None) -> list:
    results = []
    n = trials or 200

    pot = mono.make_potential(15, ("ramp", 2.2, 4.0), ("separable", 2.0, 0.3))
    margins = []
    for i in range(n):
        rng = _rng(seed, 11000 + i)
        v = rng.normal(size=15)
        t = float(rng.uniform(0.0, 1.0))
        grad = mono.subgradient(pot, t, v)
        eps = 1e-6
        fd = np.empty_like(v)
        for j in range(v.size):
            vp = v.copy()
            vp[j] += eps
            vm = v.copy()
            vm[j] -= eps
            fd[j] = (mono.energy(pot, t, vp) - mono.energy(pot, t, vm)) \
                / (2.0 * eps) / pot.mesh
        rel = float(np.abs(grad - fd).max() / (1.0 + np.abs(grad).max()))
        margins.append(1e-5 - rel)
    results.append(CheckResult("gradient-consistency", n, _min_margin(margins),
                               _min_margin(margins) >= 0))

    margins = []
    for i in range(n // 4):
        rng = _rng(seed, 12000 + i)
        x = rng.normal(size=15)
        y = rng.normal(size=15)
        gap = mono.prox_nonexpansive_gap(pot, 0.3, 0.05, x, y)
        margins.append(1e-10 - gap)
    results.append(CheckResult("prox-nonexpansive", n // 4,
                               _min_margin(margins), _min_margin(margins) >= 0))

    margins = []
    for i in range(8):
        rng = _rng(seed, 13000 + i)
        v0 = rng.normal(size=15)
        forcing = zero_path(0.0, 1.0, 129, 15, pot.mesh)
        sol = mono.solve_monotone_ivp(pot, v0, forcing)
        ts = sol.times()
        energies = np.array([mono.energy(pot, float(ts[j]), sol.values[j])
                             for j in range(sol.num_nodes)])
        margins.append(_min_margin(1e-10 - np.diff(energies)))
        norms = np.linalg.norm(sol.values, axis=1)
        margins.append(_min_margin(1e-10 - np.diff(norms)))
    results.append(CheckResult("dissipation", 8, _min_margin(margins),
                               _min_margin(margins) >= 0))

    margins = []
    for i in range(8):
        rng = _rng(seed, 14000 + i)
        v0 = rng.normal(size=15)
        vals = rng.normal(size=(65, 15))
        forcing = TimePath(0.0, 1.0, vals, pot.mesh)
        sol = mono.solve_monotone_ivp(pot, v0, forcing)
        h = pot.mesh
        tau = forcing.dt
        g_norms = forcing.node_norms()
        bound = math.sqrt(h) * np.linalg.norm(v0) \
            + np.concatenate([[0.0], np.cumsum(tau * g_norms[:-1])])
        margins.append(_min_margin(bound + 1e-8 - sol.node_norms()))
    results.append(CheckResult("discrete-apriori-bound", 8,
                               _min_margin(margins), _min_margin(margins) >= 0))

    margins = []
    for i in range(trials or 1000):
        rng = _rng(seed, 15000 + i)
        v = rng.normal(size=15)
        w = rng.normal(size=15)
        margins.append(mono.monotonicity_probe(pot, 0.4, v, w) + 1e-10)
    results.append(CheckResult("monotonicity", trials or 1000,
                               _min_margin(margins), _min_margin(margins) >= 0))

    results.append(p2_oracle_battery())
    results.append(complete_continuity_battery(seed))
    return results


def p2_oracle_battery(j: int = 63, steps: int = 2 ** 12) -> CheckResult:
    """Quadratic-mode flow against the diagonalized implicit-Euler recursion."""
    pot = mono.make_potential(j, ("constant", 2.0), ("constant", 1.0),
                              oracle_p2=True)
    h = pot.mesh
    x = pot.nodes()[1:-1]
    v0 = np.sin(np.pi * x) + 0.3 * np.sin(3 * np.pi * x)
    t_nodes = np.linspace(0.0, 1.0, steps + 1)
    fvals = 0.5 * np.sin(2 * np.pi * x)[None, :] \
        * np.cos(2 * np.pi * t_nodes)[:, None]
    forcing = TimePath(0.0, 1.0, fvals, h)
    sol = mono.solve_monotone_ivp(pot, v0, forcing)

    kk = np.arange(1, j + 1)
    transform = math.sqrt(2.0) * np.sin(np.pi * np.outer(kk, x))
    eigen = 4.0 / h ** 2 * np.sin(kk * np.pi * h / 2.0) ** 2 + 1.0
    tau = forcing.dt
    coeff = h * (transform @ v0)
    f_coeff = h * (forcing.values @ transform.T)
    values = np.empty_like(sol.values)
    values[0] = coeff @ transform
    for k in range(steps):
        coeff = (coeff + tau * f_coeff[k]) / (1.0 + tau * eigen)
        values[k + 1] = coeff @ transform
    oracle = TimePath(0.0, 1.0, values, h)
    err = path_distance(sol, oracle)
    return CheckResult("p2-spectral-oracle", 1, 1e-6 - err, err <= 1e-6)


def complete_continuity_battery(seed: int = 7,
                                threshold: float = 1e-3) -> CheckResult:
    """Oscillating forcings with vanishing mean effect: flows converge."""
    pot = mono.make_potential(15, ("constant", 3.0), ("constant", 1.0))
    h = pot.mesh
    rng = _rng(seed, 16000)
    v0 = rng.normal(size=15) * 0.5
    k = 1025
    t = np.linspace(0.0, 1.0, k)
    profile = rng.normal(size=15)
    base_vals = 0.4 * np.sin(np.pi * pot.nodes()[1:-1])[None, :] \
        * np.ones((k, 1))
    base = TimePath(0.0, 1.0, base_vals, h)
    v_base = mono.solve_monotone_ivp(pot, v0, base)
    sups = []
    for freq in (4, 16, 64, 256, 1024):
        osc = base_vals + np.sin(2 * np.pi * freq * t)[:, None] * profile
        v_osc = mono.solve_monotone_ivp(pot, v0, TimePath(0.0, 1.0, osc, h))
        sups.append(math.sqrt(h)
                    * float(np.linalg.norm(v_osc.values - v_base.values,
                                           axis=1).max()))
    decreasing = all(sups[i + 1] <= sups[i] + 1e-12 for i in range(len(sups) - 1))
    margin = threshold - sups[-1]
    return CheckResult("complete-continuity", len(sups), margin,
                       decreasing and margin >= 0)


# ---------------------------------------------------------------------------
# solver battery


def _preset_experiment(name: str):
    from .config import build_experiment, load_config, preset_path
    return build_experiment(load_config(preset_path(name)))


def solver_battery(seed: int = 7, trials: int | None = None) -> list:
    results = []

    gen = sg.SpectralGenerator("heat", 6)
    pot = mono.make_potential(15, ("constant", 3.0), ("constant", 1.0))
    h = pot.mesh
    rng = _rng(seed, 17000)
    u0 = rng.normal(size=gen.state_dim) * 0.5
    v0 = rng.normal(size=15) * 0.5
    f0 = rng.normal(size=gen.state_dim) * 0.3
    g0 = rng.normal(size=15) * 0.3
    f_map = rhsmod.SingletonAffineMap.constant(f0, gen.state_dim, 15, 1.0, 1.0, h)
    g_map = rhsmod.SingletonAffineMap.constant(g0, gen.state_dim, 15, h, 1.0, h)
    beta = max(float(np.linalg.norm(u0)), math.sqrt(h) * float(np.linalg.norm(v0)))
    window = sv.compute_window(1.0, beta, [f_map.growth_envelope(),
                                           g_map.growth_envelope()], 1.0)
    sol = sv.solve_window(gen, pot, u0, v0, f_map, g_map, window, num_nodes=65)
    decoupled_u = sg.duhamel_solve(gen, u0,
                                   constant_path(0.0, window.t_window, 65, f0))
    exact = bool(np.array_equal(sol.u.values, decoupled_u.values))
    ok = sol.report.converged and sol.report.iterations == 1 and exact
    results.append(CheckResult("singleton-one-iteration", 1,
                               1.0 if ok else -1.0, ok))

    results.append(linear_block_oracle_battery(seed))
    results.append(window_params_battery(seed))

    # bundled presets end to end
    for name in ("heat_debye", "schrodinger_debye"):
        exp = _preset_experiment(name)
        run = sv.solve_global(exp.generator, exp.potential, exp.u0, exp.v0,
                              exp.rhs_f, exp.rhs_g, exp.config.horizon,
                              exp.settings)
        checks = [run.converged]
        worst = math.inf
        for w in run.windows:
            checks.append(w.report.converged)
            checks.append(w.report.apriori.passed)
            checks.append(w.report.membership_ok)
            worst = min(worst, exp.settings.tol - w.report.residual_f,
                        exp.settings.tol - w.report.residual_g)
        checks.append(run.gronwall is not None and run.gronwall.passed)
        ok = all(checks)
        results.append(CheckResult(f"preset-{name}", len(run.windows),
                                   worst if ok else -1.0, ok))

    results.append(gronwall_negative_control())
    results.append(elementary_bound_battery(seed, trials or 100))
    return results


def linear_block_oracle_battery(seed: int = 7,
                                tolerance: float = 1e-5) -> CheckResult:
    """Affine single-valued maps against the direct forward recursion.

    With node-sampled selections the converged fixed point satisfies an
    explicit recursion: exponential step in u, resolvent step in v, both
    driven by the previous node's affine forcing. Running that recursion
    directly is an independent route to the same discrete solution.
    """
    gen = sg.SpectralGenerator("heat", 5)
    j = 9
    pot = mono.make_potential(j, ("constant", 2.0), ("constant", 1.0),
                              oracle_p2=True)
    h = pot.mesh
    rng = _rng(seed, 18000)
    du, dv = gen.state_dim, j
    a_f = rng.normal(size=(du, du)) * 0.08
    b_f = rng.normal(size=(du, dv)) * 0.05
    c_f = rng.normal(size=du) * 0.2
    a_g = rng.normal(size=(dv, du)) * 0.05
    b_g = rng.normal(size=(dv, dv)) * 0.08
    c_g = rng.normal(size=dv) * 0.2
    f_map = rhsmod.SingletonAffineMap(a_f, b_f, c_f, 1.0, 1.0, h)
    g_map = rhsmod.SingletonAffineMap(a_g, b_g, c_g, h, 1.0, h)
    u0 = rng.normal(size=du) * 0.4
    v0 = rng.normal(size=dv) * 0.4
    beta = max(float(np.linalg.norm(u0)), math.sqrt(h) * float(np.linalg.norm(v0)))
    window = sv.compute_window(1.0, beta, [f_map.growth_envelope(),
                                           g_map.growth_envelope()], 0.5)
    k = 65
    sol = sv.solve_window(gen, pot, u0, v0, f_map, g_map, window,
                          num_nodes=k, tol=1e-11)

    # independent route: direct block recursion
    tau = window.t_window / (k - 1)
    mu = gen.mode_numbers() ** 2
    decay = np.exp(-tau * mu)
    forced = (1.0 - np.exp(-tau * mu)) / mu
    lap = np.zeros((j, j))
    for i in range(j):
        lap[i, i] = 2.0 / h ** 2 + 1.0
        if i > 0:
            lap[i, i - 1] = -1.0 / h ** 2
        if i < j - 1:
            lap[i, i + 1] = -1.0 / h ** 2
    step_v = np.linalg.inv(np.eye(j) + tau * lap)
    u_vals = np.empty((k, du))
    v_vals = np.empty((k, dv))
    u_vals[0], v_vals[0] = u0, v0
    for i in range(k - 1):
        f_i = a_f @ u_vals[i] + b_f @ v_vals[i] + c_f
        g_i = a_g @ u_vals[i] + b_g @ v_vals[i] + c_g
        u_vals[i + 1] = decay * u_vals[i] + forced * f_i
        v_vals[i + 1] = step_v @ (v_vals[i] + tau * g_i)
    err_u = path_distance(sol.u, sol.u.with_values(u_vals))
    err_v = path_distance(sol.v, sol.v.with_values(v_vals))
    err = max(err_u, err_v)
    return CheckResult("linear-block-oracle", 1, tolerance - err,
                       sol.report.converged and err <= tolerance)


def window_params_battery(seed: int = 7) -> CheckResult:
    """Window constants: arithmetic anchors plus refined-iteration agreement."""
    margins = []
    w = sv.compute_window(1.0, 2.0, [rhsmod.GrowthEnvelope(0.0, 0.0, 1.5)], 10.0)
    margins.append(1e-12 - abs(w.m - 3.0))
    margins.append(1e-12 - abs(w.r - 1.5))
    margins.append(1e-12 - abs(w.t_window - (3.0 / 1.5) ** 2))
    for i in range(20):
        rng = _rng(seed, 19000 + i)
        env = rhsmod.GrowthEnvelope(*rng.uniform(0.05, 1.0, size=3))
        beta = float(rng.uniform(0.1, 3.0))
        w1 = sv.compute_window(1.0, beta, [env], 5.0)
        margins.append(w1.t_window - 0.0)
        margins.append((w1.m / max(w1.r, 1e-12)) ** 2 + 1e-9 - w1.t_window)
    worst = _min_margin(margins)
    return CheckResult("window-params", 21, worst, worst >= 0)


def gronwall_negative_control() -> CheckResult:
    """A converged growing run must violate a deliberately undersized rate."""
    run, exp = feedback_growth_run()
    assert run.converged
    envs = [exp.rhs_f.growth_envelope(), exp.rhs_g.growth_envelope()]
    a = max(env.a for env in envs)
    b = max(env.b for env in envs)
    c = max(env.c for env in envs)
    genuine = sv.gronwall_check_windows(run.windows, a, b, c, exp.u0, exp.v0,
                                        exp.config.horizon)
    broken = sv.gronwall_check_windows(run.windows, a, b, c, exp.u0, exp.v0,
                                       exp.config.horizon, rho_override=0.0)
    ok = genuine.passed and not broken.passed
    return CheckResult("gronwall-negative-control", 1,
                       -broken.worst_margin if ok else -1.0, ok)


def feedback_growth_run():
    """Rotation-kind run with pure state feedback: guaranteed norm growth."""
    from .config import build_experiment, load_config, preset_path
    exp = build_experiment(load_config(preset_path("feedback_growth")))
    run = sv.solve_global(exp.generator, exp.potential, exp.u0, exp.v0,
                          exp.rhs_f, exp.rhs_g, exp.config.horizon,
                          exp.settings)
    return run, exp


def elementary_bound_battery(seed: int = 7, trials: int = 100) -> CheckResult:
    """Quadratic integral inequality on seeded piecewise-constant rates."""
    margins = []
    for i in range(trials):
        rng = _rng(seed, 20000 + i)
        k = 65
        pieces = rng.uniform(0.0, 2.0, size=8)
        vals = np.repeat(pieces, k // 8 + 1)[:k]
        h_path = TimePath(0.0, float(rng.uniform(0.5, 2.0)), vals[:, None])
        c = float(rng.uniform(0.0, 2.0))
        report = sv.elementary_bound_probe(c, h_path)
        margins.append(1e-8 - report.recursion_gap)
        margins.append(report.bound_margin + 1e-12)
        if not report.passed:
            margins.append(-1.0)
    worst = _min_margin(margins)
    return CheckResult("elementary-bound", trials, worst, worst >= 0)


# ---------------------------------------------------------------------------
# runner


def run_suite(name: str, seed: int = 7, trials: int | None = None) -> list:
    batteries = {
        "convex": convex_battery,
        "selection": selection_battery,
        "semigroup": semigroup_battery,
        "monotone": monotone_battery,
        "solver": solver_battery,
    }
    if name == "all":
        out = []
        for suite in SUITES:
            out.extend(batteries[suite](seed, trials))
        return out
    if name not in batteries:
        raise KeyError(name)
    return batteries[name](seed, trials)

import numpy as np
import pytest

from spinbec.energy import GPEnergy, PotentialSpec, build_potential
from spinbec.errors import ConfigurationError
from spinbec.manifold import ConstrainedProblem, inner
from spinbec.solver import (GroundStateProblem, SolverConfig, arnt, cascadic_solve, level_grids,
                            modified_cg, rgbb, transfer)
from spinbec.solver.arnt import model_value
from spinbec.spectral_grid import Grid
from spinbec.spin_model import InteractionParams


def toy_problem(n=64, M=0.5, beta=(100.0, 10.0)):
    """Spin-1 antiferromagnetic condensate in a 1D harmonic trap."""
    grid = Grid.uniform(1, -8, 8, n)
    return GroundStateProblem(1, grid, InteractionParams(*beta, M=M), PotentialSpec.lattice(1, 1.0))


def toy_constrained(n=64, M=0.5):
    p = toy_problem(n, M)
    return p.on_grid(p.grid), p.initial_state(p.grid)


class CheckedProblem(ConstrainedProblem):
    """Asserts feasibility of every state the solver evaluates."""

    def __init__(self, base):
        super().__init__(base.energy, base.space.M)
        self.evaluated = 0

    def evaluate(self, X):
        assert self.space.is_feasible(X, 1e-12)
        self.evaluated += 1
        return super().evaluate(X)


# -- truncated CG ------------------------------------------------------------

def test_cg_on_identity_is_one_step():
    g = np.array([1.0, -2.0, 0.5])
    res = modified_cg(g, lambda x: x, 20)
    np.testing.assert_allclose(res.s, -g, atol=1e-15)
    assert res.d is None and res.iterations == 1 and res.status == "converged"


def test_cg_solves_spd_system_to_tolerance(rng):
    A = rng.standard_normal((6, 6))
    A = A @ A.T + 6 * np.eye(6)
    g = rng.standard_normal(6)
    res = modified_cg(g, lambda x: A @ x, 50, rel_tol=1e-3)
    r0 = np.linalg.norm(g)
    assert np.linalg.norm(A @ res.s + g) <= r0 * min(1e-3, 1e-3 * r0) * (1 + 1e-8)
    np.testing.assert_allclose(res.s, np.linalg.solve(A, -g), rtol=1e-2)


def test_cg_detects_negative_curvature():
    H = np.diag([2.0, 1.0, -1.0])
    g = np.array([0.0, 0.0, 1.0])
    res = modified_cg(g, lambda x: H @ x, 20)
    assert res.status == "negative-curvature" and res.iterations == 1
    np.testing.assert_allclose(res.s, -g)
    assert res.d @ H @ res.d < 0
    res = modified_cg(np.array([1.0, 1.0, 1.0]), lambda x: H @ x, 20)
    assert res.d is not None and res.d @ H @ res.d <= 1e-10 * res.d @ res.d


def test_cg_cap_schedule():
    cfg = SolverConfig()
    assert cfg.cg_cap(1.0) == 20 and cfg.cg_cap(1e-1) == 20
    assert cfg.cg_cap(1e-6) == 200 and cfg.cg_cap(1e-12) == 200
    caps = [cfg.cg_cap(10.0**-k) for k in range(8)]
    assert caps == sorted(caps)


def test_solver_config_validation():
    with pytest.raises(ConfigurationError):
        SolverConfig(eta1=0.95, eta2=0.9).validate()
    with pytest.raises(ConfigurationError):
        SolverConfig().replace(tolerance=1.0)
    with pytest.raises(ConfigurationError):
        SolverConfig(retraction="cayley").validate()


# -- model ---------------------------------------------------------------------

def test_model_is_anchored_at_the_current_iterate():
    prob, X = toy_constrained(32)
    ev = prob.evaluate(X)
    H = prob.energy.hessian_operator(X)
    assert model_value(ev.egrad, H, 3.0, np.zeros_like(X)) == 0.0
    xi = prob.space.random_tangent(X, np.random.default_rng(0))
    t = 1e-6
    curve = lambda s: model_value(ev.egrad, H, 3.0, prob.space.retract_step(X, xi, s) - X)
    assert (curve(t) - curve(-t)) / (2 * t) == pytest.approx(inner(ev.rgrad, xi), rel=1e-6)


# -- RGBB --------------------------------------------------------------------

def _dense_oracle(n=16):
    """Smallest eigenpair of -Delta/2 + V on the grid, from a dense matrix."""
    grid = Grid.uniform(1, -4, 4, n)
    V = build_potential(grid, PotentialSpec.lattice(1, 1.0))
    E = GPEnergy(grid, V, InteractionParams(0.0, 0.0), F=1)
    I = np.eye(n)
    K = np.array([0.5 * E.kinetic_operator(I[None, j])[0].real for j in range(n)]).T + np.diag(V)
    w, v = np.linalg.eigh(K)
    return ConstrainedProblem(E, 0.0), w[0], v[:, 0]


def test_rgbb_reaches_the_dense_ground_mode():
    prob, lam, vec = _dense_oracle()
    X0 = prob.space.random_point(np.random.default_rng(3))
    res = rgbb(prob, X0, 1e-9, 5000)
    assert res.converged
    assert res.energy == pytest.approx(lam, abs=1e-12)


def test_rgbb_stops_at_a_stationary_point():
    prob, lam, vec = _dense_oracle()
    U = np.array([0.5, 2**-0.5, 0.5])
    X = (U[:, None] * vec[None, :]).astype(complex)
    res = rgbb(prob, X, 1e-8, 100)
    assert res.iterations == 0 and res.converged
    np.testing.assert_array_equal(res.X, X)


def test_rgbb_iterates_are_feasible_and_nonmonotone_decreasing():
    base, X0 = toy_constrained(32)
    prob = CheckedProblem(base)
    cfg = SolverConfig()
    res = rgbb(prob, X0, 1e-4, 300, cfg)
    assert res.converged
    C, Q = base.value(X0), 1.0
    for r in res.records:
        assert r.energy <= C + 1e-12 * abs(C)
        Qn = cfg.nonmonotone * Q + 1
        C, Q = (cfg.nonmonotone * Q * C + r.energy) / Qn, Qn


# -- ARNT ----------------------------------------------------------------------

def test_arnt_agrees_with_rgbb_and_is_monotone():
    base, X0 = toy_constrained(64)
    prob = CheckedProblem(base)
    warm = rgbb(prob, X0, 1e-2, 2000)
    res = arnt(prob, warm.X, 1e-8, 200)
    assert res.converged and res.grad_norm <= 1e-8
    energies = [warm.energy] + [r.energy for r in res.records]
    assert all(b <= a + 1e-13 * abs(a) for a, b in zip(energies, energies[1:]))
    ref = rgbb(base, X0, 1e-7, 20000)
    assert res.energy == pytest.approx(ref.energy, abs=1e-8)


def test_arnt_converges_from_an_inflated_regularization():
    prob, X0 = toy_constrained(64)
    cfg = SolverConfig(sigma0=1e6)
    res = arnt(prob, rgbb(prob, X0, 1e-2, 2000).X, 1e-7, 500, cfg)
    assert res.converged
    sig = [r.sigma / r.grad_norm for r in res.records]
    assert sig[-1] < 1e6


def test_arnt_rejection_inflates_sigma_before_acceptance():
    prob, X0 = toy_constrained(64)
    # a tiny initial weight from a cold start makes the first Newton steps overshoot
    cfg = SolverConfig(sigma0=1e-3)
    e0 = prob.value(X0)
    recs = arnt(prob, X0, 1e-6, 30, cfg).records
    rejected = [i for i, r in enumerate(recs) if not r.accepted]
    assert rejected, "expected at least one rejected trial step"
    i = rejected[0]
    assert recs[i].energy == (recs[i - 1].energy if i else e0)
    assert recs[i + 1].sigma >= cfg.gamma2 * recs[i].sigma * (1 - 1e-12)
    assert any(r.accepted for r in recs[i + 1:])


def test_arnt_at_a_stationary_point():
    prob, lam, vec = _dense_oracle()
    X = (np.array([0.5, 2**-0.5, 0.5])[:, None] * vec[None, :]).astype(complex)
    res = arnt(prob, X, 1e-8, 10)
    assert res.iterations == 0


# -- cascadic multigrid ---------------------------------------------------------

def test_level_grids():
    assert [g.n for g in level_grids(Grid.uniform(2, -1, 1, 64), 3)] == [(16, 16), (32, 32), (64, 64)]
    assert [g.n for g in level_grids(Grid.uniform(1, -1, 1, 32), 3)] == [(16,), (32,)]
    assert [g.n for g in level_grids(Grid.uniform(1, -1, 1, 64), 1)] == [(64,)]
    with pytest.raises(ConfigurationError):
        level_grids(Grid.uniform(1, -1, 1, 8), 3)


def test_transfer_is_feasible():
    p = toy_problem(32)
    coarse, fine = p.grid, p.grid.refine()
    Xf = transfer(coarse, fine, p.initial_state(coarse), p.on_grid(fine).space)
    assert p.on_grid(fine).space.is_feasible(Xf, 1e-12)


def test_single_level_equals_rgbb_then_arnt():
    p = toy_problem(64)
    cfg = SolverConfig(levels=1)
    rep = cascadic_solve(p, cfg)
    cp = p.on_grid(p.grid)
    warm = rgbb(cp, p.initial_state(p.grid), cfg.rgbb_tol, cfg.rgbb_max_iters, cfg)
    res = arnt(cp, warm.X, cfg.grad_tol, cfg.max_outer_iters, cfg)
    np.testing.assert_array_equal(rep.X, res.X)
    assert rep.energy == res.energy


def test_cascadic_run_is_deterministic_and_reports_levels():
    p = toy_problem(64)
    seen = []
    a = cascadic_solve(p, callback=seen.append)
    b = cascadic_solve(p)
    assert a.converged and a.grad_norm <= 1e-6
    assert seen == a.records == b.records
    np.testing.assert_array_equal(a.X, b.X)
    assert [l.n for l in a.levels] == [(16,), (32,), (64,)]
    assert [r.level for r in a.records] == sorted(r.level for r in a.records)
    assert a.iterations == sum(l.rgbb_iters + l.arnt_iters for l in a.levels)


@pytest.mark.parametrize("kind", ["orthogonal", "closedform", "projective-spin1"])
def test_retractions_reach_the_same_state(kind):
    p = toy_problem(64)
    ref = cascadic_solve(p)
    rep = cascadic_solve(p, SolverConfig(retraction=kind))
    assert rep.converged
    assert rep.energy == pytest.approx(ref.energy, abs=1e-10)

import numpy as np
import pytest

from app.exceptions import DomainError
from app.pde import CoupledState, FieldHistory, GridField, conserved_mass, evolve, residual
from app.soliton import SolitonField, SolitonSeed, one_soliton_excess

OMEGA = 2.0


def soliton_grid(x, t=0.0):
    return GridField(x=x, values=1 + one_soliton_excess(x, t, OMEGA), q_minus=1.0, q_plus=1.0)


def test_residual_of_constant_background():
    x = np.linspace(-3, 3, 13)
    values = residual(lambda y, t: np.ones(np.shape(y), dtype=complex), x, 0.4, 1e-2, sigma=-1)
    assert np.max(values) == 0


def test_grid_field_needs_uniform_grid():
    x = np.linspace(-1, 1, 11)
    x[4] += 1e-3
    with pytest.raises(DomainError):
        GridField(x=x, values=np.ones(11), q_minus=1.0, q_plus=1.0)
    with pytest.raises(DomainError):
        GridField(x=np.linspace(-1, 1, 5), values=np.ones(5), q_minus=1.0, q_plus=1.0)


def exact_state(x, t):
    """u = q(x, t) and v = q(-x, -t) from the closed form"""
    return CoupledState(x=x, u=1 + one_soliton_excess(x, t, OMEGA), v=1 + one_soliton_excess(-x, -t, OMEGA),
                        sigma=-1, q_minus=1.0, t=t)


def test_coupled_state_mirrors_field():
    state = CoupledState.from_field(soliton_grid(np.linspace(-10, 10, 201)), sigma=-1)
    assert state.mirror_defect() == 0
    assert state.q_plus == 1.0
    with pytest.raises(DomainError):
        CoupledState.from_field(soliton_grid(np.linspace(-10, 12, 221)), sigma=-1)


def test_mirror_defect_pairs_opposite_times():
    x = np.linspace(-20, 20, 801)
    forward, backward = exact_state(x, 0.2), exact_state(x, -0.2)
    assert forward.mirror_defect(backward) < 1e-12
    assert backward.mirror_defect(forward) < 1e-12
    # q(-x, t) is not q(-x, -t) once the soliton has moved
    assert np.max(np.abs(forward.v - forward.u[::-1])) > 0.1
    with pytest.raises(DomainError):
        forward.mirror_defect()
    with pytest.raises(DomainError):
        forward.mirror_defect(exact_state(x, 0.1))
    with pytest.raises(DomainError):
        forward.mirror_defect(exact_state(np.linspace(-10, 10, 801), -0.2))


@pytest.mark.parametrize("scheme", ["spectral", "lines"])
def test_constant_background_is_stationary(small_config, scheme):
    x = np.linspace(-10, 10, 201)
    state = CoupledState.from_field(GridField(x=x, values=np.ones(x.size), q_minus=1.0, q_plus=1.0), sigma=-1)
    out = evolve(state, 0.05, 1e-3, small_config.with_overrides(pde_scheme=scheme))
    assert out.t == 0.05
    assert np.max(np.abs(out.u - 1)) < 1e-12
    assert np.max(np.abs(out.v - 1)) < 1e-12


def test_evolve_step_rules(small_config):
    state = exact_state(np.linspace(-10, 10, 201), 0.0)
    with pytest.raises(DomainError):
        evolve(state, 0.1, -1e-3, small_config)
    same = evolve(state, 0.0, config=small_config)
    assert same.t == 0.0
    assert np.array_equal(same.u, state.u)
    assert same.u is not state.u


@pytest.fixture(scope="module")
def evolved_soliton(small_config):
    x = np.linspace(-20, 20, 801)
    state = CoupledState.from_field(soliton_grid(x), sigma=-1)
    lines = small_config.with_overrides(pde_scheme="lines")
    return state, evolve(state, 0.2, 0.05 ** 3, lines), evolve(state, -0.2, 0.05 ** 3, lines)


def test_evolution_tracks_soliton(evolved_soliton):
    _, out, back = evolved_soliton
    core = np.abs(out.x) <= 10
    exact = 1 + one_soliton_excess(out.x, 0.2, OMEGA)
    mirrored = 1 + one_soliton_excess(-out.x, -0.2, OMEGA)
    assert np.max(np.abs(out.u - exact)[core]) < 1e-3
    assert np.max(np.abs(out.v - mirrored)[core]) < 1e-3
    assert back.t == -0.2
    assert out.mirror_defect(back) < 2e-3


def test_evolution_conserves_mass(evolved_soliton):
    start, out, _ = evolved_soliton
    assert abs(conserved_mass(out) - conserved_mass(start)) < 1e-4


@pytest.fixture(scope="module")
def long_soliton_run(small_config):
    # the soliton travels at 6 + D^2 = 8.25 and reaches x = 41.25 by t = 5
    state = exact_state(np.linspace(-60, 60, 2401), 0.0)
    return state, evolve(state, 5.0, config=small_config), evolve(state, -5.0, config=small_config)


def test_spectral_evolution_tracks_soliton_to_t5(long_soliton_run):
    _, out, _ = long_soliton_run
    assert out.t == 5.0
    core = np.abs(out.x) <= 50
    exact = exact_state(out.x, 5.0)
    assert np.max(np.abs(out.u - exact.u)[core]) < 1e-4
    assert np.max(np.abs(out.v - exact.v)[core]) < 1e-4


def test_spectral_evolution_backwards_mirrors_forward(long_soliton_run):
    start, out, back = long_soliton_run
    assert back.t == -5.0
    assert np.max(np.abs(back.u - exact_state(back.x, -5.0).u)) < 1e-4
    assert out.mirror_defect(back) < 2e-4
    assert abs(conserved_mass(out) - conserved_mass(start)) < 1e-5


@pytest.fixture(scope="module")
def soliton_history():
    field = SolitonField(SolitonSeed.imaginary_pair(OMEGA))
    x = np.linspace(-10, 10, 401)
    times = np.linspace(-0.1, 0.1, 21)
    snapshots = [GridField(x=x, values=field.q(x, t), q_minus=1.0, q_plus=1.0) for t in times]
    return field, FieldHistory(times, snapshots)


def test_history_interpolates_snapshots(soliton_history):
    field, history = soliton_history
    x = np.linspace(-5, 5, 11)
    assert np.max(np.abs(history(x, 0.03) - field.q(x, 0.03))) < 1e-9


def test_history_residual_matches_direct(soliton_history):
    field, history = soliton_history
    rows = history.residual_rows(0.05, sigma=-1)
    assert rows
    for t, x, value in rows[::37]:
        assert abs(t) <= 0.05 + 1e-9
        assert abs(x) <= 9.9 + 1e-9
        direct = residual(field.q, [x], t, 0.05, sigma=-1)[0]
        assert abs(value - direct) < 1e-6 * max(1.0, direct)


def test_history_validation(soliton_history):
    _, history = soliton_history
    x = np.linspace(-10, 10, 401)
    with pytest.raises(DomainError):
        FieldHistory([0.0], [soliton_grid(x)])
    with pytest.raises(DomainError):
        FieldHistory([0.0, 0.1], [soliton_grid(x), soliton_grid(np.linspace(-10, 10, 201))])
    with pytest.raises(DomainError):
        history.residual_rows(0.2, sigma=-1)

import numpy as np
import pytest

from fieldtomo.exceptions import ValidationError
from fieldtomo.fock import density_from_pure, fock_state
from fieldtomo.measurement import (
    MeasurementPlan,
    decohered_expectation,
    read_trajectory_csv,
    sample_trajectory,
    write_trajectory_csv,
)
from fieldtomo.probe import ProbeConfig, ideal_bloch_trajectory


@pytest.fixture(scope="module")
def rho_one():
    return density_from_pure(fock_state(1, 8))


def test_plan_validation():
    with pytest.raises(ValidationError):
        MeasurementPlan(delta_t=0.0, n_t=10)
    with pytest.raises(ValidationError):
        MeasurementPlan(delta_t=0.1, n_t=0)
    with pytest.raises(ValidationError):
        MeasurementPlan(delta_t=0.1, n_t=10, n_m=0)
    with pytest.raises(ValidationError):
        MeasurementPlan(delta_t=0.1, n_t=10, axes=("x", "q"))
    with pytest.raises(ValidationError):
        MeasurementPlan(delta_t=0.1, n_t=10, axes=())
    with pytest.raises(ValidationError):
        MeasurementPlan(delta_t=0.1, n_t=10, gamma=-0.1)


def test_infinite_shots_reproduces_ideal(rho_one, probe):
    plan = MeasurementPlan(delta_t=0.075, n_t=128, n_m=None)
    traj = sample_trajectory(rho_one, probe, plan)
    ideal = ideal_bloch_trajectory(rho_one, probe, plan.times())
    assert traj.kind == "ideal"
    assert np.allclose(traj.z, ideal.z)
    assert np.allclose(traj.x, ideal.x)


def test_finite_shots_are_empirical_means(rho_one, probe):
    plan = MeasurementPlan(delta_t=0.075, n_t=64, n_m=1, axes=("z",), seed=5)
    traj = sample_trajectory(rho_one, probe, plan)
    assert traj.kind == "sampled"
    assert set(np.unique(traj.z)).issubset({-1.0, 1.0})
    plan7 = MeasurementPlan(delta_t=0.075, n_t=64, n_m=7, axes=("z",), seed=5)
    z7 = sample_trajectory(rho_one, probe, plan7).z
    # empirical means of 7 shots live on the odd-sevenths lattice
    assert np.allclose(np.round((z7 + 1.0) * 3.5), (z7 + 1.0) * 3.5)


def test_same_seed_reproduces_and_seeds_differ(rho_one, probe):
    mk = lambda seed: sample_trajectory(
        rho_one, probe, MeasurementPlan(delta_t=0.075, n_t=64, n_m=50, seed=seed)
    )
    a, b, c = mk(11), mk(11), mk(12)
    assert np.array_equal(a.z, b.z)
    assert np.array_equal(a.x, b.x)
    assert not np.array_equal(a.z, c.z)


def test_axis_streams_independent_of_subset(rho_one, probe):
    """Removing axes from the plan must not shift the other axes' shots."""
    full = sample_trajectory(
        rho_one, probe, MeasurementPlan(delta_t=0.075, n_t=64, n_m=20, seed=3)
    )
    z_only = sample_trajectory(
        rho_one,
        probe,
        MeasurementPlan(delta_t=0.075, n_t=64, n_m=20, axes=("z",), seed=3),
    )
    assert np.array_equal(full.z, z_only.z)
    assert z_only.x is None and z_only.y is None


def test_sampling_is_unbiased(rho_one, probe):
    """Grand mean over 200 seeds stays within 4 sigma of the ideal value."""
    n_m, reps = 100, 200
    plan_times = MeasurementPlan(delta_t=0.075, n_t=32, n_m=n_m, axes=("z",))
    ideal = ideal_bloch_trajectory(rho_one, probe, plan_times.times()).z
    acc = np.zeros_like(ideal)
    for rep in range(reps):
        plan = MeasurementPlan(
            delta_t=0.075, n_t=32, n_m=n_m, axes=("z",), seed=1000 + rep
        )
        acc += sample_trajectory(rho_one, probe, plan).z
    mean = acc / reps
    # worst-case sigma of the grand mean is 1/sqrt(n_m reps)
    assert np.max(np.abs(mean - ideal)) < 4.0 / np.sqrt(n_m * reps)


def test_sampling_variance_follows_binomial_law(rho_one, probe):
    n_m, reps = 25, 300
    plan_times = MeasurementPlan(delta_t=0.075, n_t=16, n_m=n_m, axes=("z",))
    ideal = ideal_bloch_trajectory(rho_one, probe, plan_times.times()).z
    samples = np.empty((reps, ideal.size))
    for rep in range(reps):
        plan = MeasurementPlan(
            delta_t=0.075, n_t=16, n_m=n_m, axes=("z",), seed=2000 + rep
        )
        samples[rep] = sample_trajectory(rho_one, probe, plan).z
    empirical = samples.var(axis=0).mean()
    predicted = ((1.0 - ideal**2) / n_m).mean()
    assert empirical == pytest.approx(predicted, rel=0.2)


def test_decoherence_damps_token_exponentially(rho_one, probe):
    gamma = 0.05
    plan = MeasurementPlan(delta_t=0.075, n_t=64, n_m=None, gamma=gamma)
    traj = sample_trajectory(rho_one, probe, plan)
    bare = sample_trajectory(
        rho_one, probe, MeasurementPlan(delta_t=0.075, n_t=64, n_m=None)
    )
    assert np.allclose(traj.z, bare.z * np.exp(-gamma * traj.times))


def test_decohered_expectation_validates():
    with pytest.raises(ValidationError):
        decohered_expectation(np.zeros(3), -1.0, np.arange(1.0, 4.0))


def test_trajectory_csv_round_trip(tmp_path, rho_one, probe):
    plan = MeasurementPlan(delta_t=0.075, n_t=32, n_m=40, axes=("x", "z"), seed=9)
    traj = sample_trajectory(rho_one, probe, plan)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    header = path.read_text().splitlines()[0]
    assert header == "t,x,y,z"
    back = read_trajectory_csv(path)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.x, traj.x)
    assert back.y is None
    assert np.array_equal(back.z, traj.z)

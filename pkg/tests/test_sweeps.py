import numpy as np
import pytest

from spinline.chain import ChainSpec
from spinline.measures import concurrence
from spinline.states import ANGLE_NAMES, ControlParams, rho_sr
from spinline.sweeps import (
    Axis,
    ScalarField,
    SweepGrid,
    angle_grid,
    concurrence_stats,
    lambda_averaged_concurrence,
    mean_concurrence,
    mean_over,
    mean_probability,
    normalized_curves,
    score_grid,
    std_dev,
    transfer_fidelity,
    unit_axis,
    witness,
)
from spinline.transfer import compute_transfer_tensor


@pytest.fixture(scope="module")
def tensor40():
    return compute_transfer_tensor(ChainSpec(40), 43.442)


@pytest.fixture(scope="module")
def tensor5():
    return compute_transfer_tensor(ChainSpec(5), 2.0)


def test_axis_validation_and_weights():
    ax = Axis("alpha1", 0.0, 1.0, 0.25)
    assert np.allclose(ax.nodes(), [0, 0.25, 0.5, 0.75, 1.0])
    assert abs(ax.weights("trapezoid").sum() - 1.0) < 1e-14
    assert abs(ax.weights("mean").sum() - 1.0) < 1e-14
    with pytest.raises(ValueError):
        Axis("alpha1", 0.0, 1.0, 0.3)  # step does not divide span
    with pytest.raises(ValueError):
        Axis("alpha1", 0.0, 1.2, 0.1)
    with pytest.raises(ValueError):
        Axis("foo", 0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        ax.weights("gauss")


def test_mean_over_constant_and_errors():
    fixed = ControlParams(0.7, 0.6, 0.0, 0.0, 0.0, 0.0)
    grid = angle_grid(0.25)
    val = mean_over(lambda p: 3.25, ("alpha1", "beta2"), grid, fixed)
    assert abs(val - 3.25) < 1e-14
    # linear function integrates exactly under the trapezoid rule
    val = mean_over(lambda p: p.alpha1, ("alpha1",), grid, fixed)
    assert abs(val - 0.5) < 1e-14
    with pytest.raises(ValueError):
        mean_over(lambda p: 1.0, ("lambda_s",), grid, fixed)


def test_std_dev_zero_for_insensitive_function():
    fixed = ControlParams(0.7, 0.6, 0.0, 0.0, 0.0, 0.0)
    grid = angle_grid(0.25)
    assert std_dev(lambda p: p.alpha1, "beta1", grid, fixed) < 1e-14
    assert std_dev(lambda p: p.alpha1, "alpha1", grid, fixed) > 0.0


def test_generic_path_matches_kernel_path(tensor5):
    # the callable quadrature and the batched kernel reductions are two
    # routes to the same grid statistics
    fixed = ControlParams(0.9, 0.8, 0.0, 0.0, 0.0, 0.0)
    grid = angle_grid(0.25)

    def func(p: ControlParams) -> float:
        return concurrence(rho_sr(tensor5, p.sender_state(), p.receiver_state()))

    stats = concurrence_stats(tensor5, 0.9, 0.8, step=0.25)
    generic_mean = mean_over(func, ANGLE_NAMES, grid, fixed)
    assert abs(generic_mean - stats.mean) < 1e-12
    for gamma in ANGLE_NAMES:
        assert abs(std_dev(func, gamma, grid, fixed) - stats.deviations[gamma]) < 1e-12


def test_score_grid_shape_and_clip(tensor5):
    values = score_grid(tensor5, 0.9, 0.8, step=0.25)
    assert values.shape == (5, 5, 5, 5)
    assert np.isfinite(values).all()


def test_witness_range_and_monotonicity(tensor40):
    w_below = witness(tensor40, 0.7, 0.7)
    w_mid = witness(tensor40, 0.85, 0.85)
    w_top = witness(tensor40, 1.0, 1.0)
    assert w_below == 0.0
    assert 0.0 <= w_mid <= 1.0
    assert w_top > w_mid


def test_mean_probability_and_fidelity():
    spec = ChainSpec(12)
    t0 = compute_transfer_tensor(spec, 0.0)
    assert abs(mean_probability(t0) - 1.0) < 1e-12
    assert transfer_fidelity(t0) < 1e-14
    # two-site line: fidelity is sin^2(D t / 2)
    for t in (0.3, 1.1, 2.9):
        t2 = compute_transfer_tensor(ChainSpec(2, coupling=1.5), t)
        assert abs(transfer_fidelity(t2) - np.sin(1.5 * t / 2) ** 2) < 1e-12


def test_mean_probability_consistent_with_entries(tensor40):
    e = tensor40.entries
    by_hand = 2.0 / 3.0 * (
        e[0, 1, 1, 0, 0, 1, 1, 0].real
        + e[1, 0, 1, 0, 1, 0, 1, 0].real
        + e[1, 0, 1, 1, 1, 0, 1, 1].real
        + 0.5 * e[1, 1, 1, 1, 1, 1, 1, 1].real
    )
    assert abs(mean_probability(tensor40) - by_hand) < 1e-15


def test_normalized_curves():
    t = np.linspace(0, 1, 11)
    series = {"t": t, "a": np.sin(np.pi * t) + 0.1, "b": 2 * t + 0.1}
    normalized, maxima = normalized_curves(series)
    assert abs(normalized["a"].max() - 1.0) < 1e-14
    assert abs(normalized["b"][-1] - 1.0) < 1e-14
    assert maxima["b"] == (1.0, pytest.approx(2.1))
    with pytest.raises(ValueError):
        normalized_curves({"t": t, "a": np.zeros(11)})
    with pytest.raises(ValueError):
        normalized_curves({"t": np.array([]), "a": np.array([])})


def test_scalar_field_validation_and_export(tmp_path):
    grid = SweepGrid((Axis("lambda_r", 0, 1, 0.5), Axis("lambda_s", 0, 1, 0.5)))
    with pytest.raises(ValueError):
        ScalarField(grid, np.zeros((2, 3)))
    field = ScalarField(grid, np.arange(9.0).reshape(3, 3), {"quantity": "demo"})
    out = tmp_path / "field.csv"
    field.write_csv(out)
    lines = out.read_text().splitlines()
    assert "# quantity=demo" in lines
    assert "axis1,axis2,value" in lines
    rows = [l for l in lines if not l.startswith("#") and "," in l and "axis" not in l]
    assert len(rows) == 9
    first = rows[0].split(",")
    assert float(first[0]) == 0.0 and float(first[2]) == 0.0


def test_lambda_average_fold_matches_direct(tensor5):
    # the fold relies on exact symmetries; agreement is limited only by
    # roundoff accumulated through the spectral kernel
    folded = lambda_averaged_concurrence(tensor5, 0.25, 0.25, fold=True)
    direct = lambda_averaged_concurrence(tensor5, 0.25, 0.25, fold=False)
    assert abs(folded - direct) < 5e-11


def test_mean_concurrence_symmetries(tensor5):
    # end-swap and lambda reflection leave the grid mean unchanged
    a = mean_concurrence(tensor5, 0.8, 0.65, step=0.25)
    assert abs(a - mean_concurrence(tensor5, 0.65, 0.8, step=0.25)) < 1e-12
    assert abs(a - mean_concurrence(tensor5, 0.2, 0.65, step=0.25)) < 1e-12
    assert abs(a - mean_concurrence(tensor5, 0.8, 0.35, step=0.25)) < 1e-12


def test_quadrature_convergence_of_landscape_mean(tensor40):
    # halving the angle step moves the (1, 1) mean by less than 1e-3
    coarse = mean_concurrence(tensor40, 1.0, 1.0, step=0.05)
    fine = mean_concurrence(tensor40, 1.0, 1.0, step=0.025)
    assert abs(coarse - fine) < 1e-3

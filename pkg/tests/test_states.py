import numpy as np
import pytest

from spinline.chain import ChainSpec, oracle_full_propagator
from spinline.states import (
    ControlParams,
    bloch_x,
    initial_qubit_state,
    receiver_map,
    rho_sr,
    state_from_x,
    trace_out_receiver,
    trace_out_sender,
    unitary_from_angles,
)
from spinline.transfer import compute_transfer_tensor

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=float
)


def random_params(rng):
    v = rng.uniform(0, 1, 6)
    return ControlParams(*v)


def test_unitary_from_angles_examples():
    assert np.abs(unitary_from_angles(0.0, 0.73) - np.eye(2)).max() < 1e-14
    ref = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.abs(unitary_from_angles(1.0, 0.0) - ref).max() < 1e-14
    s = np.sqrt(2) / 2
    ref = np.array([[s, -np.exp(-1j * np.pi / 2) * s],
                    [np.exp(1j * np.pi / 2) * s, s]])
    assert np.abs(unitary_from_angles(0.5, 0.25) - ref).max() < 1e-14
    u = unitary_from_angles(0.37, 0.81)
    assert np.abs(u @ u.conj().T - np.eye(2)).max() < 1e-14
    with pytest.raises(ValueError):
        unitary_from_angles(1.2, 0.0)


def test_initial_qubit_state():
    assert np.abs(initial_qubit_state(0.5, 0.9, 0.4) - np.eye(2) / 2).max() < 1e-14
    assert np.abs(initial_qubit_state(1.0, 0.0, 0.0) - np.diag([1.0, 0.0])).max() < 1e-14
    evals = np.linalg.eigvalsh(initial_qubit_state(0.8, 0.3, 0.1))
    assert np.abs(np.sort(evals) - [0.2, 0.8]).max() < 1e-12
    with pytest.raises(ValueError):
        initial_qubit_state(-0.1, 0.0, 0.0)


def test_bloch_x_examples_and_consistency():
    assert np.allclose(bloch_x(0.5, 0.123, 0.77), (0.5, 0.0, 0.0), atol=1e-14)
    assert np.allclose(bloch_x(0.0, 0.0, 0.4), (1.0, 0.0, 0.0), atol=1e-14)
    assert np.allclose(bloch_x(1.0, 0.5, 0.25), (0.5, 0.0, -0.5), atol=1e-14)
    rng = np.random.default_rng(21)
    for _ in range(25):
        lam, a1, a2 = rng.uniform(0, 1, 3)
        x = bloch_x(lam, a1, a2)
        rho = initial_qubit_state(lam, a1, a2)
        assert np.abs(state_from_x(x) - rho).max() < 1e-12
        assert x.x2**2 + x.x3**2 <= x.x1 * (1 - x.x1) + 1e-12
    with pytest.raises(ValueError):
        bloch_x(0.5, 1.5, 0.0)


def test_control_params_validation():
    with pytest.raises(ValueError):
        ControlParams(0.5, 0.5, 0.5, 0.5, 0.5, 1.01)
    p = ControlParams(0.9, 0.8, 0.3, 0.6, 0.2, 0.7)
    assert np.abs(p.sender_state() - initial_qubit_state(0.9, 0.3, 0.6)).max() == 0.0


def test_rho_sr_product_at_zero():
    tensor = compute_transfer_tensor(ChainSpec(5), 0.0)
    a = initial_qubit_state(0.7, 0.2, 0.9)
    b = initial_qubit_state(0.4, 0.8, 0.1)
    assert np.abs(rho_sr(tensor, a, b) - np.kron(a, b)).max() < 1e-12


def test_rho_sr_is_density_matrix():
    tensor = compute_transfer_tensor(ChainSpec(40), 43.442)
    rng = np.random.default_rng(2)
    for _ in range(100):
        p = random_params(rng)
        rho = rho_sr(tensor, p.sender_state(), p.receiver_state())
        assert abs(np.trace(rho) - 1.0) < 1e-12
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_rho_sr_matches_full_hilbert_oracle():
    n, t = 5, 2.0
    tensor = compute_transfer_tensor(ChainSpec(n), t)
    u = oracle_full_propagator(ChainSpec(n), t)
    rng = np.random.default_rng(4)
    for _ in range(5):
        p = random_params(rng)
        rho_s0, rho_r0 = p.sender_state(), p.receiver_state()
        rho0 = np.kron(rho_s0, np.kron(_tl_ground(n - 2), rho_r0))
        rho_t = u @ rho0 @ u.conj().T
        # trace out the interior sites (positions 2..n-1)
        r = rho_t.reshape(2, 1 << (n - 2), 2, 2, 1 << (n - 2), 2)
        reduced = np.einsum("ambcmd->abcd", r).reshape(4, 4)
        assert np.abs(rho_sr(tensor, rho_s0, rho_r0) - reduced).max() < 1e-10


def _tl_ground(m):
    g = np.zeros((1 << m, 1 << m))
    g[0, 0] = 1.0
    return g


def test_rho_sr_end_swap_symmetry():
    tensor = compute_transfer_tensor(ChainSpec(40), 43.442)
    a = initial_qubit_state(0.85, 0.25, 0.65)
    b = initial_qubit_state(0.35, 0.75, 0.15)
    lhs = SWAP @ rho_sr(tensor, a, b) @ SWAP
    rhs = rho_sr(tensor, b, a)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_receiver_map_identity_time_keeps_own_state():
    tensor = compute_transfer_tensor(ChainSpec(6), 0.0)
    rmap = receiver_map(tensor, 0.8, 0.3, 0.1)
    assert np.abs(rmap.m).max() < 1e-12
    rho_r0 = initial_qubit_state(0.8, 0.3, 0.1)
    y = rmap.apply((0.3, 0.2, 0.1))
    assert abs(y[0] - rho_r0[1, 1].real) < 1e-12
    assert abs(y[1] - rho_r0[0, 1].real) < 1e-12
    assert abs(y[2] - rho_r0[0, 1].imag) < 1e-12


def test_receiver_map_matches_partial_trace():
    tensor = compute_transfer_tensor(ChainSpec(40), 43.442)
    rng = np.random.default_rng(6)
    for _ in range(10):
        p = random_params(rng)
        rmap = receiver_map(tensor, p.lambda_r, p.beta1, p.beta2)
        x = bloch_x(p.lambda_s, p.alpha1, p.alpha2)
        predicted = rmap.receiver_state(x)
        joint = rho_sr(tensor, p.sender_state(), p.receiver_state())
        assert np.abs(predicted - trace_out_sender(joint)).max() < 1e-10


def test_receiver_depends_on_sender_only_through_x():
    tensor = compute_transfer_tensor(ChainSpec(40), 43.442)
    # at lambda_s = 1/2 every angle pair gives x = (1/2, 0, 0)
    rho_a = initial_qubit_state(0.5, 0.3, 0.2)
    rho_b = initial_qubit_state(0.5, 0.7, 0.9)
    rho_r0 = initial_qubit_state(0.8, 0.3, 0.1)
    ra = trace_out_sender(rho_sr(tensor, rho_a, rho_r0))
    rb = trace_out_sender(rho_sr(tensor, rho_b, rho_r0))
    assert np.abs(ra - rb).max() < 1e-12


def test_partial_trace_helpers():
    a = initial_qubit_state(0.7, 0.2, 0.9)
    b = initial_qubit_state(0.4, 0.8, 0.1)
    joint = np.kron(a, b)
    assert np.abs(trace_out_sender(joint) - b).max() < 1e-14
    assert np.abs(trace_out_receiver(joint) - a).max() < 1e-14

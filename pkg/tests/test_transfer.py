import numpy as np
import pytest

from spinline.chain import ChainSpec, oracle_full_propagator
from spinline.states import initial_qubit_state, rho_sr, trace_out_sender
from spinline.transfer import (
    canonical_entries,
    classify_families,
    compute_transfer_tensor,
    read_archive,
    reduced_receiver_tensor,
    tensor_from_dense_propagator,
    validate_tensor,
    write_archive,
)


def tensor40():
    return compute_transfer_tensor(ChainSpec(40), 43.442)


def test_identity_pattern_at_zero():
    t = compute_transfer_tensor(ChainSpec(6), 0.0)
    e = np.zeros((2,) * 8)
    for i1 in range(2):
        for i_n in range(2):
            for j1 in range(2):
                for j_n in range(2):
                    e[i1, i_n, i1, i_n, j1, j_n, j1, j_n] = 1.0
    assert np.abs(t.entries - e).max() < 1e-14


def test_structure_invariants_random_times():
    rng = np.random.default_rng(7)
    spec = ChainSpec(12)
    for t in rng.uniform(0, 80, 8):
        report = compute_transfer_tensor(spec, float(t)).validate()
        assert max(report.values()) < 1e-10


def test_ground_state_entry_is_one():
    rng = np.random.default_rng(9)
    for t in rng.uniform(0, 80, 5):
        t40 = compute_transfer_tensor(ChainSpec(40), float(t))
        assert abs(t40.entry("00000000") - 1.0) < 1e-12


def test_matches_dense_propagator_path():
    rng = np.random.default_rng(1)
    for n in (2, 4, 6):
        spec = ChainSpec(n)
        for t in rng.uniform(0, 30, 3):
            fast = compute_transfer_tensor(spec, float(t)).entries
            dense = tensor_from_dense_propagator(
                oracle_full_propagator(spec, float(t)), n
            )
            assert np.abs(fast - dense).max() < 1e-10


def test_reduced_receiver_tensor_properties():
    tensor = tensor40()
    rho_r0 = initial_qubit_state(0.8, 0.3, 0.1)
    tt = reduced_receiver_tensor(tensor, rho_r0)
    # conjugate symmetry between the two index pairs, real diagonal
    swapped = np.conj(np.transpose(tt, (2, 3, 0, 1)))
    assert np.abs(tt - swapped).max() < 1e-12
    for i_n in range(2):
        for l1 in range(2):
            assert abs(tt[i_n, l1, i_n, l1].imag) < 1e-12
    # sender trace of the joint state is the same contraction
    rho_s0 = initial_qubit_state(0.9, 0.2, 0.7)
    joint = rho_sr(tensor, rho_s0, rho_r0)
    direct = trace_out_sender(joint)
    implied = np.einsum("bcfg,cg->bf", tt, rho_s0)
    assert np.abs(direct - implied).max() < 1e-10


def test_reduced_receiver_tensor_rejects_bad_input():
    tensor = tensor40()
    with pytest.raises(ValueError):
        reduced_receiver_tensor(tensor, np.eye(2))  # trace 2
    bad = np.array([[0.7, 0.4], [0.1, 0.3]])
    with pytest.raises(ValueError):
        reduced_receiver_tensor(tensor, bad)


def test_reduced_tensor_at_zero_keeps_receiver_state():
    tensor = compute_transfer_tensor(ChainSpec(5), 0.0)
    rho_r0 = initial_qubit_state(0.6, 0.4, 0.9)
    tt = reduced_receiver_tensor(tensor, rho_r0)
    for l1 in range(2):
        for k1 in range(2):
            block = tt[:, l1, :, k1]
            if l1 == k1:
                assert np.abs(block - rho_r0).max() < 1e-12
            else:
                assert np.abs(block).max() < 1e-12


def test_family_classification():
    report = classify_families(tensor40())
    fam1, fam2, fam3 = report.families
    assert sorted(name for name, _ in fam1) == ["00000000", "00000110"]
    assert "00010001" in {name for name, _ in fam2}
    assert max(abs(v) for _, v in fam3) == pytest.approx(5.395e-3, abs=5e-4)
    assert report.gap_ratio >= 40.0


def test_canonical_entries_are_orbit_minima():
    entries = canonical_entries(tensor40())
    names = [name for name, _ in entries]
    assert len(names) == len(set(names))
    for name, value in entries:
        assert abs(value) > 1e-12
        swapped = "".join(name[p] for p in (1, 0, 3, 2, 5, 4, 7, 6))
        assert name <= swapped


def test_archive_roundtrip_bit_exact(tmp_path):
    tensor = tensor40()
    path = tmp_path / "t.txt"
    write_archive(tensor, path)
    back = read_archive(path)
    assert back.n_nodes == tensor.n_nodes
    assert back.coupling == tensor.coupling
    assert back.time == tensor.time
    assert back.hamiltonian_kind == tensor.hamiltonian_kind
    assert np.array_equal(back.entries, tensor.entries)
    # a second write produces identical bytes
    path2 = tmp_path / "t2.txt"
    write_archive(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_archive_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("n_nodes: 4\nentries: 0\n")
    with pytest.raises(ValueError):
        read_archive(path)
    tensor = compute_transfer_tensor(ChainSpec(3), 1.0)
    good = tmp_path / "good.txt"
    write_archive(tensor, good)
    text = good.read_text().replace("sender-most-significant", "other")
    bad = tmp_path / "conv.txt"
    bad.write_text(text)
    with pytest.raises(ValueError):
        read_archive(bad)


def test_validate_tensor_flags_violations():
    tensor = tensor40()
    entries = tensor.entries.copy()
    entries[(1, 0, 0, 0, 0, 0, 0, 0)] = 0.5  # breaks the selection rule
    report = validate_tensor(entries)
    assert report["zero_pattern"] >= 0.5

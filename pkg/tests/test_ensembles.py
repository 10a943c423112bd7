import numpy as np
import pytest

from qsteer.ensembles import (
    EnsembleSpec, draw, ginibre_mixed_state, haar_pure_state, real_canonical_lambdas,
    real_canonical_state, sample_ginibre_mixed, sample_haar_pure, sample_real_canonical,
    standard_normals, substream,
)
from qsteer.tensor import bloch_vector, partial_trace


def test_same_seed_and_index_reproduce():
    a = haar_pure_state(3, 7, 42)
    b = haar_pure_state(3, 7, 42)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, haar_pure_state(3, 7, 43).amplitudes)
    assert not np.array_equal(a.amplitudes, haar_pure_state(3, 8, 42).amplitudes)


def test_draw_is_order_independent():
    spec = EnsembleSpec("haar_pure", count=5, seed=3)
    forward = [s.amplitudes for s in sample_haar_pure(spec)]
    assert np.array_equal(draw(spec, 4).amplitudes, forward[4])


def test_box_muller_moments():
    x = standard_normals(substream(1, 0), 200_000)
    assert abs(x.mean()) < 0.01
    assert abs(x.var() - 1) < 0.02
    assert abs(np.mean(x**4) - 3) < 0.1


def test_haar_marginal_bloch_means_vanish():
    spec = EnsembleSpec("haar_pure", count=10_000, seed=11)
    total = np.zeros((3, 3))
    for psi in sample_haar_pure(spec):
        assert abs(np.linalg.norm(psi.amplitudes) - 1) <= 1e-12
        for k, q in enumerate("ABC"):
            total[k] += bloch_vector(partial_trace(psi, q))
    assert np.all(np.abs(total / spec.count) <= 5 / np.sqrt(spec.count))


def test_rank_one_ginibre_is_pure():
    for k in range(20):
        assert ginibre_mixed_state(3, 1, 0, k).purity() == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("rank", [2, 4, 8])
def test_ginibre_rank(rank):
    rho = ginibre_mixed_state(3, rank, 5, 0)
    w = np.linalg.eigvalsh(rho.entries)
    assert np.sum(w > 1e-12) == rank


def test_ginibre_sequence_reproducible():
    spec = EnsembleSpec("ginibre-mixed", count=4, seed=9, rank=4)
    a = [r.entries for r in sample_ginibre_mixed(spec)]
    b = [r.entries for r in sample_ginibre_mixed(spec)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_real_canonical_lambdas():
    for k in range(200):
        lam = real_canonical_lambdas(2, k)
        assert np.all(lam >= 0)
        assert np.sum(lam**2) == pytest.approx(1, abs=1e-12)


def test_real_canonical_state_support():
    psi = real_canonical_state(0, 0)
    lam = real_canonical_lambdas(0, 0)
    amps = psi.amplitudes
    for idx, value in zip((0b000, 0b100, 0b101, 0b110, 0b111), lam):
        assert amps[idx] == pytest.approx(value)
    assert np.allclose(amps[[1, 2, 3]], 0)
    assert len(list(sample_real_canonical(EnsembleSpec("real_canonical", count=3)))) == 3


def test_spec_validation():
    assert EnsembleSpec("haar-pure").kind == "haar_pure"
    assert EnsembleSpec("ginibre_mixed").rank == 8
    with pytest.raises(ValueError):
        EnsembleSpec("gaussian")
    with pytest.raises(ValueError):
        EnsembleSpec("ginibre_mixed", rank=9)
    with pytest.raises(ValueError):
        EnsembleSpec("haar_pure", count=0)
    with pytest.raises(ValueError):
        EnsembleSpec("haar_pure", seed=-1)
    with pytest.raises(ValueError):
        EnsembleSpec("real_canonical", num_qubits=2)

import numpy as np
import pytest
from pydantic import ValidationError

from bbshift.core import LabelDistribution, LabelSpace
from bbshift.core.exceptions import InputDomainError, SupportError
from bbshift.model import Dataset
from bbshift.simulation import (
    SeededRng,
    ShiftKind,
    ShiftSpec,
    apply_knockout,
    dirichlet_shift,
    resample_by_label,
    true_weights,
    tweak_one,
)


def _assert_simplex(dist):
    assert np.all(dist.probs >= 0)
    assert abs(dist.probs.sum() - 1.0) <= 1e-12


def test_seeded_rng_is_reproducible_and_splittable():
    a = SeededRng(42).generator().random(5)
    b = SeededRng(42).generator().random(5)
    np.testing.assert_array_equal(a, b)

    child = SeededRng(42).substream(3)
    assert child.path == (3,)
    np.testing.assert_array_equal(child.generator().random(5), SeededRng(42, (3,)).generator().random(5))
    assert not np.array_equal(child.generator().random(5), SeededRng(42).substream(4).generator().random(5))
    assert not np.array_equal(child.generator().random(5), a)


def test_seeded_rng_rejects_bad_seed():
    with pytest.raises(InputDomainError):
        SeededRng(-1)
    with pytest.raises(InputDomainError):
        SeededRng(2 ** 64)


def test_knockout_examples():
    uniform = LabelDistribution.uniform(LabelSpace(10))
    shifted = apply_knockout(uniform, 5, 0.5)
    assert shifted.probs[5] == pytest.approx(0.05 / 0.95, abs=1e-6)
    assert shifted.probs[0] == pytest.approx(0.1 / 0.95, abs=1e-6)
    _assert_simplex(shifted)

    np.testing.assert_array_equal(apply_knockout(uniform, 5, 0.0).probs, uniform.probs)

    removed = apply_knockout(uniform, 5, 1.0)
    assert removed.probs[5] == 0.0
    np.testing.assert_allclose(np.delete(removed.probs, 5), 1 / 9, atol=1e-15)

    with pytest.raises(InputDomainError):
        apply_knockout(uniform, 10, 0.5)


def test_tweak_one_examples():
    space = LabelSpace(5)
    np.testing.assert_allclose(tweak_one(space, 0, 0.5).probs, [0.5, 0.125, 0.125, 0.125, 0.125])
    np.testing.assert_allclose(tweak_one(space, 2, 0.2).probs, np.full(5, 0.2), atol=1e-15)
    np.testing.assert_array_equal(tweak_one(space, 3, 1.0).probs, [0, 0, 0, 1, 0])
    with pytest.raises(InputDomainError):
        tweak_one(space, -1, 0.5)


@pytest.mark.parametrize("delta", [0.0, 0.1, 0.5, 0.9, 1.0])
def test_knockout_equals_tweak_one_for_two_classes(delta):
    space = LabelSpace(2)
    rho = (0.5 * (1 - delta)) / (1 - 0.5 * delta)
    knocked = apply_knockout(LabelDistribution.uniform(space), 0, delta)
    np.testing.assert_allclose(knocked.probs, tweak_one(space, 0, rho).probs, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.001, 0.1, 1.0, 10.0, 1000.0])
def test_dirichlet_draws_are_on_simplex(alpha):
    space = LabelSpace(10)
    for i in range(20):
        _assert_simplex(dirichlet_shift(space, alpha, SeededRng(i)))


def test_dirichlet_is_deterministic():
    space = LabelSpace(4)
    a = dirichlet_shift(space, 0.5, SeededRng(9))
    b = dirichlet_shift(space, 0.5, SeededRng(9))
    np.testing.assert_array_equal(a.probs, b.probs)
    with pytest.raises(InputDomainError):
        dirichlet_shift(space, 0.0, SeededRng(9))


def test_dirichlet_concentrates_for_large_alpha():
    space = LabelSpace(10)
    root = SeededRng(123)
    close = sum(
        np.max(np.abs(dirichlet_shift(space, 1000.0, root.substream(i)).probs - 0.1)) < 0.05
        for i in range(1000)
    )
    assert close >= 950


def test_shift_spec_validation():
    ShiftSpec(kind="knockout", class_index=1, delta=0.3)
    ShiftSpec(kind=ShiftKind.DIRICHLET, alpha=0.1)
    with pytest.raises(ValidationError):
        ShiftSpec(kind="dirichlet", alpha=0.1, rho=0.3)
    with pytest.raises(ValidationError):
        ShiftSpec(kind="tweak_one", class_index=0)
    with pytest.raises(ValidationError):
        ShiftSpec(kind="knockout", class_index=0, delta=1.5)


def test_shift_spec_source_target_pairs():
    space = LabelSpace(3)
    p, q = ShiftSpec(kind="knockout", class_index=2, delta=0.6).source_target(space, SeededRng(0))
    np.testing.assert_allclose(p.probs, [1 / 2.4, 1 / 2.4, 0.4 / 2.4])
    np.testing.assert_allclose(q.probs, 1 / 3)

    p, q = ShiftSpec(kind="tweak_one", class_index=0, rho=0.8).source_target(space, SeededRng(0))
    np.testing.assert_allclose(p.probs, 1 / 3)
    np.testing.assert_allclose(q.probs, [0.8, 0.1, 0.1])


def test_true_weights():
    p = LabelDistribution(np.array([0.5, 0.25, 0.25]))
    q = LabelDistribution(np.array([0.2, 0.3, 0.5]))
    w = true_weights(p, q)
    np.testing.assert_allclose(w, [0.4, 1.2, 2.0])
    assert abs(p.probs @ w - 1.0) <= 1e-12
    with pytest.raises(SupportError):
        true_weights(LabelDistribution(np.array([1.0, 0.0])), LabelDistribution(np.array([0.5, 0.5])))


@pytest.fixture()
def pool():
    rng = np.random.default_rng(0)
    labels = np.repeat([0, 1, 2], [30, 20, 10])
    features = rng.normal(size=(60, 2)) + labels[:, None] * 5
    return Dataset(features, labels, LabelSpace(3))


def test_resample_one_hot(pool):
    out = resample_by_label(pool, LabelDistribution(np.array([0.0, 0.0, 1.0])), 50, SeededRng(1))
    assert out.n == 50
    assert np.all(out.labels == 2)


def test_resample_frequencies_concentrate(pool):
    q = LabelDistribution.uniform(LabelSpace(3))
    size = 100_000
    out = resample_by_label(pool, q, size, SeededRng(2))
    freq = out.class_counts() / size
    tol = 3 * np.sqrt(q.probs * (1 - q.probs) / size)
    assert np.all(np.abs(freq - q.probs) <= tol)


def test_resample_preserves_class_conditionals(pool):
    out = resample_by_label(pool, LabelDistribution(np.array([0.2, 0.3, 0.5])), 500, SeededRng(3))
    for row, label in zip(out.features, out.labels):
        same_class = pool.features[pool.labels == label]
        assert np.any(np.all(same_class == row, axis=1))


def test_resample_edge_cases(pool):
    empty = resample_by_label(pool, LabelDistribution.uniform(LabelSpace(3)), 0, SeededRng(4))
    assert empty.n == 0 and empty.d == 2

    only_zero = pool.subset(np.flatnonzero(pool.labels == 0))
    with pytest.raises(SupportError):
        resample_by_label(only_zero, LabelDistribution(np.array([0.5, 0.5, 0.0])), 10, SeededRng(5))


def test_resample_is_deterministic(pool):
    q = LabelDistribution(np.array([0.6, 0.3, 0.1]))
    a = resample_by_label(pool, q, 100, SeededRng(8))
    b = resample_by_label(pool, q, 100, SeededRng(8))
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)

"""
BBShift detection tests

Two-sample test oracles, the BBSD decision rule and the weighted-MMD
assumption check.
"""

import itertools
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import quad

from bbshift.core import LabelDistribution, LabelSpace, SourceEval, TargetEval
from bbshift.core.exceptions import (
    ConfigError,
    DegenerateKernelError,
    DimensionMismatchError,
    EmptyInputError,
    InputDomainError,
)
from bbshift.detect import (
    DetectionMethod,
    ShiftReport,
    assumption_check_mmd,
    chi2_two_sample,
    detect_label_shift,
    ks_two_sample,
    reduce_to_hard,
)
from bbshift.detect.two_sample import gammaincc
from bbshift.model import gen_gaussian_mixture
from bbshift.simulation import SeededRng


def _kolmogorov_series(lam, tol=1e-12):
    if lam == 0:
        return 1.0
    total, j = 0.0, 1
    while True:
        term = math.exp(-2.0 * j * j * lam * lam)
        total += (-1) ** (j - 1) * term
        if term < tol:
            break
        j += 1
    return min(max(2.0 * total, 0.0), 1.0)


def _chi2_by_hand(a, b):
    cols = [(x, y) for x, y in zip(a, b) if x + y > 0]
    total = sum(x + y for x, y in cols)
    row_a = sum(x for x, _ in cols)
    row_b = sum(y for _, y in cols)
    stat = 0.0
    for x, y in cols:
        for observed, row in ((x, row_a), (y, row_b)):
            expected = row * (x + y) / total
            stat += (observed - expected) ** 2 / expected
    return stat


def _uniform_ks_distance(p_values):
    p = np.sort(np.asarray(p_values))
    n = p.size
    upper = np.arange(1, n + 1) / n - p
    lower = p - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


# --- Kolmogorov–Smirnov ---------------------------------------------------

def test_ks_identical_samples():
    assert ks_two_sample([1, 2, 3], [1, 2, 3]) == (0.0, 1.0)


def test_ks_disjoint_samples_match_series():
    d, p = ks_two_sample([1, 2, 3], [4, 5, 6])
    assert d == 1.0
    assert p == pytest.approx(_kolmogorov_series(math.sqrt(1.5)), abs=1e-4)
    assert p == pytest.approx(0.0996, abs=1e-4)


def test_ks_classical_critical_value():
    assert _kolmogorov_series(1.36) == pytest.approx(0.05, abs=2e-3)
    a = np.arange(8, dtype=float)
    b = np.array([10.5, 11.5, 12.5, 13.5, 14.5, 5.5, 6.5, 7.5])
    d, p = ks_two_sample(a, b)
    assert 0.0 < d < 1.0
    assert p == pytest.approx(_kolmogorov_series(d * 2.0), abs=1e-10)


def test_ks_is_symmetric():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=37), rng.normal(0.3, 1.0, size=51)
    assert ks_two_sample(a, b) == ks_two_sample(b, a)


def test_ks_p_value_decreases_in_lambda():
    lams = np.linspace(0.0, 3.0, 50)
    ps = [_kolmogorov_series(x) for x in lams]
    assert ps[0] == 1.0
    assert all(q <= p for p, q in zip(ps, ps[1:]))


def test_ks_rejects_empty_and_nan():
    with pytest.raises(EmptyInputError):
        ks_two_sample([], [1.0])
    with pytest.raises(InputDomainError):
        ks_two_sample([np.nan], [1.0])


# --- chi-square ----------------------------------------------------------

def test_chi2_equal_counts():
    assert chi2_two_sample([10, 10], [10, 10]) == (0.0, 1.0)


def test_chi2_two_by_two_example():
    stat, p = chi2_two_sample([50, 50], [90, 10])
    assert stat == pytest.approx(800.0 / 21.0, rel=1e-12)
    assert stat == pytest.approx(_chi2_by_hand([50, 50], [90, 10]), rel=1e-12)
    assert p < 1e-8


def test_chi2_matches_brute_force_tables():
    for k in (2, 3):
        cells = range(0, 13) if k == 2 else range(0, 9)
        for a in itertools.product(cells, repeat=k):
            if not 1 <= sum(a) <= 12:
                continue
            for b in itertools.product(cells, repeat=k):
                if not 1 <= sum(b) or sum(a) + sum(b) > 12:
                    continue
                stat, p = chi2_two_sample(a, b)
                assert stat == pytest.approx(_chi2_by_hand(a, b), rel=1e-9, abs=1e-12)
                assert 0.0 <= p <= 1.0


def test_chi2_drops_empty_categories():
    full = chi2_two_sample([30, 0, 20], [10, 0, 40])
    reduced = chi2_two_sample([30, 20], [10, 40])
    assert full == reduced


def test_chi2_survival_at_critical_value():
    density = lambda x: x ** -0.5 * math.exp(-x / 2.0) / math.sqrt(2.0 * math.pi)
    tail, _ = quad(density, 3.841, np.inf)
    assert tail == pytest.approx(0.05, abs=1e-3)
    assert float(gammaincc(0.5, 3.841 / 2.0)) == pytest.approx(tail, abs=1e-8)


def test_chi2_errors():
    with pytest.raises(EmptyInputError):
        chi2_two_sample([0, 0], [1, 2])
    with pytest.raises(DimensionMismatchError):
        chi2_two_sample([1, 2], [1, 2, 3])
    with pytest.raises(InputDomainError):
        chi2_two_sample([-1, 2], [1, 2])


# --- BBSD ----------------------------------------------------------------

@pytest.mark.parametrize("method", ["chi2", "ks"])
def test_identical_predictions_never_reject(method):
    preds = [0, 1, 2, 2, 1, 0, 0]
    report = detect_label_shift(preds, list(reversed(preds)), alpha=0.5, method=method)
    assert report.p_value == 1.0
    assert report.reject is False


@pytest.mark.parametrize("method", ["chi2", "ks"])
def test_disjoint_predictions_reject(method):
    report = detect_label_shift([0] * 100, [1] * 100, alpha=0.05, method=method)
    assert report.reject is True
    assert report.sample_sizes == (100, 100)
    assert report.method is DetectionMethod(method)


def test_detection_accepts_eval_objects():
    source = SourceEval([0, 1, 1], [0, 1, 0])
    target = TargetEval([[0.2, 0.8], [0.9, 0.1]])
    report = detect_label_shift(source, target, alpha=0.05, space=LabelSpace(2))
    assert report.sample_sizes == (3, 2)


def test_reduce_to_hard_breaks_ties_low():
    np.testing.assert_array_equal(reduce_to_hard([[0.5, 0.5], [0.2, 0.8]]), [0, 1])
    np.testing.assert_array_equal(reduce_to_hard(TargetEval([[0.3, 0.3, 0.4], [0.4, 0.4, 0.2]])), [2, 0])


def test_detection_rejects_bad_inputs():
    with pytest.raises(ConfigError):
        detect_label_shift([0, 1], [0, 1], alpha=1.0)
    with pytest.raises(ConfigError):
        detect_label_shift([0, 1], [0, 1], method="mmd")
    with pytest.raises(EmptyInputError):
        detect_label_shift([], [0, 1])
    with pytest.raises(InputDomainError):
        detect_label_shift([0, 3], [0, 1], space=LabelSpace(2))


def test_report_decision_must_match_p_value():
    with pytest.raises(ValidationError):
        ShiftReport(method="chi2", statistic=1.0, p_value=0.5, alpha=0.05, reject=True, sample_sizes=(1, 1))
    report = ShiftReport.decide("ks", 0.4, 0.01, 0.05, (10, 10))
    assert report.reject is True


def test_null_p_values_are_uniform():
    probs = np.array([0.5, 0.3, 0.2])
    p_values = []
    for r in range(500):
        gen = SeededRng(2024, (r,)).generator()
        source = gen.choice(3, size=1000, p=probs)
        target = gen.choice(3, size=1000, p=probs)
        p_values.append(detect_label_shift(source, target, alpha=0.05, method="chi2").p_value)
    assert _uniform_ks_distance(p_values) < 0.08
    assert 0.01 <= np.mean(np.asarray(p_values) < 0.05) <= 0.10


# --- weighted MMD --------------------------------------------------------

def _two_gaussians(q, n, seed, class0_mean=0.0):
    space = LabelSpace(2)
    means = np.array([[class0_mean], [3.0]])
    return gen_gaussian_mixture(space, 1, means, 1.0, LabelDistribution(np.asarray(q)), n, SeededRng(seed))


def test_mmd_copy_of_source_is_zero():
    scores = np.random.default_rng(0).normal(size=(40, 2))
    labels = np.repeat([0, 1], 20)
    report = assumption_check_mmd(scores, labels, [1.0, 1.0], scores.copy(), bootstrap_reps=100)
    assert report.statistic <= 1e-12
    assert report.reject is False
    assert report.method is DetectionMethod.MMD
    assert report.details["bandwidth"] > 0


def test_mmd_statistic_uses_raw_weights():
    source = np.array([[0.0], [0.5], [1.0], [3.0], [3.5], [4.0]])
    labels = np.array([0, 0, 0, 1, 1, 1])
    target = np.array([[0.2], [2.9], [3.1], [3.8], [4.4]])
    w = np.array([0.5, 2.0])
    report = assumption_check_mmd(source, labels, w, target, bootstrap_reps=100, rng=SeededRng(1))

    pooled = np.vstack([source, target]).ravel()
    pairs = [abs(a - b) for a, b in itertools.combinations(pooled, 2)]
    h = float(np.median(pairs))
    assert report.details["bandwidth"] == pytest.approx(h, rel=1e-12)

    def kernel(a, b):
        return np.exp(-(a.ravel()[:, None] - b.ravel()[None, :]) ** 2 / (2 * h * h))

    omega = w[labels]
    assert omega.sum() != len(labels)
    oracle = (
        omega @ kernel(source, source) @ omega / 36
        - 2 * omega @ kernel(source, target).sum(axis=1) / 30
        + kernel(target, target).sum() / 25
    )
    assert report.statistic == pytest.approx(oracle, rel=1e-10)

    rescaled = omega * len(labels) / omega.sum()
    other = (
        rescaled @ kernel(source, source) @ rescaled / 36
        - 2 * rescaled @ kernel(source, target).sum(axis=1) / 30
        + kernel(target, target).sum() / 25
    )
    assert report.statistic != pytest.approx(other, rel=1e-6)


def test_mmd_is_deterministic_given_rng():
    source = _two_gaussians([0.5, 0.5], 80, 1)
    target = _two_gaussians([0.3, 0.7], 80, 2)
    args = (source.features, source.labels, [0.6, 1.4], target.features)
    a = assumption_check_mmd(*args, bootstrap_reps=100, rng=SeededRng(5))
    b = assumption_check_mmd(*args, bootstrap_reps=100, rng=SeededRng(5))
    assert a == b


@pytest.mark.slow
def test_mmd_accepts_correctly_weighted_label_shift():
    p, q = np.array([0.5, 0.5]), np.array([0.2, 0.8])
    w = q / p
    accepted = 0
    for seed in range(50):
        source = _two_gaussians(p, 200, 2 * seed)
        target = _two_gaussians(q, 200, 2 * seed + 1)
        report = assumption_check_mmd(
            source.features, source.labels, w, target.features, bootstrap_reps=100, rng=SeededRng(seed)
        )
        accepted += report.p_value > 0.05
    assert accepted >= 45


@pytest.mark.slow
def test_mmd_rejects_conditional_shift():
    p, q = np.array([0.5, 0.5]), np.array([0.2, 0.8])
    w = q / p
    rejected = 0
    for seed in range(50):
        source = _two_gaussians(p, 200, 2 * seed)
        target = _two_gaussians(q, 200, 2 * seed + 1, class0_mean=5.0)
        report = assumption_check_mmd(
            source.features, source.labels, w, target.features, bootstrap_reps=100, rng=SeededRng(seed)
        )
        rejected += report.reject
    assert rejected >= 45


def test_mmd_errors():
    scores = np.ones((5, 1))
    with pytest.raises(DegenerateKernelError):
        assumption_check_mmd(scores, [0, 1, 0, 1, 0], [1.0, 1.0], scores, bootstrap_reps=100)
    rng = np.random.default_rng(1)
    x = rng.normal(size=(6, 1))
    with pytest.raises(InputDomainError):
        assumption_check_mmd(x, [0, 1, 0, 1, 0, 1], [1.0, 1.0], x, bootstrap_reps=50)
    with pytest.raises(InputDomainError):
        assumption_check_mmd(x, [0, 1, 0, 1, 0, 1], [-1.0, 1.0], x, bootstrap_reps=100)
    with pytest.raises(DimensionMismatchError):
        assumption_check_mmd(x, [0, 1, 0], [1.0, 1.0], x, bootstrap_reps=100)
    with pytest.raises(DimensionMismatchError):
        assumption_check_mmd(x, [0, 1, 0, 1, 0, 1], [1.0, 1.0], rng.normal(size=(4, 2)), bootstrap_reps=100)

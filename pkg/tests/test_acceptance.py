"""Acceptance gate: thirteen criteria, one pass/fail line each.

Fixtures reproduce the desk preset of the CLI under root seed 0: N = 4,
q_max = 8, 2000 states per random subset split half/half into train and
test, six squeezing trajectories of 500 steps for the generalization
set, and 500-epoch training with batch size 100. Expect a few minutes
for dataset generation plus training on first use.
"""

import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from wehrlgme.accel import e_algorithm, power_ansatz
from wehrlgme.cli import PRESETS
from wehrlgme.dataset import gen_squeezed, gen_uniform, generate_subsets, split_dataset
from wehrlgme.gme import dicke_gme, gme_reference, max_gme_check
from wehrlgme.metrics import evaluate_method, fit_inverse_qmax
from wehrlgme.mlp import TrainConfig, backward, batch_loss, init_model, train
from wehrlgme.moments import (dicke_moment, laplace_residuals, moments_dicke,
                              moments_permanent, moments_quadrature)
from wehrlgme.states import (BlochDirection, SymmetricState, coherent_state,
                             dicke_state, ghz_state)


def random_state(rng, n):
    d = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return SymmetricState.from_dicke(d)


def random_direction(rng):
    return BlochDirection(math.acos(rng.uniform(-1.0, 1.0)),
                          rng.uniform(0.0, 2.0 * math.pi))


@pytest.fixture(scope="module")
def desk():
    sizes = {"uniform": 2000, "degenerate": 2000, "ghz_dicke": 2000}
    records = generate_subsets(sizes, 4, seed=0, q_max=8)
    train_recs, test_recs = split_dataset(records, seed=0)
    squeezed = gen_squeezed(6, 4, seed=0, steps=500, dt=0.1, q_max=8)
    return {"train": train_recs, "test": test_recs, "squeezed": squeezed}


@pytest.fixture(scope="module")
def models(desk):
    cfg = TrainConfig(batch_size=PRESETS["desk"]["batch_size"],
                      epochs=PRESETS["desk"]["epochs"], seed=0)
    return {q: train(desk["train"], q, cfg)[0] for q in (3, 4)}


@pytest.fixture(scope="module")
def ratio_reports(desk):
    return {q: evaluate_method(desk["test"], "ratio", q)
            for q in range(2, 9)}


@pytest.fixture(scope="module")
def accel_reports(desk):
    return {q: evaluate_method(desk["test"], "accel", q)
            for q in range(3, 9)}


def test_criterion_01_moment_normalization():
    rng = np.random.default_rng(0)
    for n in range(2, 11):
        for _ in range(100):
            seq = moments_dicke(random_state(rng, n), 2)
            assert abs(seq.moments[0] - 1.0 / (n + 1)) < 1e-12


def test_criterion_02_three_route_equivalence():
    rng = np.random.default_rng(1)
    for n in range(2, 7):
        for _ in range(50):
            state = random_state(rng, n)
            a = moments_dicke(state, 6).moments
            b = moments_quadrature(state, 6).moments
            assert np.allclose(a, b, rtol=1e-9, atol=0.0)
    pytest.importorskip("gmpy2")  # double precision cannot hold 1e-9 here
    for n in (2, 3, 4, 6):
        q_cap = 24 // n
        for _ in range(3):
            state = random_state(rng, n)
            a = moments_permanent(state, q_cap).moments
            b = moments_dicke(state, q_cap).moments
            assert np.allclose(a, b, rtol=1e-9, atol=0.0)


def test_criterion_03_closed_forms_and_bound(desk):
    for n in range(1, 9):
        for k in range(n + 1):
            for q in range(1, 9):
                exact = Fraction(math.comb(n, k) ** q,
                                 (n * q + 1) * math.comb(n * q, k * q))
                assert dicke_moment(n, k, q) == \
                    pytest.approx(float(exact), rel=1e-10)
    rng = np.random.default_rng(3)
    qs = np.arange(1, 9)
    for n in range(1, 9):
        seq = moments_dicke(coherent_state(n, random_direction(rng)), 8)
        assert np.allclose(seq.moments, 1.0 / (n * qs + 1), rtol=1e-10)
    records = desk["train"] + desk["test"] + desk["squeezed"]
    w = np.array([r.moments.moments for r in records])
    gme = np.array([r.gme for r in records])
    gaps = 1.0 / (4 * qs + 1)[None, :] - w
    assert gaps.min() >= -1e-12
    # q = 1 saturates for every state (W^(1) is state independent), so
    # the equality-iff-coherent statement starts at q = 2
    near_equality = gaps[:, 1:].min(axis=1) < 1e-12
    assert near_equality.any()  # multiplicity-4 degenerate states
    assert np.all(gme[near_equality] <= 1e-8)


def test_criterion_04_hoelder_chain(desk):
    records = desk["train"] + desk["test"] + desk["squeezed"]
    w1 = np.array([r.moments.moments[0] for r in records])
    ratios = np.array([r.moments.ratios for r in records])
    gme = np.array([r.gme for r in records])
    s = np.column_stack([w1, ratios])  # S(1) through S(8)
    assert np.diff(s, axis=1).min() >= -1e-10
    assert np.all(1.0 - s >= gme[:, None] - 1e-9)


def test_criterion_05_gme_oracle():
    for n in range(2, 11):
        for k in range(n + 1):
            est = gme_reference(dicke_state(n, k))
            assert est.value == pytest.approx(dicke_gme(n, k), abs=1e-8)
            assert max_gme_check(n, est.value)
    rng = np.random.default_rng(5)
    for n in range(2, 9):
        est = gme_reference(coherent_state(n, random_direction(rng)))
        assert est.value <= 1e-10
    for n in range(2, 7):
        est = gme_reference(ghz_state(n))
        assert est.value == pytest.approx(0.5, abs=1e-8)
        assert max_gme_check(n, est.value)


def test_criterion_06_e_algorithm_exactness():
    rng = np.random.default_rng(6)
    for _ in range(100):
        k = int(rng.integers(1, 6))
        limit = float(rng.uniform(-5.0, 5.0))
        coeffs = rng.uniform(-3.0, 3.0, k)
        f = [limit + sum(c / q ** (i + 1) for i, c in enumerate(coeffs))
             for q in range(2, k + 3)]
        assert e_algorithm(f, power_ansatz(k), k) == \
            pytest.approx(limit, abs=1e-10)


def test_criterion_07_gradient_check():
    model = init_model(4, seed=3, hidden=(6, 5))
    rng = np.random.default_rng(7)
    # nonzero biases keep the check at a generic point; with zero biases
    # a sample that kills a whole layer parks the next layer's
    # pre-activations exactly on the ReLU kink, where central
    # differences and the subgradient legitimately disagree
    for b in model.biases:
        b[:] = rng.uniform(0.05, 0.2, b.shape)
    x = rng.uniform(0.1, 0.9, (4, 3))
    y = rng.uniform(0.0, 0.8, 4)
    h = x
    for i, (wmat, bvec) in enumerate(zip(model.weights, model.biases)):
        z = h @ wmat + bvec
        assert np.abs(z).min() > 1e-4  # step 1e-6 cannot cross a kink
        h = z if i == len(model.weights) - 1 else np.maximum(z, 0.0)
    _, gw, gb = backward(model, x, y)
    step = 1e-6
    worst = 0.0
    for params, grads in ((model.weights, gw), (model.biases, gb)):
        for layer, grad in enumerate(grads):
            for idx in np.ndindex(grad.shape):
                p0 = params[layer][idx]
                params[layer][idx] = p0 + step
                hi = batch_loss(model, x, y)
                params[layer][idx] = p0 - step
                lo = batch_loss(model, x, y)
                params[layer][idx] = p0
                fd = (hi - lo) / (2.0 * step)
                worst = max(worst, abs(grad[idx] - fd) / max(abs(fd), 1e-8))
    assert worst < 1e-5


def test_criterion_08_laplace_scaling():
    qs = np.arange(20, 31)
    for rec in gen_uniform(20, 4, seed=123, q_max=2):
        state = SymmetricState.from_dicke(rec.dicke)
        vals = laplace_residuals(state, qs)
        spread = (vals.max() - vals.min()) / vals.mean()
        assert spread < 0.10


def test_criterion_09_ratio_mre(ratio_reports):
    qs = list(range(2, 9))
    mres = [ratio_reports[q].mre for q in qs]
    assert ratio_reports[8].mre > 0.10
    assert all(b < a for a, b in zip(mres, mres[1:]))
    c = fit_inverse_qmax(qs, mres)
    for q, m in zip(qs, mres):
        assert 0.5 * c / q <= m <= 2.0 * c / q


def test_criterion_10_accel_mre(ratio_reports, accel_reports):
    assert 0.04 <= accel_reports[3].mre <= 0.20
    for q in range(3, 9):
        assert accel_reports[q].mre < ratio_reports[q].mre


def test_criterion_11_ann_mre(desk, models, accel_reports):
    report = evaluate_method(desk["test"], "ann", 3, models=models)
    assert report.mre < 0.05
    assert report.mre < accel_reports[3].mre


def test_criterion_12_ann_generalization(desk, models):
    main = evaluate_method(desk["test"], "ann", 4, models=models)
    squeezed = evaluate_method(desk["squeezed"], "ann", 4, models=models)
    assert squeezed.mre <= 2.5 * main.mre


def test_criterion_13_full_scale_preset_documented():
    assert PRESETS["desk"] == {"per_subset": 2000, "epochs": 500,
                               "batch_size": 100, "squeezed_total": 3000}
    assert PRESETS["paper"] == {"per_subset": 20000, "epochs": 5000,
                                "batch_size": 500, "squeezed_total": 30000}
    readme = (Path(__file__).resolve().parent.parent / "README.md").read_text()
    assert "--preset paper" in readme
    assert "--preset desk" in readme

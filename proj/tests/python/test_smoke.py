# Copyright 2026 The nimc Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import nimc


def small_problem(seed=0, n1=8, n2=7, alpha=10.0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n1, n2))
    w = (rng.random((n1, n2)) < 0.6).astype(float)
    return nimc.Problem(x, w, alpha), x, w


def test_pair_terms():
    assert nimc.pair_loss(1.0, 1.0, 0.3, -0.2) == pytest.approx(math.log(2.0))
    assert nimc.pair_weight(0.0, 0.0, 10.0) == 0.0


def test_loss_gradient_finite_difference():
    p, _, _ = small_problem(1)
    m = np.random.default_rng(2).standard_normal(p.shape)
    g = p.gradient(m)
    h = 1e-5
    for i, j in [(0, 0), (3, 2), (7, 6)]:
        e = np.zeros(p.shape)
        e[i, j] = h
        fd = (p.loss(m + e) - p.loss(m - e)) / (2 * h)
        assert abs(g[i, j] - fd) <= 1e-5 * max(abs(fd), 1e-3)


def test_shift_invariance_and_seminorm():
    p, _, _ = small_problem(3)
    m = np.random.default_rng(4).standard_normal(p.shape)
    assert p.loss(nimc.shift(m, 2.5)) == pytest.approx(p.loss(m), rel=1e-12)
    assert p.seminorm_sq(np.full(p.shape, 3.0)) == 0.0


def test_prox_operators():
    a = np.random.default_rng(5).standard_normal((6, 5))
    s = nimc.svt(a, 0.5)
    sv = np.linalg.svd(a, compute_uv=False)
    assert np.allclose(np.linalg.svd(s, compute_uv=False), np.maximum(sv - 0.5, 0.0), atol=1e-12)
    r = nimc.prox_nuclear_box(2 * a, 0.5, 0.4)
    assert np.abs(r["x"]).max() <= 0.4
    assert not r["fast_path"]
    assert np.array_equal(nimc.clip(a, 0.1), np.clip(a, -0.1, 0.1))
    assert nimc.nuclear_norm(a) == pytest.approx(sv.sum(), rel=1e-12)


def test_fit_and_transform():
    inst = nimc.sample_instance(n1=30, n2=30, dgp="dgp2", seed=7)
    assert 0.0 < inst["observed_fraction"] < 1.0
    p = nimc.Problem(inst["values"], inst["mask"], 10.0)
    lam = 0.3 * p.lambda_max()
    fista = p.fit("rcu_fista", lam=lam, max_iter=30)
    pgd = p.fit("rcu_pgd", lam=lam, max_iter=30, check_descent=False)
    assert fista["m_hat"].shape == (30, 30)
    assert len(fista["objectives"]) == fista["iterations"] + 1
    assert pgd["objectives"][-1] <= pgd["objectives"][0]
    base = p.fit("baseline_sq", lam=0.5 * p.lambda_max("baseline_sq"), max_iter=30)
    assert nimc.rmse(base["m_hat"], inst["m_true"]) >= 0.0
    t = nimc.identify_shift(fista["m_hat"])
    assert np.allclose(t["transformed"], fista["m_hat"] + t["c_hat"])
    assert t["nuclear_at_c"] <= nimc.nuclear_norm(fista["m_hat"]) + 1e-9
    assert isinstance(nimc.b_diagnostic(fista["m_hat"], 3), float)


def test_rank_metrics_and_errors():
    m = np.array([[3.0, 1.0, 2.0]])
    assert nimc.rank_metrics(m, [(0, 0, 1.0)])[0] == 0.0
    assert nimc.rank_metrics(m, [(0, 1, 1.0)])[0] == 1.0
    assert nimc.rank_metrics(np.ones((3, 3)), [(1, 1, 2.0)]) == (0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        nimc.rank_metrics(m, [(0, 0, 0.0)])
    with pytest.raises(ValueError):
        nimc.Problem(np.ones((2, 2)), np.ones((2, 3)))
    with pytest.raises(ValueError):
        nimc.Problem(np.ones((2, 2)), np.ones((2, 2)), alpha=-1.0)


def test_fista_sequence():
    t = nimc.fista_t_sequence(3)
    assert t[0] == 1.0
    assert t[1] == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)

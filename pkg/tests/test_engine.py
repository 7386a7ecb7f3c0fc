import dataclasses
import math

import numpy as np
import pytest

from dlsgd.engine import (
    DivergenceError,
    StepSizeRule,
    Trace,
    column_mean,
    consensus_distance,
    default_record_stride,
    min_beta,
    mix_columns,
    run,
    step_size,
)
from dlsgd.objectives import quadratic_problem
from dlsgd.schedule import every_step, final_only, fixed_interval, varying_interval
from dlsgd.topology import MixingMatrix, gen_complete, gen_erdos_renyi, gen_path, metropolis_weights


# ---------------------------------------------------------------------------
# step sizes


def test_step_size_values():
    assert step_size(StepSizeRule(mu=1.0, beta=1.0), 0) == 2.0
    assert step_size(StepSizeRule(mu=0.05, beta=1.0), 0) == 40.0


def test_step_size_strictly_decreasing():
    rule = StepSizeRule(mu=0.3, beta=7.0)
    values = [step_size(rule, t) for t in range(50)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_step_size_rejects_negative_t():
    with pytest.raises(ValueError):
        step_size(StepSizeRule(mu=1.0, beta=1.0), -1)


def test_step_size_rule_validation():
    with pytest.raises(ValueError):
        StepSizeRule(mu=0.0, beta=1.0)
    with pytest.raises(ValueError):
        StepSizeRule(mu=1.0, beta=0.5)


def test_min_beta_log_term_vanishes():
    assert min_beta(1.0, 0.0, 5, 100) == 2.0


def test_min_beta_direct_formula():
    expect = 9.0 * 15.0 * math.log(1.0 + 2000.0 / 2.0) + 2.0 * (1.0 + 15.0 / 20.0)
    assert min_beta(1.0, 15.0, 20, 2000) == pytest.approx(expect, rel=1e-15)
    assert min_beta(1.0, 15.0, 20, 2000) == pytest.approx(936.2, abs=0.1)


def test_min_beta_kappa_squared_branch():
    assert min_beta(2.0, 0.0, 3, 50) == 8.0


# ---------------------------------------------------------------------------
# column helpers


def test_column_mean_exact_on_equal_columns():
    v = np.random.default_rng(0).standard_normal(7)
    X = np.repeat(v[:, None], 20, axis=1)
    assert np.array_equal(column_mean(X), v)


def test_consensus_distance_cases():
    assert consensus_distance(np.ones((3, 4))) == 0.0
    X = np.array([[0.0, 2.0]])
    assert consensus_distance(X) == pytest.approx(1.0)


def test_mix_columns_preserves_average():
    rng = np.random.default_rng(3)
    w = metropolis_weights(gen_erdos_renyi(9, 0.4, seed=1))
    X = rng.standard_normal((5, 9))
    assert np.abs(column_mean(mix_columns(X, w.w)) - column_mean(X)).max() <= 1e-12


def test_mix_columns_rank_one_gives_exact_consensus():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((5, 6))
    mixed = mix_columns(X, np.full((6, 6), 1.0 / 6.0))
    assert consensus_distance(mixed) == 0.0


def test_mix_columns_matches_matrix_product():
    rng = np.random.default_rng(5)
    w = metropolis_weights(gen_path(7))
    X = rng.standard_normal((4, 7))
    assert np.allclose(mix_columns(X, w.w), X @ w.w, rtol=0, atol=1e-12)


# ---------------------------------------------------------------------------
# the run loop


def quick_run(n=4, d=3, T=40, c1=0.4, c2=0.2, beta=3.0, sched=None, seed=0, **kw):
    p = quadratic_problem(d, c1, c2)
    w = metropolis_weights(gen_path(n))
    s = sched if sched is not None else fixed_interval(T, 5)
    return run(p, w, s, StepSizeRule(mu=p.mu, beta=beta), T, seed, **kw), p, w, s


def test_run_validates_horizon_mismatch():
    p = quadratic_problem(3, 0.0, 0.0)
    w = metropolis_weights(gen_path(2))
    with pytest.raises(ValueError):
        run(p, w, every_step(5), StepSizeRule(mu=1.0, beta=2.0), T=6, seed=0)


def test_run_rejects_negative_seed():
    p = quadratic_problem(3, 0.0, 0.0)
    w = metropolis_weights(gen_path(2))
    with pytest.raises(ValueError):
        run(p, w, every_step(5), StepSizeRule(mu=1.0, beta=2.0), T=5, seed=-1)


def test_trace_grid_and_comm_counts():
    for s in (every_step(30), final_only(30), fixed_interval(30, 7), varying_interval(30, 5)):
        trace, *_ = quick_run(T=30, sched=s)
        assert trace.t[0] == 0 and trace.t[-1] == 30
        assert trace.comms[-1] == s.comm_count
        assert (np.diff(trace.comms) >= 0).all()


def test_record_stride():
    trace, *_ = quick_run(T=40, record_every=15)
    assert list(trace.t) == [0, 15, 30, 40]
    assert default_record_stride(2000) == 1
    assert default_record_stride(100_000) == 100


def test_run_deterministic():
    a, *_ = quick_run(seed=11)
    b, *_ = quick_run(seed=11)
    assert np.array_equal(a.gap, b.gap)
    assert np.array_equal(a.consensus, b.consensus)
    assert np.array_equal(a.grad_sq, b.grad_sq)
    c, *_ = quick_run(seed=12)
    assert not np.array_equal(a.gap, c.gap)


def test_single_worker_matches_serial_sgd_bitwise():
    d, T, seed = 4, 60, 5
    p = quadratic_problem(d, 1.5, 0.25)
    w = metropolis_weights(gen_path(1))
    rule = StepSizeRule(mu=1.0, beta=3.0)
    states = []
    trace = run(p, w, every_step(T), rule, T, seed, step_hook=lambda t, X: states.append(X.copy()))

    x = p.x0.copy()
    rng = np.random.default_rng((seed, 0))
    for t in range(T):
        x = x - step_size(rule, t) * p.stoch_gradient(x, rng)
        assert np.array_equal(states[t][:, 0], x)
    assert trace.gap[-1] == p.value(x) - p.f_star


def test_zero_noise_workers_stay_bitwise_equal():
    for sched in (every_step(50), fixed_interval(50, 7), varying_interval(50, 9), final_only(50)):
        equal = []
        quick_run(n=5, T=50, c1=0.0, c2=0.0, sched=sched,
                  step_hook=lambda t, X: equal.append(bool((X == X[:, :1]).all())))
        assert all(equal)


def test_zero_noise_follows_deterministic_recursion():
    d, T = 6, 30
    trace, p, _, _ = quick_run(n=4, d=d, T=T, c1=0.0, c2=0.0, beta=3.0)
    prod = 1.0
    for t in range(T):
        prod *= 1.0 - step_size(StepSizeRule(mu=1.0, beta=3.0), t)
    expect = 0.5 * d * prod**2  # F(x) = ||x||^2/2 from x0 = ones
    assert trace.gap[-1] == pytest.approx(expect, rel=1e-12)


def test_zero_noise_gap_monotone_once_step_below_one():
    trace, *_ = quick_run(n=3, T=50, c1=0.0, c2=0.0, beta=3.0, sched=fixed_interval(50, 4))
    assert (np.diff(trace.gap) <= 1e-15).all()


def test_uniform_averaging_matches_minibatch_oracle():
    n, d, T, seed = 8, 5, 300, 21
    p = quadratic_problem(d, 0.5, 0.2)
    w = MixingMatrix.from_dense(np.full((n, n), 1.0 / n))
    rule = StepSizeRule(mu=1.0, beta=3.0)
    means = []
    run(p, w, every_step(T), rule, T, seed, step_hook=lambda t, X: means.append(column_mean(X)))

    x = p.x0.copy()
    streams = [np.random.default_rng((seed, i)) for i in range(n)]
    for t in range(T):
        grads = np.stack([p.stoch_gradient(x, streams[i]) for i in range(n)], axis=1)
        x = x - step_size(rule, t) * grads.mean(axis=1)
        assert np.allclose(means[t], x, rtol=1e-9, atol=1e-12)


def test_mean_iterate_identity():
    n, d, T, seed = 6, 4, 120, 9
    p = quadratic_problem(d, 2.0, 0.5)
    w = metropolis_weights(gen_erdos_renyi(n, 0.5, seed=2))
    rule = StepSizeRule(mu=1.0, beta=4.0)
    log = []

    base_block = p.stoch_gradient_block

    def recording_block(X, rngs):
        G = base_block(X, rngs)
        log.append((column_mean(X), G.mean(axis=1)))
        return G

    p_rec = dataclasses.replace(p, stoch_gradient_block=recording_block)
    means = []
    run(p_rec, w, fixed_interval(T, 11), rule, T, seed,
        step_hook=lambda t, X: means.append(column_mean(X)))
    for t in range(T):
        xbar_t, gbar_t = log[t]
        expect = xbar_t - step_size(rule, t) * gbar_t
        assert np.abs(means[t] - expect).max() <= 1e-12


def test_consensus_zero_after_complete_graph_round():
    # metropolis weights of a complete graph are exactly uniform averaging
    n, T = 8, 12
    p = quadratic_problem(3, 1.0, 0.4)
    w = metropolis_weights(gen_complete(n))
    trace = run(p, w, fixed_interval(T, 3), StepSizeRule(mu=1.0, beta=3.0), T, 7)
    for idx, t in enumerate(trace.t):
        if t in (3, 6, 9, 12):
            assert trace.consensus[idx] == 0.0
        elif t > 0:
            assert trace.consensus[idx] > 0.0


def test_divergence_guard_reports_step():
    p = quadratic_problem(3, 0.0, 0.0)
    w = metropolis_weights(gen_path(2))
    rule = StepSizeRule(mu=1e-7, beta=1.0)  # eta_0 = 2e7 blows the norm guard
    with pytest.raises(DivergenceError) as exc:
        run(p, w, every_step(10), rule, 10, 0)
    assert exc.value.step >= 1


def test_initial_record_and_gap0():
    trace, p, _, _ = quick_run(d=5, T=10)
    assert trace.t[0] == 0
    assert trace.gap[0] == pytest.approx(p.value(p.x0) - p.f_star)
    assert trace.consensus[0] == 0.0
    assert trace.comms[0] == 0


def test_trace_csv_format():
    trace, *_ = quick_run(T=10)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "t,gap,consensus,grad_sq,comms,seed"
    assert len(lines) == len(trace.t) + 1
    first = lines[1].split(",")
    assert first[0] == "0" and first[5] == "0"
    assert float(first[1]) == trace.gap[0]


def test_grad_sq_recorded():
    trace, p, _, _ = quick_run(d=5, T=10, c1=0.0, c2=0.0)
    # all workers at x0 = ones at t = 0: (1/n) sum ||grad||^2 = ||ones||^2 = d
    assert trace.grad_sq[0] == pytest.approx(5.0)


def test_trace_fields_are_arrays():
    trace, *_ = quick_run(T=10)
    assert isinstance(trace, Trace)
    assert trace.t.dtype.kind == "i" and trace.comms.dtype.kind == "i"

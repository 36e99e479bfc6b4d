"""Smoke tests for the python module: imports, basic math against pure-python
references, environment determinism, and a miniature training run."""

import cmath
import json
import math

import pytest

import risfl


def test_channel_draw_statistics():
    rng = risfl.Rng(7)
    params = risfl.ChannelParams()
    params.ref_path_loss_db = -30.0
    params.distance_m = 1.0
    params.path_loss_exp = 2.2
    params.rician_k = 0.0
    power = 0.0
    n = 20000
    for _ in range(n):
        (h,) = risfl.draw_channel(params, 1, rng)
        power += abs(h) ** 2
    assert power / n == pytest.approx(1e-3, rel=0.05)


def test_effective_gain_matches_python_loop():
    rng = risfl.Rng(3)
    m = 6
    rx = [complex(rng.uniform() - 0.5, rng.uniform() - 0.5) for _ in range(m)]
    tx = [complex(rng.uniform() - 0.5, rng.uniform() - 0.5) for _ in range(m)]
    ris = risfl.RisConfig()
    ris.phases = [rng.uniform() * 2 * math.pi for _ in range(m)]
    direct = complex(0.25, -0.5)

    got = risfl.effective_gain(rx, ris, tx, direct)
    want = sum(rx[i].conjugate() * cmath.exp(1j * ris.phases[i]) * tx[i] for i in range(m))
    want += direct
    assert got == pytest.approx(want, rel=1e-12)


def test_co_phasing_is_at_least_as_good_as_random():
    rng = risfl.Rng(9)
    m = 4
    rx = [complex(rng.uniform() - 0.5, rng.uniform() - 0.5) for _ in range(m)]
    tx = [complex(rng.uniform() - 0.5, rng.uniform() - 0.5) for _ in range(m)]
    best = risfl.optimal_single_link_phases(rx, tx, 0j)
    best_gain = abs(risfl.effective_gain(rx, best, tx, 0j))
    for _ in range(500):
        ris = risfl.RisConfig()
        ris.phases = [rng.uniform() * 2 * math.pi for _ in range(m)]
        assert abs(risfl.effective_gain(rx, ris, tx, 0j)) <= best_gain * (1 + 1e-12)


def test_bound_value_formula():
    p = risfl.ConvergenceParams()
    p.mu, p.delta, p.f0, p.f_star, p.rounds = 1.0, 0.1, 1.0, 0.0, 9
    k, a = 5, 2
    want = 2 * p.mu * (p.f0 - p.f_star) / (p.rounds + 1) + 2 * p.delta
    want += 2 * p.delta * (k - 2 * a) / a**2 * a
    assert risfl.bound_value(p, k, a) == pytest.approx(want, rel=1e-12)
    assert risfl.min_participants(p, k) is not None


def test_min_participants_inverts_epsilon_helper():
    p = risfl.ConvergenceParams()
    for target in (1, 2, 3, 4, 5):
        p.epsilon = risfl.epsilon_for_min_participants(p, 5, target)
        assert risfl.min_participants(p, 5) == target


def test_run_toy_fl_obeys_the_bound():
    rng = risfl.Rng(4)
    task = risfl.make_toy_task(5, 8, rng)
    p = risfl.ConvergenceParams()
    p.mu = task.mu()
    p.delta = task.delta_bound()
    p.f0 = task.loss(task.w0)
    p.f_star = task.f_star()
    p.rounds = 100
    p.alpha_fl = 1.0 / p.mu
    trace = risfl.run_toy_fl(task, p, 2, 17)
    assert len(trace) == 101
    assert sum(trace) / len(trace) <= risfl.bound_value(p, 5, 2)


def test_environment_shapes_and_determinism():
    cfg = json.loads(risfl.default_config_json())
    cfg["scenario"]["ris_elements"] = 8
    cfg["run"]["episode_steps"] = 5
    text = json.dumps(cfg)

    e1 = risfl.Environment(text, "td3", 3)
    e2 = risfl.Environment(text, "td3", 3)
    assert e1.state_dim == 11
    assert e1.action_dim == 18
    s1, s2 = e1.reset(), e2.reset()
    assert s1 == s2

    action = [0.3] * e1.action_dim
    o1, o2 = e1.step(action), e2.step(action)
    assert o1["reward"] == o2["reward"]
    assert o1["reward"] <= 0.0
    assert math.isfinite(o1["reward"])
    assert o1["reward"] == pytest.approx(-o1["latency_s"] - o1["penalty"], rel=1e-12)


def test_decode_action_budget_constraint():
    out = risfl.decode_action([1.0] * 5 + [0.8] * 5 + [0.0] * 4, 5, 4)
    assert out["selection"] == [1] * 5
    assert sum(out["bandwidth"]) < 1.0
    assert out["clipped"] == 0
    shares = [b for b in out["bandwidth"]]
    assert all(b == pytest.approx(shares[0], rel=1e-12) for b in shares)


def test_config_validation_errors():
    cfg = json.loads(risfl.default_config_json())
    cfg["scenario"]["noise_bs_w"] = -1.0
    with pytest.raises(ValueError, match="noise_bs_w"):
        risfl.validate_config(json.dumps(cfg))
    cfg2 = json.loads(risfl.default_config_json())
    cfg2["scenario"]["devicez"] = 5
    with pytest.raises(ValueError, match="devicez"):
        risfl.validate_config(json.dumps(cfg2))
    # hash is stable across dumps
    assert risfl.config_hash(risfl.default_config_json()) == risfl.config_hash(
        risfl.default_config_json()
    )


def test_miniature_training_run(tmp_path):
    cfg = json.loads(risfl.default_config_json())
    cfg["scenario"]["devices"] = 3
    cfg["scenario"]["ris_elements"] = 2
    cfg["agent"]["actor_hidden"] = [16, 16]
    cfg["agent"]["critic_hidden"] = [32, 32]
    cfg["agent"]["warmup_steps"] = 20
    cfg["run"]["episodes"] = 2
    cfg["run"]["episode_steps"] = 20
    cfg["run"]["eval_episodes"] = 1
    text = json.dumps(cfg)

    ckpt = str(tmp_path / "agent.bin")
    out = risfl.run_scheme(text, "td3", 1, ckpt)
    assert len(out["episode_rewards"]) == 2
    assert out["eval_mean_latency_s"] > 0.0
    assert (tmp_path / "agent.bin").exists()

    again = risfl.run_scheme(text, "td3", 1)
    assert again["episode_rewards"] == out["episode_rewards"]


def test_exhaustive_solver_tiny_instance():
    cfg = json.loads(risfl.default_config_json())
    cfg["scenario"]["devices"] = 3
    cfg["scenario"]["ris_elements"] = 2
    cfg["convergence"]["epsilon"] = 0.5
    out = risfl.exhaustive_solve(json.dumps(cfg), seed=2, phase_levels=8, bandwidth_points=6)
    assert out["enumerated"] > 0
    if out["feasible"]:
        assert out["latency_s"] > 0.0
        assert sum(out["selection"]) >= 1


def test_mlp_checkpoint_roundtrip(tmp_path):
    net = risfl.Mlp([4, 8, 2], tanh_output=True, seed=3)
    x = [0.1, -0.2, 0.3, -0.4]
    y = net.forward(x)
    path = str(tmp_path / "net.bin")
    net.save(path)
    loaded = risfl.Mlp.load(path)
    assert loaded.forward(x) == y
    assert all(abs(v) <= 1.0 for v in y)

import math

import pytest

import aoilab


def test_defaults_and_validation():
    cfg = aoilab.load_config("")
    assert cfg.sim.num_ues == 10
    assert cfg.sim.num_sensors == 15
    assert cfg.reward.sync_discount == pytest.approx(0.9)
    with pytest.raises(ValueError, match="ue_request_prob"):
        aoilab.load_config("ue_request_prob: 1.5")
    assert aoilab.load_config(cfg.to_text()).to_text() == cfg.to_text()


def test_reward_examples():
    p = aoilab.RewardParams()
    assert aoilab.reward_for(0, 2, p) == pytest.approx((10.0, 10.0, 0.0), abs=1e-12)
    assert aoilab.reward_for(2, 3, p) == pytest.approx((7.1, 8.1, -1.0), abs=1e-12)


def test_radio():
    assert aoilab.path_loss_db(1.0) == pytest.approx(43.3)
    assert aoilab.path_loss_db(250.0) == pytest.approx(115.2, abs=0.05)
    assert aoilab.data_rate(10.0, 115.2) == pytest.approx(95.7, abs=0.05)
    assert aoilab.data_rate(0.0, 100.0) == 0.0


def test_episode_roundtrip():
    env = aoilab.SubMetaverseEnv()
    obs = env.reset(3)
    assert tuple(obs) == (0.0, 0.0)
    total = 0.0
    while not env.done:
        out = env.step(aoilab.Action(0.3, 0.4))
        total += out.reward
    assert env.time == 100
    ue = [r for r in env.ledger if r.kind == "ue"]
    assert ue
    for r in ue:
        assert r.aori == r.completion - r.gen_time
        assert r.aosi >= 0
    with pytest.raises(RuntimeError):
        env.step(0.3, 0.4)

    again = aoilab.SubMetaverseEnv()
    again.reset(3)
    total2 = sum(again.step(0.3, 0.4).reward for _ in range(100))
    assert total2 == total


def test_grid_and_frontier():
    cfg = aoilab.SimConfig()
    cfg.episode_length = 10
    results = aoilab.grid_search(cfg, aoilab.RewardParams(), aoilab.default_grid(), 1, 0)
    assert len(results) == 121
    assert all(r.served_fraction == 0 for r in results[:11])
    assert aoilab.pareto_frontier([(10, 5), (10, 4)]) == [1]
    assert aoilab.pareto_frontier([(1, 1)]) == [0]


def test_gae():
    adv, ret = aoilab.compute_gae([1.0, 2.0], [0.5, 0.5], [False, True], 9.0, 0.0, 0.95)
    assert adv == pytest.approx([0.5, 1.5])
    assert ret == pytest.approx([1.0, 2.0])


def test_short_training(tmp_path):
    cfg = aoilab.ExperimentConfig()
    cfg.sim.episode_length = 20
    ppo = aoilab.PPOConfig()
    ppo.total_steps = 512
    ppo.rollout_length = 256
    net, returns = aoilab.train_policy(cfg, ppo)
    assert len(returns) == 2
    comm, comp = net.act(0.1, 0.2)
    assert 0.0 < comm < 1.0 and 0.0 < comp < 1.0
    result = aoilab.evaluate_policy(net, cfg, 2)
    assert result.episodes == 2
    assert math.isfinite(result.served_mbit)
    net.save(str(tmp_path / "policy.json"), ppo)
    assert (tmp_path / "policy.json").exists()

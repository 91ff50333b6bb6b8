import math

import pytest

import banditlc as blc


@pytest.fixture(scope="module")
def s0():
    source = blc.SourceModel.categorical([0.8, 0.2])
    spec = blc.DistortionSpec.hamming(2, 0.0)
    return source, spec


def test_expected_bits_of_fair_coin():
    assert blc.expected_bits_given_x(0.5, 1e-9) == pytest.approx(0.732649482117, abs=1e-6)
    assert blc.expected_bits_given_x(1.0, 1e-9) == 0.0


def test_dual_route_agreement():
    for p in (0.2, 0.5, 0.8):
        series_nats = blc.expected_bits_given_x(p, 1e-8) * math.log(2.0)
        integral_nats = blc.expected_log_given_x_integral(p)
        assert series_nats == pytest.approx(integral_nats, abs=1e-4)


def test_match_probabilities(s0):
    _, spec = s0
    q = blc.ReconDistribution.categorical([0.5, 0.5])
    assert blc.match_probability(q, 0, spec) == 0.5
    value, has_zero, _ = blc.min_match_probability(q, spec)
    assert value == 0.5 and not has_zero

    spec1 = blc.DistortionSpec.additive_hamming(2, 4, 1.0)
    mem = blc.ReconDistribution.memoryless([0.5, 0.5], 4)
    assert blc.match_probability(mem, 0, spec1) == pytest.approx(5 / 16)


def test_gaps_and_episode(s0):
    source, spec = s0
    arms = [
        blc.ReconDistribution.categorical([0.8, 0.2]),
        blc.ReconDistribution.categorical([0.2, 0.8]),
    ]
    gaps = blc.optimal_action_and_gaps(arms, source, spec)
    assert gaps["a_star"] == 0
    assert gaps["eta"] == pytest.approx(0.2)

    cfg = blc.LcbConfig()
    cfg.alpha = 2.1
    cfg.c = 0.5
    cfg.eta = gaps["eta"]
    trace = blc.run_lcb_episode(source, arms, spec, cfg, 2000, 1)
    assert len(trace["action"]) == 2000
    optimal_share = sum(1 for a in trace["action"] if a == 0) / 2000
    assert optimal_share > 0.8

    again = blc.run_lcb_episode(source, arms, spec, cfg, 2000, 1)
    assert trace["cost_bits"] == again["cost_bits"]


def test_regret_bound_example():
    cfg = blc.LcbConfig()
    cfg.alpha = 3.0
    cfg.c = 1.0
    cfg.eta = 1.0
    assert blc.regret_bound_thm1([0.0, 0.5], math.e, cfg) == pytest.approx(26.0)


def test_net_and_metric(s0):
    _, spec = s0
    q1 = blc.ReconDistribution.categorical([0.5, 0.5])
    q2 = blc.ReconDistribution.categorical([0.25, 0.75])
    assert blc.metric_mu(q1, q2, spec) == pytest.approx(math.log(2.0))
    net = blc.build_net(0.1, 0.5, spec)
    assert 1 <= len(net["points"]) <= 20


def test_blahut_arimoto_and_kl():
    res = blc.blahut_arimoto_fixed_distortion([0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]], 0.11)
    h2 = -(0.11 * math.log2(0.11) + 0.89 * math.log2(0.89))
    assert res["rate_bits"] == pytest.approx(1.0 - h2, abs=1e-4)
    assert res["q_star"][0] == pytest.approx(0.5, abs=1e-5)
    assert blc.nts_regret_bound([0.25, 0.75], [0.5, 0.5]) == pytest.approx(0.2075, abs=1e-4)


def test_run_experiment(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(
        """
        {
          "scenario": {
            "source": {"pmf": [0.8, 0.2]},
            "distortion": {"kind": "hamming", "level": 0}
          },
          "policy": {"name": "lcb", "alpha": 2.1, "c": 0.5, "eta": "oracle"},
          "arms": [{"categorical": [0.8, 0.2]}, {"categorical": [0.2, 0.8]}],
          "horizon": 50,
          "seeds": [0]
        }
        """
    )
    out = tmp_path / "out"
    blc.run_experiment(str(config), str(out))
    assert (out / "regret.csv").exists()
    assert (out / "trace_seed0.csv").exists()
    assert (out / "oracle.json").exists()

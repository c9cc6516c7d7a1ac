import math

import pytest
import yaml

from crinterf.channel import CompositeChannelParams, composite_lognormal_moments
from crinterf.control import ContentionConfig, HybridConfig, PowerControlConfig
from crinterf.errors import ConfigurationError
from crinterf.pointproc import retaining_probability
from crinterf.scenario import ScenarioConfig


def make_contention(**over):
    kw = dict(
        scheme="contention",
        density=3e-4,
        inner_radius=100.0,
        beta=4.0,
        pathloss_only=True,
        contention=ContentionConfig(p=1.0, d_min=20.0),
    )
    kw.update(over)
    return ScenarioConfig(**kw)


def test_valid_construction_and_properties():
    sc = make_contention()
    assert sc.active_config is sc.contention
    assert sc.q_mh == pytest.approx(retaining_probability(3e-4, 20.0), rel=1e-15)
    assert sc.effective_lognormal() == (0.0, 0.0)


def test_scheme_validation():
    with pytest.raises(ConfigurationError):
        make_contention(scheme="other")
    with pytest.raises(ConfigurationError):
        make_contention(scheme="power")  # missing power config
    with pytest.raises(ConfigurationError):
        ScenarioConfig(
            scheme="none", density=1e-4, inner_radius=10.0, beta=4.0,
            pathloss_only=True, fixed_power=0.0,
        )


def test_channel_exclusivity():
    ch = CompositeChannelParams.from_db(1, 0.0, 4.0)
    with pytest.raises(ConfigurationError):
        make_contention(channel=ch)  # pathloss_only + channel
    with pytest.raises(ConfigurationError):
        make_contention(pathloss_only=False)  # neither


def test_hidden_bounds():
    with pytest.raises(ConfigurationError):
        make_contention(hidden=True, receiver_offset=0.0)
    with pytest.raises(ConfigurationError):
        make_contention(hidden=True, receiver_offset=100.0)
    sc = make_contention(hidden=True, receiver_offset=50.0)
    assert sc.receiver_offset == 50.0


def test_outer_radius_validation():
    with pytest.raises(ConfigurationError):
        make_contention(outer_radius=100.0)  # must exceed inner
    assert make_contention(outer_radius=500.0).resolve_outer_radius() == 500.0


def test_auto_outer_radius_rule():
    sc = make_contention()
    # (R/l)^(beta-2) tail mass: l = R * tf^(-1/(beta-2))
    assert sc.resolve_outer_radius() == pytest.approx(100.0 * 1e2, rel=1e-12)
    assert sc.resolve_outer_radius(tail_fraction=1e-2) == pytest.approx(1000.0)
    sc3 = make_contention(beta=3.0)
    assert sc3.resolve_outer_radius(1e-4) == pytest.approx(100.0 * 1e4)
    reg = sc.region()
    assert reg.inner_radius == 100.0 and reg.outer_radius == pytest.approx(1e4)


def test_auto_outer_radius_needs_positive_inner():
    sc = make_contention(inner_radius=0.0)
    with pytest.raises(ConfigurationError):
        sc.resolve_outer_radius()


def test_alpha_beta_mismatch_warns():
    with pytest.warns(UserWarning, match="alpha"):
        ScenarioConfig(
            scheme="power", density=3e-4, inner_radius=100.0, beta=4.0,
            pathloss_only=True, power=PowerControlConfig(1.0, 20.0, alpha=3.0),
        )


def test_effective_lognormal_shadowed():
    ch = CompositeChannelParams.from_db(2, 0.1, 4.0)
    sc = make_contention(pathloss_only=False, channel=ch)
    mu, sigma = sc.effective_lognormal()
    mu_ref, s2_ref = composite_lognormal_moments(ch)
    assert mu == pytest.approx(mu_ref) and sigma**2 == pytest.approx(s2_ref)


def test_q_mh_rejects_power_scheme():
    sc = ScenarioConfig(
        scheme="power", density=3e-4, inner_radius=100.0, beta=4.0,
        pathloss_only=True, power=PowerControlConfig(1.0, 20.0, 4.0),
    )
    with pytest.raises(ConfigurationError):
        sc.q_mh


def test_round_trip_through_yaml():
    ch = CompositeChannelParams.from_db(math.inf, 0.0, 4.0)
    sc = ScenarioConfig(
        scheme="hybrid", density=3e-4, inner_radius=200.0, beta=4.0,
        hidden=True, receiver_offset=100.0, channel=ch,
        hybrid=HybridConfig(p=1.0, d_min=20.0, r_hyb=30.0, alpha=4.0),
        trials=12345, seed=7,
    )
    text = yaml.safe_dump(sc.to_dict())
    back = ScenarioConfig.from_dict(yaml.safe_load(text))
    assert back == sc
    assert back.config_hash() == sc.config_hash()


def test_from_dict_db_sigma_and_inf():
    sc = ScenarioConfig.from_dict(
        {
            "scheme": "contention",
            "density": 3e-4,
            "inner_radius": 100.0,
            "beta": 4.0,
            "channel": {"nakagami_m": "inf", "sigma_omega_db": 4.0},
            "contention": {"p": 1.0, "d_min": 20.0},
        }
    )
    assert sc.channel.nakagami_m == math.inf
    assert sc.channel.sigma_omega == pytest.approx(4.0 * math.log(10.0) / 10.0)


def test_from_dict_alpha_defaults_to_beta():
    sc = ScenarioConfig.from_dict(
        {
            "scheme": "power",
            "density": 3e-4,
            "inner_radius": 100.0,
            "beta": 4.0,
            "pathloss_only": True,
            "power": {"p_max": 1.0, "r_pwc": 20.0},
        }
    )
    assert sc.power.alpha == 4.0


def test_from_dict_errors():
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_dict({"scheme": "contention"})  # missing beta
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_dict(
            {
                "scheme": "contention",
                "density": 1e-4,
                "inner_radius": 10.0,
                "beta": 4.0,
                "channel": {"nakagami_m": 1, "bogus": 3},
                "contention": {"p": 1.0, "d_min": 5.0},
            }
        )
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_dict([1, 2])
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_dict(
            {
                "scheme": "contention",
                "density": 1e-4,
                "inner_radius": 10.0,
                "beta": 4.0,
                "pathloss_only": True,
                "contention": {"p": 1.0, "d_min": 5.0},
                "nonsense": True,
            }
        )


def test_config_hash_sensitivity():
    a = make_contention()
    b = make_contention(seed=1)
    c = make_contention(density=3.0001e-4)
    assert len({a.config_hash(), b.config_hash(), c.config_hash()}) == 3
    assert a.config_hash() == make_contention().config_hash()


def test_with_updates():
    sc = make_contention()
    sc2 = sc.with_updates(trials=5)
    assert sc2.trials == 5 and sc.trials == 100_000

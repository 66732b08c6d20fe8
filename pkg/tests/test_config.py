import json

import pytest

from wavecap.config import ConfigError, PhysicalConfig, round_to_three


def test_defaults_consistent():
    c = PhysicalConfig()
    assert c.n_dipoles % 3 == 0
    assert c.n_dipoles == round_to_three(8 * c.alpha * (c.k * c.r_s) ** 2)
    assert c.n_modes == 30
    assert c.power_w * c.density / c.noise_power == pytest.approx(1.0, rel=2e-3)


@pytest.mark.parametrize(
    "kw",
    [
        {"r_s": 0.4},
        {"alpha": 0.0},
        {"alpha": 1.0},
        {"bandwidth_hz": 1e9},
        {"dipole_len_over_lambda": 0.2},
        {"k": -1.0},
        {"n_max": -1},
    ],
)
def test_invalid_configs_rejected(kw):
    with pytest.raises(ConfigError):
        PhysicalConfig(**kw)


def test_with_dipoles_keeps_alpha():
    c = PhysicalConfig().with_dipoles(2500)
    assert c.n_dipoles in (2499, 2502)
    assert c.alpha == PhysicalConfig().alpha
    assert c.density == pytest.approx(c.alpha, rel=2e-3)


def test_json_roundtrip(tmp_path):
    c = PhysicalConfig(alpha=0.2, seed=11)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_dict()))
    assert PhysicalConfig.from_json(str(path)) == c
    with pytest.raises(ConfigError):
        PhysicalConfig.from_dict({"bogus": 1})

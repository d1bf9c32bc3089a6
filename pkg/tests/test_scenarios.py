import numpy as np
import pytest

from scenarios.base import SCENARIO_NAMES, BaseScenario, ConfigError, load_config
from scenarios.in_phase import outcome_quantiles
from scenarios.registry import auto_discover, get_scenario, list_scenarios, register

auto_discover()


@pytest.mark.parametrize("name", SCENARIO_NAMES)
def test_sample_configs_load(configs_dir, name):
    config = load_config(configs_dir / f"{name}.toml")
    assert config.scenario == name
    assert config.source == configs_dir / f"{name}.toml"


def test_every_scenario_is_registered():
    assert set(list_scenarios()) == set(SCENARIO_NAMES)


def test_unknown_scenario_lookup():
    with pytest.raises(ValueError, match="Available"):
        get_scenario("ghost_imaging")


def test_unknown_key_is_reported_with_line(write_config):
    path = write_config('scenario = "in_phase"\n\n[signal]\nkind = "fock"\nspin = 2\n')
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.key == "signal.spin"
    assert info.value.line == 5
    assert str(info.value) == f"{path}:5: signal.spin: unknown key"


@pytest.mark.parametrize(
    "body, key, message",
    [
        ('[interaction]\nkappa = "strong"\n', "interaction.kappa", "expected float"),
        ("[interaction]\nkappa = -1.0\n", "interaction.kappa", "must be >= 0.0"),
        ("[grid]\nn_points = 8\n", "grid.n_points", "must be >= 16"),
        ('[signal]\nkind = "thermal"\n', "signal.kind", "unknown state kind"),
        ("[pump]\npower = 1.0\n", "pump", "unknown table"),
    ],
)
def test_invalid_values(write_config, body, key, message):
    path = write_config(f'scenario = "out_of_phase"\n{body}')
    with pytest.raises(ConfigError, match=message) as info:
        load_config(path)
    assert info.value.key == key
    assert info.value.line is not None


def test_unknown_scenario_name(write_config):
    with pytest.raises(ConfigError, match="unknown scenario 'ghost'"):
        load_config(write_config('scenario = "ghost"\n'))


def test_syntax_error_carries_line(write_config):
    with pytest.raises(ConfigError) as info:
        load_config(write_config('scenario = "weak"\n\n[signal\nkind = "fock"\n'))
    assert info.value.key == "syntax"
    assert info.value.line == 3


def test_cli_overrides_win(configs_dir, tmp_path):
    config = load_config(configs_dir / "tomography.toml").with_overrides(
        seed=11, output_dir=tmp_path, phases=20, shots=500
    )
    assert config.seed == 11
    assert config.output_dir == tmp_path
    assert config.tomography_phases == 20
    assert config.tomography_shots == 500
    assert load_config(configs_dir / "tomography.toml").tomography_phases == 32


def test_locked_meter_follows_homodyne_axis(configs_dir):
    config = load_config(configs_dir / "out_of_phase.toml")
    spec = config.meter_spec(1.2)
    assert config.meter_locked
    assert spec.epsilon == pytest.approx(2.4)
    assert spec.squeezing.quadrature_variance(1.2) == pytest.approx(np.exp(-2.0) / 2)


def test_sampling_scenarios_need_a_seed(configs_dir):
    config = load_config(configs_dir / "weak.toml")
    config.seed = None
    with pytest.raises(ConfigError, match="seed"):
        get_scenario("weak").validate(config)


def test_outcome_quantiles():
    x = np.linspace(-5, 5, 1001)
    density = np.exp(-(x**2) / 2)
    assert outcome_quantiles(x, density, (0.5,))[0] == pytest.approx(0.0, abs=0.02)


def test_in_phase_scenario(configs_dir):
    result = get_scenario("in_phase").run(load_config(configs_dir / "in_phase.toml"))
    assert result.metrics["meter_marginal_max_abs_diff"] < 1e-8
    assert result.metrics["conditional_signal_max_tv"] < 1e-8
    assert result.metrics["wigner_translation_residual"] < 1e-8
    assert result.flags == []
    assert {"meter_marginal", "signal_conditional_marginals", "wigner_conditional"} <= set(result.frames)


def test_out_of_phase_scenario(configs_dir):
    result = get_scenario("out_of_phase").run(load_config(configs_dir / "out_of_phase.toml"))
    metrics = result.metrics
    assert 0 < metrics["back_action_fidelity"] < 1
    assert metrics["rescaled_marginal_l1"] < 0.3
    assert metrics["filter_path_residual"] < 1e-6
    assert metrics["convolution_residual"] < 1e-5


def test_qnd_audit_scenario(configs_dir):
    result = get_scenario("qnd_audit").run(load_config(configs_dir / "qnd_audit.toml"))
    assert result.metrics["qnd_commutator_residual"] < 1e-6
    assert result.metrics["amplitude_identity_residual"] < 1e-8
    assert result.metrics["information_gained"] > 0
    assert result.documents["audit_report"]["consistent"]


def test_scenarios_list_in_schema_order():
    assert list(list_scenarios()) == list(SCENARIO_NAMES)


def test_registering_a_taken_name_is_rejected():
    class Impostor(BaseScenario):
        name = "weak"
        description = "duplicate"

        def run(self, config):
            raise NotImplementedError

    with pytest.raises(ValueError, match="claimed by both"):
        register(Impostor)
    assert get_scenario("weak").__class__.__name__ != "Impostor"


def test_registering_an_unselectable_name_is_rejected():
    class Stray(BaseScenario):
        name = "ghost_imaging"
        description = "not in the config schema"

        def run(self, config):
            raise NotImplementedError

    with pytest.raises(ValueError, match="cannot select"):
        register(Stray)

"""Tests for the experiment table and scenario selection."""

import pytest

from sdds_lab.harness.runner import scenario_train_config
from sdds_lab.harness.scenarios import (
    DESIGN_FEATURE_TABLE,
    build_scenario,
    build_scenarios,
    design_features,
)
from sdds_lab.models import GridConfig, HeadKind, TransferMode


@pytest.mark.parametrize(
    "experiment_id,bits",
    [
        ("E1", "111110000110"),
        ("E2", "111110010111"),
        ("E3", "111110010111"),
        ("E4", "111110001011"),
        ("E5", "111101000110"),
        ("E6", "111101010111"),
        ("E7", "111100100100"),
        ("E8", "111100110100"),
    ],
)
def test_design_feature_table(experiment_id, bits):
    flags = design_features(experiment_id)
    assert "".join("1" if flags[f"DF{i}"] else "0" for i in range(1, 13)) == bits


@pytest.mark.parametrize(
    "experiment_id,head,transfer",
    [
        ("E1", HeadKind.BINARY, TransferMode.NONE),
        ("E4", HeadKind.BINARY, TransferMode.INDUSTRIAL),
        ("E6", HeadKind.MULTICLASS, TransferMode.GENERIC),
        ("E8", HeadKind.SEGMENTATION, TransferMode.INDUSTRIAL),
    ],
)
def test_experiment_cells(experiment_id, head, transfer):
    scenario = build_scenario(experiment_id, [1], {})
    assert (scenario.information_value, scenario.knowledge_transfer) == (head, transfer)


def test_only_e4_uses_translation():
    assert [eid for eid in DESIGN_FEATURE_TABLE if build_scenario(eid, [1], {}).uses_translation] == ["E4"]


def test_scenarios_are_ordered_and_deduplicated():
    config = GridConfig(scenarios=["E7", "E2", "E2", "E1"])
    assert [s.experiment_id for s in build_scenarios(config)] == ["E1", "E2", "E7"]


def test_information_value_filter():
    config = GridConfig(information_values=[HeadKind.SEGMENTATION, HeadKind.MULTICLASS])
    assert [s.experiment_id for s in build_scenarios(config)] == ["E5", "E6", "E7", "E8"]


def test_overrides_toggle_single_features():
    config = GridConfig(scenarios=["E2"], design_features={"E2": {"DF12": False}}, seeds=[4, 5])
    (scenario,) = build_scenarios(config)
    assert not scenario.enabled("DF12")
    assert scenario.enabled("DF10")
    assert scenario.seeds == [4, 5]


def test_overrides_that_contradict_the_cell_are_rejected():
    with pytest.raises(ValueError, match="DF8/DF9"):
        build_scenario("E2", [1], {"DF8": False})


@pytest.mark.parametrize(
    "experiment_id,overrides,message",
    [
        ("E1", {"DF1": False}, "DF1 cannot be disabled"),
        ("E3", {"DF3": False}, "DF3 cannot be disabled"),
        ("E5", {"DF5": True}, "DF5 conflict with the DF6 head"),
        ("E4", {"DF8": True}, "mutually exclusive"),
    ],
)
def test_overrides_the_runner_cannot_honor_are_rejected(experiment_id, overrides, message):
    with pytest.raises(ValueError, match=message):
        build_scenario(experiment_id, [1], overrides)


def test_balancing_can_be_switched_off():
    scenario = build_scenarios(GridConfig(scenarios=["E1"], design_features={"E1": {"DF4": False}}))[0]
    assert not scenario.enabled("DF4")


def test_unknown_experiment_is_rejected():
    with pytest.raises(ValueError, match="unknown experiment 'E9'"):
        build_scenarios(GridConfig(scenarios=["E9"]))


def test_unknown_feature_is_rejected():
    with pytest.raises(ValueError, match="DF13"):
        build_scenario("E1", [1], {"DF13": True})


@pytest.mark.parametrize(
    "experiment_id,expected",
    [("E1", (True, 0.5, False)), ("E2", (True, 0.5, True)), ("E7", (True, 0.0, False))],
)
def test_train_config_follows_regularization_flags(experiment_id, expected):
    config = scenario_train_config(build_scenario(experiment_id, [1], {}), GridConfig(), seed=3)
    actual = (config.early_stopping.enabled, config.dropout_rate, config.augmentation is not None)
    assert actual == expected
    assert config.seed == 3

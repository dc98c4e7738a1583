"""The eight experiment analogs and their design-feature flags.

Each row of ``DESIGN_FEATURE_TABLE`` lists DF1..DF12 as a bit string
(1 = feature implemented). The features are:

- DF1-DF3: segment-wise capture, ground-truth labelling and part aggregation
  (always on; overrides cannot disable them)
- DF4: class balancing by undersampling (off: unbalanced target splits)
- DF5 / DF6 / DF7: binary, multiclass or segmentation head
- DF8: backbone weight transfer from a source corpus
- DF9: domain translation plus a source-trained classifier
- DF10: early stopping
- DF11: dropout
- DF12: data augmentation
"""

import logging

from sdds_lab.models import GridConfig, HeadKind, Scenario, TransferMode

logger = logging.getLogger(__name__)

DESIGN_FEATURES = tuple(f"DF{i}" for i in range(1, 13))

DESIGN_FEATURE_TABLE: dict[str, str] = {
    "E1": "111110000110",
    "E2": "111110010111",
    "E3": "111110010111",
    "E4": "111110001011",
    "E5": "111101000110",
    "E6": "111101010111",
    "E7": "111100100100",
    "E8": "111100110100",
}

EXPERIMENT_CELLS: dict[str, tuple[HeadKind, TransferMode]] = {
    "E1": (HeadKind.BINARY, TransferMode.NONE),
    "E2": (HeadKind.BINARY, TransferMode.GENERIC),
    "E3": (HeadKind.BINARY, TransferMode.INDUSTRIAL),
    "E4": (HeadKind.BINARY, TransferMode.INDUSTRIAL),
    "E5": (HeadKind.MULTICLASS, TransferMode.NONE),
    "E6": (HeadKind.MULTICLASS, TransferMode.GENERIC),
    "E7": (HeadKind.SEGMENTATION, TransferMode.NONE),
    "E8": (HeadKind.SEGMENTATION, TransferMode.INDUSTRIAL),
}


def design_features(experiment_id: str) -> dict[str, bool]:
    """DF flags of one experiment.

    Examples:
        >>> flags = design_features("E1")
        >>> [name for name, on in flags.items() if name in ("DF10", "DF11", "DF12") and on]
        ['DF10', 'DF11']
    """
    bits = DESIGN_FEATURE_TABLE[experiment_id]
    return {name: bit == "1" for name, bit in zip(DESIGN_FEATURES, bits)}


def experiment_order(experiment_id: str) -> int:
    """Sort key placing E1..E8 in table order and unknown ids last."""
    ids = list(DESIGN_FEATURE_TABLE)
    return ids.index(experiment_id) if experiment_id in ids else len(ids)


def build_scenario(experiment_id: str, seeds: list[int], overrides: dict[str, bool]) -> Scenario:
    if experiment_id not in DESIGN_FEATURE_TABLE:
        raise ValueError(f"unknown experiment '{experiment_id}'; expected one of E1..E8")
    unknown = set(overrides) - set(DESIGN_FEATURES)
    if unknown:
        raise ValueError(f"{experiment_id}: unknown design features {sorted(unknown)}")
    head, transfer = EXPERIMENT_CELLS[experiment_id]
    return Scenario(
        experiment_id=experiment_id,
        information_value=head,
        knowledge_transfer=transfer,
        design_features={**design_features(experiment_id), **overrides},
        seeds=list(seeds),
    )


def build_scenarios(config: GridConfig) -> list[Scenario]:
    """Scenarios selected by ``config`` in E1..E8 order, with DF overrides applied.

    Examples:
        >>> [s.experiment_id for s in build_scenarios(GridConfig())]
        ['E1', 'E2', 'E3', 'E4', 'E5', 'E6', 'E7', 'E8']
        >>> binary = GridConfig(information_values=[HeadKind.BINARY])
        >>> [s.experiment_id for s in build_scenarios(binary)]
        ['E1', 'E2', 'E3', 'E4']
    """
    scenarios = []
    for experiment_id in sorted(dict.fromkeys(config.scenarios), key=experiment_order):
        scenario = build_scenario(
            experiment_id, config.seeds, config.design_features.get(experiment_id, {})
        )
        if config.information_values and scenario.information_value not in config.information_values:
            continue
        scenarios.append(scenario)
    logger.info(f"Selected scenarios: {', '.join(s.experiment_id for s in scenarios) or 'none'}")
    return scenarios

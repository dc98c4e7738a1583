"""Run one scenario for one seed: build, transfer, train, evaluate, write artifacts."""

import hashlib
import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from sdds_lab.data.corpora import Corpora, CorpusSplits
from sdds_lab.data.dataset_io import load_sample, load_samples, stack_samples
from sdds_lab.engine.network import predict
from sdds_lab.engine.weights_io import save_weights
from sdds_lab.evaluation.aggregate import aggregate_parts
from sdds_lab.evaluation.metrics import binary_report, compute_metrics
from sdds_lab.evaluation.thresholds import foreground, mask_to_binary, optimize_threshold
from sdds_lab.explain.saliency import saliency, saliency_focus_score
from sdds_lab.models import (
    AveragingMode,
    DomainTranslator,
    GridConfig,
    HeadKind,
    ImageSample,
    ModelSpec,
    ModelState,
    Scenario,
    ScenarioRun,
    TrainConfig,
    TransferMode,
    TransferPlan,
    TranslatorKind,
)
from sdds_lab.networks.builder import default_model_spec, head_for_labels, source_spec_for
from sdds_lab.networks.translate import fit_reference_cdf, translate_domain
from sdds_lab.training.trainer import write_history
from sdds_lab.training.transfer_pipeline import pretrain_then_finetune, train_source_model

logger = logging.getLogger(__name__)

RUNS_DIR = "runs"
SOURCES_DIR = "sources"


def scenario_train_config(scenario: Scenario, config: GridConfig, seed: int) -> TrainConfig:
    """Training config with the scenario's DF10 / DF11 / DF12 flags applied.

    Examples:
        >>> from sdds_lab.harness.scenarios import build_scenario
        >>> cfg = scenario_train_config(build_scenario("E1", [1], {}), GridConfig(), seed=1)
        >>> cfg.early_stopping.enabled, cfg.dropout_rate, cfg.augmentation is None
        (True, 0.5, True)
    """
    early_stopping = config.train.early_stopping.model_copy(
        update={"enabled": scenario.enabled("DF10")}
    )
    return config.train.model_copy(
        update={
            "early_stopping": early_stopping,
            "dropout_rate": config.dropout_rate if scenario.enabled("DF11") else 0.0,
            "augmentation": config.augmentation if scenario.enabled("DF12") else None,
            "seed": seed,
        }
    )


def source_weights_path(
    directory: Path, corpus: str, spec: ModelSpec, config: TrainConfig
) -> Path:
    """Cache file of a source model: ``<corpus>-<hash>-<flags>-seed<N>.sdw``.

    The hash covers the source architecture and training config, so two
    scenarios share a cached source exactly when they would train the same one.
    """
    digest = hashlib.sha256(
        (spec.model_dump_json() + config.model_dump_json()).encode()
    ).hexdigest()[:12]
    flags = (
        f"es{int(config.early_stopping.enabled)}"
        f"-do{int(bool(config.dropout_rate))}"
        f"-aug{int(config.augmentation is not None)}"
    )
    return Path(directory) / f"{corpus}-{digest}-{flags}-seed{config.seed}.sdw"


def source_splits(corpora: Corpora, mode: TransferMode) -> CorpusSplits:
    splits = corpora.generic if mode == TransferMode.GENERIC else corpora.industrial
    if splits is None:
        raise ValueError(f"{mode.value} transfer needs the {mode.value} source corpus")
    return splits


def input_shape_of(splits: CorpusSplits) -> tuple[int, int, int]:
    height, width, channels = load_sample(splits.train, splits.train.samples[0]).image.shape
    return (height, width, channels)


def segment_verdicts(state: ModelState, outputs: np.ndarray, threshold: Optional[float]) -> list[int]:
    """Binary verdict per segment; segmentation heads need a mask-sum threshold."""
    kind = state.spec.head.kind
    if kind == HeadKind.BINARY:
        return (outputs[:, 0] > 0.5).astype(int).tolist()
    if kind == HeadKind.MULTICLASS:
        return (np.argmax(outputs, axis=-1) > 0).astype(int).tolist()
    if threshold is None:
        raise ValueError("segmentation verdicts need a threshold")
    return [mask_to_binary(plane, threshold) for plane in foreground(outputs)]


def translated(samples: list[ImageSample], translator: DomainTranslator) -> list[ImageSample]:
    return [replace(s, image=translate_domain(s.image, translator)) for s in samples]


def evaluate(
    state: ModelState,
    splits: CorpusSplits,
    config: GridConfig,
    translator: Optional[DomainTranslator] = None,
) -> ScenarioRun:
    """Segment, part and saliency evaluation of a trained model on the test split.

    Multiclass models are scored with macro averages and, collapsed
    one-vs-all, with binary metrics. Segmentation models are thresholded on
    mask sums with the threshold tuned on the validation split; the
    threshold tuned on the test split itself is reported alongside.

    Returns:
        A partially filled ScenarioRun (no id, seed or histories)
    """
    def prepare(samples: list[ImageSample]) -> list[ImageSample]:
        return translated(samples, translator) if translator else samples

    test_samples = prepare(load_samples(splits.test))
    images, labels, _ = stack_samples(test_samples)
    outputs = predict(state, images)
    truth = (labels > 0).astype(int).tolist()
    kind = state.spec.head.kind

    run = ScenarioRun(experiment_id="", seed=0)
    if kind == HeadKind.SEGMENTATION:
        val_images, val_labels, _ = stack_samples(prepare(load_samples(splits.val)))
        run.threshold, _ = optimize_threshold(
            list(foreground(predict(state, val_images))), (val_labels > 0).astype(int).tolist()
        )
        test_threshold, _ = optimize_threshold(list(foreground(outputs)), truth)
        run.test_tuned_report = binary_report(
            segment_verdicts(state, outputs, test_threshold), truth
        )
    verdicts = segment_verdicts(state, outputs, run.threshold)
    run.binary_report = binary_report(verdicts, truth)
    if kind == HeadKind.MULTICLASS:
        run.report = compute_metrics(
            np.argmax(outputs, axis=-1).tolist(),
            labels.tolist(),
            AveragingMode.MACRO,
            num_classes=state.spec.head.num_classes,
        )
    else:
        run.report = run.binary_report

    raw_samples = prepare(load_samples(splits.raw_test))
    raw_images, raw_labels, _ = stack_samples(raw_samples)
    raw_verdicts = segment_verdicts(state, predict(state, raw_images), run.threshold)
    part_ids = [s.part_id for s in raw_samples]
    predicted_parts = aggregate_parts(part_ids, raw_verdicts, config.part_min_count)
    true_parts = aggregate_parts(part_ids, (raw_labels > 0).astype(int).tolist())
    run.part_report = binary_report(
        [int(p.verdict) for p in predicted_parts], [int(p.verdict) for p in true_parts]
    )

    for sample, verdict in zip(test_samples, verdicts):
        if verdict and sample.is_defective and sample.mask is not None:
            target_class = 1 if kind == HeadKind.BINARY else sample.label
            smap = saliency(state, sample.image, target_class, sample.sample_id)
            run.focus_ratios.append(saliency_focus_score(smap, sample.mask))
    return run


def run_translation(
    corpora: Corpora,
    target: CorpusSplits,
    target_spec: ModelSpec,
    train_config: TrainConfig,
    config: GridConfig,
    sources_dir: Path,
) -> tuple[ModelState, ScenarioRun]:
    """Source classifier plus histogram translation; no training on target data."""
    industrial = source_splits(corpora, TransferMode.INDUSTRIAL)
    spec = source_spec_for(
        target_spec, TransferMode.INDUSTRIAL, industrial.label_names, target_spec.head.kind
    )
    path = source_weights_path(sources_dir, "industrial", spec, train_config)
    state, source_history = train_source_model(
        spec, industrial.train, industrial.val, train_config, path, force=config.force
    )
    reference = fit_reference_cdf(s.image for s in load_samples(industrial.train))
    translator = DomainTranslator(kind=TranslatorKind.HISTOGRAM_MATCH, reference_cdf=reference)
    run = evaluate(state, target, config, translator)
    run.source_history = source_history
    return state, run


def run_scenario(
    scenario: Scenario,
    corpora: Corpora,
    config: GridConfig,
    seed: int,
    out_dir: Path,
) -> ScenarioRun:
    """Execute one scenario for one seed and write its weights, history and metrics.

    Failures are logged and returned as a run with ``status="failed"``; they
    never propagate.

    Args:
        scenario: Experiment analog with its DF flags
        corpora: Prepared target and source splits
        config: Grid config (training hyperparameters, augmentation, dropout)
        seed: Seed for initialization, shuffling, dropout and augmentation
        out_dir: Grid output directory (``runs/`` and ``sources/`` live here)

    Returns:
        ScenarioRun with reports, histories, focus ratios and artifact paths
    """
    out_dir = Path(out_dir)
    run_name = f"{scenario.experiment_id}-seed{seed}"
    logger.info(f"Running {run_name}")
    try:
        target = corpora.target if scenario.enabled("DF4") else corpora.target.unbalanced()
        train_config = scenario_train_config(scenario, config, seed)
        target_spec = default_model_spec(
            head_for_labels(scenario.information_value, target.label_names),
            input_shape_of(target),
            dropout_rate=train_config.dropout_rate or 0.0,
        )
        sources_dir = out_dir / SOURCES_DIR

        if scenario.uses_translation:
            state, run = run_translation(
                corpora, target, target_spec, train_config, config, sources_dir
            )
        else:
            plan = TransferPlan()
            source = source_spec = None
            if scenario.enabled("DF8"):
                mode = scenario.knowledge_transfer
                splits = source_splits(corpora, mode)
                source = (splits.train, splits.val)
                source_spec = source_spec_for(target_spec, mode, splits.label_names)
                plan = TransferPlan(
                    mode=mode,
                    source_weights=source_weights_path(
                        sources_dir, mode.value, source_spec, train_config
                    ),
                )
            state, source_history, history = pretrain_then_finetune(
                source,
                (target.train, target.val),
                source_spec,
                target_spec,
                plan,
                train_config,
                train_config,
                force=config.force,
            )
            run = evaluate(state, target, config)
            run.history = history
            run.source_history = source_history

        runs_dir = out_dir / RUNS_DIR
        run.experiment_id = scenario.experiment_id
        run.seed = seed
        run.weights_path = str(save_weights(state, runs_dir / f"{run_name}.sdw"))
        if run.history is not None:
            run.history_path = str(write_history(run.history, runs_dir / f"{run_name}.history.csv"))
        (runs_dir / f"{run_name}.json").write_text(run.model_dump_json(indent=2))
        assert run.report is not None
        logger.info(f"Finished {run_name}: F1 {run.report.f1:.3f}")
        return run
    except Exception as e:
        logger.warning(f"Scenario {run_name} failed: {e}")
        return ScenarioRun(
            experiment_id=scenario.experiment_id,
            seed=seed,
            status="failed",
            error=f"{type(e).__name__}: {e}",
        )

"""Data models and configuration for sdds-lab."""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, model_validator


class LayerKind(str, Enum):
    """Layer vocabulary understood by the engine.

    Examples:
        >>> LayerKind.CONCAT_SKIP.value
        'concat-skip'
        >>> LayerKind("conv2d") is LayerKind.CONV2D
        True
    """

    CONV2D = "conv2d"
    MAXPOOL2D = "maxpool2d"
    GLOBALAVGPOOL = "globalavgpool"
    DENSE = "dense"
    RELU = "relu"
    SIGMOID = "sigmoid"
    SOFTMAX = "softmax"
    DROPOUT = "dropout"
    UPSAMPLE2D = "upsample2d"
    CONCAT_SKIP = "concat-skip"


class HeadKind(str, Enum):
    """Information value of a model's output."""

    BINARY = "binary"
    MULTICLASS = "multiclass"
    SEGMENTATION = "segmentation"


class Mode(str, Enum):
    """Forward-pass mode."""

    TRAIN = "train"
    EVAL = "eval"


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAM = "adam"


class LossKind(str, Enum):
    BCE = "bce"
    CE = "ce"
    PIXELWISE_CE = "pixelwise_ce"


class TransferMode(str, Enum):
    """Knowledge-transfer level of a scenario."""

    NONE = "none"
    GENERIC = "generic"
    INDUSTRIAL = "industrial"


class TranslatorKind(str, Enum):
    IDENTITY = "identity"
    HISTOGRAM_MATCH = "histogram_match"


class DefectType(str, Enum):
    """Defect taxonomy of the synthetic parts.

    The first three are the default label set; the remaining two extend the
    taxonomy towards the five types seen on real molded parts.

    Examples:
        >>> [d.value for d in DEFAULT_DEFECT_TYPES]
        ['nonfill', 'joining_mark', 'dirt']
    """

    NONFILL = "nonfill"
    JOINING_MARK = "joining_mark"
    DIRT = "dirt"
    FLOW_LINE = "flow_line"
    BLISTER = "blister"


DEFAULT_DEFECT_TYPES: tuple[DefectType, ...] = (
    DefectType.NONFILL,
    DefectType.JOINING_MARK,
    DefectType.DIRT,
)

NON_DEFECTIVE_LABEL = "ok"


class AveragingMode(str, Enum):
    BINARY = "binary"
    MACRO = "macro"


# ============================================================================
# Engine / architecture descriptors
# ============================================================================


class LayerSpec(BaseModel):
    """Descriptor of one layer in a compiled network.

    Examples:
        >>> spec = LayerSpec(name="backbone.block1.conv", kind=LayerKind.CONV2D,
        ...                  in_channels=1, out_channels=8, padding=1)
        >>> spec.kernel_size, spec.stride
        (3, 1)
        >>> LayerSpec(name="head.dropout", kind=LayerKind.DROPOUT, rate=0.5).rate
        0.5
    """

    name: str
    kind: LayerKind
    kernel_size: int = Field(default=3, ge=1, description="Square kernel size (conv2d)")
    stride: int = Field(default=1, ge=1, description="Stride (conv2d)")
    padding: int = Field(default=0, ge=0, description="Zero padding on each side (conv2d)")
    in_channels: Optional[int] = Field(default=None, ge=1)
    out_channels: Optional[int] = Field(default=None, ge=1)
    rate: float = Field(default=0.0, ge=0.0, lt=1.0, description="Dropout rate")
    size: int = Field(default=2, ge=1, description="Pool window / upsampling factor")
    skip_from: Optional[str] = Field(
        default=None,
        description="Name of the earlier layer whose output a concat-skip layer appends",
    )

    @model_validator(mode="after")
    def _check_kind_parameters(self) -> "LayerSpec":
        if self.kind in (LayerKind.CONV2D, LayerKind.DENSE):
            if self.in_channels is None or self.out_channels is None:
                raise ValueError(f"{self.kind.value} layer '{self.name}' needs in/out channels")
        if self.kind == LayerKind.CONCAT_SKIP and not self.skip_from:
            raise ValueError(f"concat-skip layer '{self.name}' needs skip_from")
        return self


class ConvBlockSpec(BaseModel):
    """One backbone block: conv -> relu -> optional 2x2 max pooling."""

    channels: int = Field(ge=1)
    kernel_size: int = Field(default=3, ge=1)
    stride: int = Field(default=1, ge=1)
    pooling: bool = True


class HeadSpec(BaseModel):
    """Output head.

    ``num_classes`` is 1 for binary heads, K for multiclass heads and the number
    of foreground classes for segmentation heads (which output K + 1 planes).

    Examples:
        >>> HeadSpec(kind=HeadKind.SEGMENTATION, num_classes=1).output_channels
        2
        >>> HeadSpec(kind=HeadKind.MULTICLASS, num_classes=4).output_channels
        4
    """

    kind: HeadKind
    num_classes: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_classes(self) -> "HeadSpec":
        if self.kind == HeadKind.BINARY and self.num_classes != 1:
            raise ValueError("binary head has exactly one output")
        if self.kind == HeadKind.MULTICLASS and self.num_classes < 2:
            raise ValueError("multiclass head needs at least two classes")
        return self

    @property
    def output_channels(self) -> int:
        if self.kind == HeadKind.SEGMENTATION:
            return self.num_classes + 1
        return self.num_classes


class ModelSpec(BaseModel):
    """Architecture descriptor: backbone blocks plus head.

    Examples:
        >>> spec = ModelSpec(backbone=[ConvBlockSpec(channels=8)],
        ...                  head=HeadSpec(kind=HeadKind.BINARY), input_shape=(16, 16, 1))
        >>> spec.pool_count
        1
    """

    backbone: list[ConvBlockSpec] = Field(default_factory=list)
    head: HeadSpec
    input_shape: tuple[int, int, int] = (64, 64, 1)
    dropout_rate: float = Field(default=0.5, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_geometry(self) -> "ModelSpec":
        height, width, channels = self.input_shape
        if min(height, width, channels) < 1:
            raise ValueError(f"invalid input shape {self.input_shape}")
        if self.head.kind == HeadKind.SEGMENTATION:
            if self.pool_count == 0:
                raise ValueError("segmentation backbone needs at least one pooled block")
            if any(block.stride != 1 for block in self.backbone):
                raise ValueError("segmentation backbone blocks must use stride 1")
            factor = 2**self.pool_count
            if height % factor or width % factor:
                raise ValueError(
                    f"segmentation input {height}x{width} not divisible by {factor}"
                )
        return self

    @property
    def pool_count(self) -> int:
        return sum(1 for block in self.backbone if block.pooling)


@dataclass
class Parameter:
    """A named weight tensor with its optional gradient buffer.

    Examples:
        >>> p = Parameter(np.zeros((2, 3)))
        >>> p.shape, p.grad is None
        ((2, 3), True)
    """

    value: np.ndarray
    grad: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.value = np.ascontiguousarray(self.value, dtype=np.float64)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.value.shape)


@dataclass(eq=False)
class ModelState:
    """Compiled layers and named weight tensors of one model.

    Tensor names start with ``backbone.`` or ``head.``; every tensor belongs to
    exactly one of the two partitions.
    """

    spec: ModelSpec
    layers: list[LayerSpec]
    params: dict[str, Parameter]
    tape: Optional[Any] = field(default=None, repr=False)

    @staticmethod
    def is_backbone(name: str) -> bool:
        return name.startswith("backbone.")

    def backbone_names(self) -> list[str]:
        return [name for name in self.params if self.is_backbone(name)]

    def head_names(self) -> list[str]:
        return [name for name in self.params if not self.is_backbone(name)]

    @property
    def parameter_count(self) -> int:
        return int(sum(p.value.size for p in self.params.values()))

    def snapshot(self) -> dict[str, np.ndarray]:
        """Copy of every weight tensor."""
        return {name: p.value.copy() for name, p in self.params.items()}

    def restore(self, snapshot: dict[str, np.ndarray]) -> None:
        """Load weights from a snapshot and drop gradients."""
        for name, value in snapshot.items():
            self.params[name] = Parameter(value.copy())
        self.tape = None

    def clone(self) -> "ModelState":
        return ModelState(
            spec=self.spec.model_copy(deep=True),
            layers=[layer.model_copy() for layer in self.layers],
            params={name: Parameter(p.value.copy()) for name, p in self.params.items()},
        )


@dataclass
class LossResult:
    value: float
    grad: np.ndarray


@dataclass
class Gradients:
    """Result of a backward pass: per-parameter gradients and the input gradient."""

    params: dict[str, np.ndarray]
    input: np.ndarray


# ============================================================================
# Training configuration
# ============================================================================


class EarlyStoppingConfig(BaseModel):
    """Early stopping on the validation loss.

    Examples:
        >>> cfg = EarlyStoppingConfig()
        >>> cfg.patience, cfg.min_delta, cfg.restore_best
        (5, 0.0001, True)
    """

    enabled: bool = True
    monitor: Literal["val_loss"] = "val_loss"
    patience: int = Field(default=5, ge=1)
    min_delta: float = Field(default=1e-4, ge=0.0)
    restore_best: bool = True


class AugmentConfig(BaseModel):
    """Random flip / zoom / shift applied to training samples.

    Examples:
        >>> AugmentConfig().zoom_range
        (0.9, 1.1)
        >>> AugmentConfig(zoom_range=(1.2, 0.8))
        Traceback (most recent call last):
        ...
        pydantic_core._pydantic_core.ValidationError: 1 validation error for AugmentConfig
        ...
    """

    horizontal_flip_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    vertical_flip_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    zoom_range: tuple[float, float] = (0.9, 1.1)
    shift_range: int = Field(default=4, ge=0, description="Maximum integer shift in pixels")

    @model_validator(mode="after")
    def _check_zoom(self) -> "AugmentConfig":
        low, high = self.zoom_range
        if not 0.0 < low <= 1.0 <= high:
            raise ValueError(f"zoom range {self.zoom_range} must bracket 1.0")
        return self


class TrainConfig(BaseModel):
    """Training hyperparameters.

    The defaults are declared pre-test values; nothing here is tuned.

    Examples:
        >>> cfg = TrainConfig()
        >>> cfg.optimizer.value, cfg.learning_rate, cfg.batch_size, cfg.epochs
        ('adam', 0.001, 16, 60)
    """

    epochs: int = Field(default=60, ge=1)
    batch_size: int = Field(default=16, ge=1)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = Field(default=1e-3, gt=0.0)
    early_stopping: EarlyStoppingConfig = Field(default_factory=EarlyStoppingConfig)
    dropout_rate: Optional[float] = Field(
        default=None,
        ge=0.0,
        lt=1.0,
        description="Overrides the dropout layers' rate when set",
    )
    augmentation: Optional[AugmentConfig] = None
    seed: int = 0


class TrainHistory(BaseModel):
    """Per-epoch record of a training run.

    Examples:
        >>> h = TrainHistory()
        >>> h.record(0.7, 0.6, 0.5)
        >>> h.epochs
        1
    """

    train_loss: list[float] = Field(default_factory=list)
    val_loss: list[float] = Field(default_factory=list)
    val_f1: list[float] = Field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0

    @model_validator(mode="after")
    def _check_lengths(self) -> "TrainHistory":
        if not len(self.train_loss) == len(self.val_loss) == len(self.val_f1):
            raise ValueError("history columns have different lengths")
        if self.best_epoch > self.stopped_epoch:
            raise ValueError("best epoch after stopped epoch")
        return self

    @property
    def epochs(self) -> int:
        return len(self.val_loss)

    def record(self, train_loss: float, val_loss: float, val_f1: float) -> None:
        self.train_loss.append(float(train_loss))
        self.val_loss.append(float(val_loss))
        self.val_f1.append(float(val_f1))
        self.stopped_epoch = len(self.val_loss)


# ============================================================================
# Knowledge transfer
# ============================================================================


class TransferPlan(BaseModel):
    """How a target model receives source weights.

    Examples:
        >>> TransferPlan().mode.value
        'none'
        >>> TransferPlan(mode=TransferMode.NONE, source_weights=Path("x.sdw"))
        Traceback (most recent call last):
        ...
        pydantic_core._pydantic_core.ValidationError: 1 validation error for TransferPlan
        ...
    """

    mode: TransferMode = TransferMode.NONE
    source_weights: Optional[Path] = None
    layer_matching: Literal["backbone-by-name"] = "backbone-by-name"
    head_handling: Literal["reinitialize"] = "reinitialize"

    @model_validator(mode="after")
    def _check_source(self) -> "TransferPlan":
        if self.mode == TransferMode.NONE and self.source_weights is not None:
            raise ValueError("transfer mode 'none' takes no source weights")
        return self


@dataclass
class TransferReport:
    """Outcome of a weight transfer."""

    state: ModelState
    copied: list[str] = field(default_factory=list)
    reinitialized: list[str] = field(default_factory=list)


class DomainTranslator(BaseModel):
    """Input-domain translator (identity or histogram matching).

    Examples:
        >>> DomainTranslator().kind.value
        'identity'
    """

    kind: TranslatorKind = TranslatorKind.IDENTITY
    reference_cdf: Optional[list[float]] = Field(
        default=None,
        description="Cumulative intensity histogram of the reference domain (256 bins)",
    )

    @model_validator(mode="after")
    def _check_reference(self) -> "DomainTranslator":
        if self.reference_cdf is not None:
            cdf = np.asarray(self.reference_cdf, dtype=np.float64)
            if cdf.shape != (256,):
                raise ValueError("reference CDF must have 256 bins")
            if np.any(np.diff(cdf) < 0) or not np.isclose(cdf[-1], 1.0):
                raise ValueError("reference CDF must be non-decreasing and end at 1")
        if self.kind == TranslatorKind.HISTOGRAM_MATCH and self.reference_cdf is None:
            raise ValueError("histogram matching needs a reference CDF")
        return self


# ============================================================================
# Synthetic parts and datasets
# ============================================================================


class DefectSpec(BaseModel):
    """One defect placed on a part's surface band."""

    defect_type: DefectType
    row: int = Field(ge=0, description="Center row in band coordinates")
    col: int = Field(ge=0, description="Center column in band coordinates")
    size: int = Field(ge=3, description="Extent in pixels")


class PartSurfaceSpec(BaseModel):
    """Geometry and content of one simulated part.

    The band is periodic in the column direction: segment ``i`` starts at
    column ``i * stride`` and the last segment wraps around to the first.

    Examples:
        >>> spec = PartSurfaceSpec(part_id="p0", segment_count=4, segment_size=64)
        >>> spec.overlap_pixels, spec.stride, spec.circumference, spec.band_height
        (6, 58, 232, 64)
    """

    part_id: str
    texture_family: str = "rubber"
    segment_count: int = Field(default=16, ge=1)
    segment_size: int = Field(default=64, ge=8)
    overlap: float = Field(default=0.1, ge=0.0, lt=0.5)
    defects: list[DefectSpec] = Field(default_factory=list)
    defect_types: list[DefectType] = Field(default_factory=lambda: list(DEFAULT_DEFECT_TYPES))
    noise_sigma: float = Field(default=0.01, ge=0.0)
    illumination_variation: float = Field(default=0.03, ge=0.0)
    seed: int = 0

    @property
    def overlap_pixels(self) -> int:
        return int(round(self.overlap * self.segment_size))

    @property
    def stride(self) -> int:
        return self.segment_size - self.overlap_pixels

    @property
    def circumference(self) -> int:
        return self.segment_count * self.stride

    @property
    def band_height(self) -> int:
        return self.segment_size


@dataclass
class ImageSample:
    """One segment image with its label and optional ground-truth mask."""

    image: np.ndarray
    part_id: str
    segment_index: int
    label: int
    mask: Optional[np.ndarray] = None

    @property
    def sample_id(self) -> str:
        return f"{self.part_id}_{self.segment_index:03d}"

    @property
    def is_defective(self) -> bool:
        return self.label > 0


@dataclass
class PartRecord:
    """A simulated part and its ordered, overlapping segment images."""

    part_id: str
    samples: list[ImageSample]

    @property
    def segment_count(self) -> int:
        return len(self.samples)


class SampleEntry(BaseModel):
    image_path: str
    part_id: str
    segment_index: int = Field(ge=0)
    label: int = Field(ge=0)
    mask_path: Optional[str] = None

    @property
    def key(self) -> tuple[str, int]:
        return (self.part_id, self.segment_index)


class DatasetManifest(BaseModel):
    """Description of a dataset: label names and sample entries.

    Samples are resolved either from an in-memory cache (freshly generated
    corpora) or from files below ``root`` (datasets read from disk). Subsets
    share both.

    Examples:
        >>> m = DatasetManifest(name="d", label_names=["ok", "nonfill"], samples=[
        ...     SampleEntry(image_path="images/a_000.png", part_id="a", segment_index=0, label=1),
        ...     SampleEntry(image_path="images/a_001.png", part_id="a", segment_index=1, label=0),
        ... ])
        >>> m.label_counts()
        {0: 1, 1: 1}
        >>> m.part_ids()
        ['a']
    """

    name: str
    label_names: list[str]
    samples: list[SampleEntry] = Field(default_factory=list)
    seed: Optional[int] = None
    generator_version: str = "0.0.0"

    _root: Optional[Path] = PrivateAttr(default=None)
    _cache: dict[tuple[str, int], ImageSample] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_entries(self) -> "DatasetManifest":
        seen: set[tuple[str, int]] = set()
        for entry in self.samples:
            if entry.label >= len(self.label_names):
                raise ValueError(
                    f"label {entry.label} of {entry.image_path} outside declared set"
                )
            if entry.key in seen:
                raise ValueError(f"duplicate sample {entry.key}")
            seen.add(entry.key)
        return self

    @property
    def root(self) -> Optional[Path]:
        return self._root

    @property
    def num_classes(self) -> int:
        return len(self.label_names)

    def attach(self, samples: dict[tuple[str, int], ImageSample], root: Optional[Path] = None) -> None:
        """Register in-memory samples and/or the directory that holds the files."""
        self._cache.update(samples)
        if root is not None:
            self._root = root

    def cached(self, key: tuple[str, int]) -> Optional[ImageSample]:
        return self._cache.get(key)

    def subset(self, entries: list[SampleEntry], name: Optional[str] = None) -> "DatasetManifest":
        """A manifest over ``entries`` sharing this manifest's sample sources."""
        child = DatasetManifest(
            name=name or self.name,
            label_names=list(self.label_names),
            samples=list(entries),
            seed=self.seed,
            generator_version=self.generator_version,
        )
        child._cache = self._cache
        child._root = self._root
        return child

    def part_ids(self) -> list[str]:
        return sorted({entry.part_id for entry in self.samples})

    def label_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for entry in self.samples:
            counts[entry.label] = counts.get(entry.label, 0) + 1
        return dict(sorted(counts.items()))

    def defective_count(self) -> int:
        return sum(1 for entry in self.samples if entry.label > 0)


# ============================================================================
# Evaluation and explanation results
# ============================================================================


class MetricsReport(BaseModel):
    """Accuracy / precision / recall / F1 of one prediction set.

    ``confusion[i][j]`` counts samples with label ``i`` predicted as ``j``.
    """

    accuracy: float = Field(ge=0.0, le=1.0)
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)
    mode: AveragingMode = AveragingMode.BINARY
    confusion: list[list[int]] = Field(default_factory=list)
    support: int = Field(default=0, ge=0)

    def values(self) -> "MetricValues":
        return MetricValues(
            accuracy=self.accuracy, precision=self.precision, recall=self.recall, f1=self.f1
        )


class MetricValues(BaseModel):
    accuracy: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0


@dataclass
class PartVerdict:
    """Part-level decision aggregated from segment verdicts.

    Examples:
        >>> PartVerdict(part_id="p", segment_verdicts=[0, 1, 0], min_count=1).verdict
        True
    """

    part_id: str
    segment_verdicts: list[int]
    min_count: int = 1

    @property
    def positive_count(self) -> int:
        return sum(1 for v in self.segment_verdicts if v)

    @property
    def verdict(self) -> bool:
        return self.positive_count >= self.min_count


@dataclass
class SaliencyMap:
    """Absolute input-gradient of a class score, one value per pixel."""

    values: np.ndarray
    sample_id: str = ""
    target_class: int = 1

    def normalized(self) -> np.ndarray:
        """Max-normalized copy in [0, 1]; an all-zero map stays zero."""
        peak = float(self.values.max()) if self.values.size else 0.0
        if peak <= 0.0:
            return np.zeros_like(self.values)
        return self.values / peak


# ============================================================================
# Corpora and grid configuration
# ============================================================================


class CorpusConfig(BaseModel):
    """Synthetic part corpus (target rubber parts or industrial metal parts).

    Examples:
        >>> cfg = CorpusConfig()
        >>> cfg.parts, cfg.segment_count, cfg.segment_size, cfg.texture_family
        (240, 16, 64, 'rubber')
    """

    name: str = "target"
    texture_family: str = "rubber"
    parts: int = Field(default=240, ge=1)
    segment_count: int = Field(default=16, ge=1)
    segment_size: int = Field(default=64, ge=8)
    overlap: float = Field(default=0.1, ge=0.0, lt=0.5)
    defect_types: list[DefectType] = Field(default_factory=lambda: list(DEFAULT_DEFECT_TYPES))
    defects_per_part: tuple[int, int] = (1, 2)
    defect_size_range: tuple[int, int] = (8, 20)
    noise_sigma: float = Field(default=0.01, ge=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_ranges(self) -> "CorpusConfig":
        low, high = self.defects_per_part
        if not 0 <= low <= high:
            raise ValueError(f"invalid defects_per_part {self.defects_per_part}")
        smallest, largest = self.defect_size_range
        if not 3 <= smallest <= largest < self.segment_size:
            raise ValueError(
                f"defect sizes {self.defect_size_range} must lie in [3, {self.segment_size})"
            )
        if not self.defect_types:
            raise ValueError("at least one defect type is required")
        return self


class TextureCorpusConfig(BaseModel):
    """Many-class texture corpus used as the generic-transfer source."""

    name: str = "generic"
    families: list[str] = Field(
        default_factory=lambda: ["blobs", "checker", "waves", "dots", "crosshatch", "speckle"]
    )
    samples_per_family: int = Field(default=120, ge=1)
    image_size: int = Field(default=64, ge=8)
    seed: int = 1


class CorporaConfig(BaseModel):
    """Everything needed to build the target and source corpora of a grid."""

    target: CorpusConfig = Field(default_factory=CorpusConfig)
    industrial: Optional[CorpusConfig] = Field(
        default_factory=lambda: CorpusConfig(
            name="industrial", texture_family="metal", parts=160, seed=7
        )
    )
    generic: Optional[TextureCorpusConfig] = Field(default_factory=TextureCorpusConfig)
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    balance: bool = True
    seed: int = 0

    @model_validator(mode="after")
    def _check_ratios(self) -> "CorporaConfig":
        if any(r <= 0 for r in self.split_ratios) or abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios {self.split_ratios} must be positive and sum to 1")
        sizes = {self.target.segment_size}
        if self.industrial is not None:
            sizes.add(self.industrial.segment_size)
        if self.generic is not None:
            sizes.add(self.generic.image_size)
        if len(sizes) != 1:
            raise ValueError(f"all corpora must share one image size, got {sorted(sizes)}")
        return self


class Scenario(BaseModel):
    """One cell of the information-value x knowledge-transfer grid."""

    experiment_id: str
    information_value: HeadKind
    knowledge_transfer: TransferMode
    design_features: dict[str, bool]
    seeds: list[int] = Field(default_factory=lambda: [1, 2, 3])

    @model_validator(mode="after")
    def _check_flags(self) -> "Scenario":
        expected = {f"DF{i}" for i in range(1, 13)}
        if set(self.design_features) != expected:
            raise ValueError(f"{self.experiment_id}: design features must be exactly DF1..DF12")
        head_flag = {
            HeadKind.BINARY: "DF5",
            HeadKind.MULTICLASS: "DF6",
            HeadKind.SEGMENTATION: "DF7",
        }[self.information_value]
        flags = self.design_features
        fixed = [f for f in ("DF1", "DF2", "DF3") if not flags[f]]
        if fixed:
            raise ValueError(
                f"{self.experiment_id}: {', '.join(fixed)} cannot be disabled; "
                "segment capture, labelling and part aggregation always run"
            )
        if not flags[head_flag]:
            raise ValueError(f"{self.experiment_id}: {head_flag} must be set for its head")
        extra_heads = [f for f in ("DF5", "DF6", "DF7") if f != head_flag and flags[f]]
        if extra_heads:
            raise ValueError(
                f"{self.experiment_id}: {', '.join(extra_heads)} conflict with the {head_flag} head"
            )
        uses_transfer = flags["DF8"] or flags["DF9"]
        if uses_transfer != (self.knowledge_transfer != TransferMode.NONE):
            raise ValueError(f"{self.experiment_id}: DF8/DF9 disagree with knowledge transfer")
        if flags["DF8"] and flags["DF9"]:
            raise ValueError(f"{self.experiment_id}: DF8 and DF9 are mutually exclusive")
        if flags["DF9"] and self.knowledge_transfer != TransferMode.INDUSTRIAL:
            raise ValueError(f"{self.experiment_id}: DF9 translates from the industrial corpus")
        return self

    def enabled(self, feature: str) -> bool:
        return self.design_features[feature]

    @property
    def uses_translation(self) -> bool:
        return self.design_features["DF9"]


class GridConfig(BaseModel):
    """Grid run configuration (read from JSON or YAML).

    Examples:
        >>> cfg = GridConfig()
        >>> cfg.scenarios
        ['E1', 'E2', 'E3', 'E4', 'E5', 'E6', 'E7', 'E8']
        >>> cfg.seeds
        [1, 2, 3]
    """

    corpora: CorporaConfig = Field(default_factory=CorporaConfig)
    scenarios: list[str] = Field(
        default_factory=lambda: [f"E{i}" for i in range(1, 9)]
    )
    information_values: Optional[list[HeadKind]] = Field(
        default=None, description="Restrict the grid to these information values"
    )
    design_features: dict[str, dict[str, bool]] = Field(
        default_factory=dict,
        description="Per-experiment overrides of individual DF flags",
    )
    seeds: list[int] = Field(default_factory=lambda: [1, 2, 3])
    train: TrainConfig = Field(default_factory=TrainConfig)
    augmentation: AugmentConfig = Field(default_factory=AugmentConfig)
    dropout_rate: float = Field(default=0.5, ge=0.0, lt=1.0)
    saliency_samples: int = Field(default=5, ge=0)
    part_min_count: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1)
    force: bool = Field(default=False, description="Retrain cached source models")


class ScenarioRun(BaseModel):
    """Outcome of one scenario for one seed."""

    experiment_id: str
    seed: int
    status: Literal["ok", "failed"] = "ok"
    error: Optional[str] = None
    report: Optional[MetricsReport] = None
    binary_report: Optional[MetricsReport] = None
    part_report: Optional[MetricsReport] = None
    test_tuned_report: Optional[MetricsReport] = None
    threshold: Optional[float] = None
    history: Optional[TrainHistory] = None
    source_history: Optional[TrainHistory] = None
    focus_ratios: list[float] = Field(default_factory=list)
    weights_path: Optional[str] = None
    history_path: Optional[str] = None

    @property
    def stop_epoch(self) -> Optional[int]:
        return self.history.stopped_epoch if self.history else None


class ScenarioSummary(BaseModel):
    """Mean and max-min spread of a scenario's metrics over its seeds."""

    experiment_id: str
    information_value: HeadKind
    knowledge_transfer: TransferMode
    mean: MetricValues
    spread: MetricValues
    mean_binary_f1: float
    mean_stop_epoch: Optional[float] = None
    median_focus_ratio: Optional[float] = None
    seeds: list[int] = Field(default_factory=list)
    failed_seeds: list[int] = Field(default_factory=list)


class HypothesisCheck(BaseModel):
    name: str
    holds: bool
    detail: str


class GridResult(BaseModel):
    runs: list[ScenarioRun] = Field(default_factory=list)
    summaries: list[ScenarioSummary] = Field(default_factory=list)
    hypotheses: list[HypothesisCheck] = Field(default_factory=list)

    def failed_runs(self) -> list[ScenarioRun]:
        return [run for run in self.runs if run.status == "failed"]

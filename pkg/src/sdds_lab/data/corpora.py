"""Target and source corpora prepared for a scenario grid."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from sdds_lab.data.balance import balance_undersample
from sdds_lab.data.dataset_io import read_dataset, write_dataset
from sdds_lab.data.generator import generate_corpus, generate_texture_corpus
from sdds_lab.data.split import split_by_part
from sdds_lab.models import CorporaConfig, DatasetManifest

logger = logging.getLogger(__name__)

TARGET, GENERIC, INDUSTRIAL = "target", "generic", "industrial"


@dataclass
class CorpusSplits:
    """Train / validation / test splits of one corpus.

    ``raw_test`` is the unbalanced test split holding every segment of the
    test parts, used for part-level verdicts. ``raw_train`` and ``raw_val``
    are the unbalanced train and validation splits.
    """

    train: DatasetManifest
    val: DatasetManifest
    test: DatasetManifest
    raw_test: DatasetManifest
    raw_train: Optional[DatasetManifest] = None
    raw_val: Optional[DatasetManifest] = None

    @property
    def label_names(self) -> list[str]:
        return self.train.label_names

    def unbalanced(self) -> "CorpusSplits":
        """The same parts with no undersampling applied to any split."""
        train = self.raw_train if self.raw_train is not None else self.train
        val = self.raw_val if self.raw_val is not None else self.val
        return CorpusSplits(
            train=train, val=val, test=self.raw_test, raw_test=self.raw_test,
            raw_train=train, raw_val=val,
        )


@dataclass
class Corpora:
    target: CorpusSplits
    generic: Optional[CorpusSplits] = None
    industrial: Optional[CorpusSplits] = None


@dataclass
class RawCorpora:
    """Unsplit manifests as generated or read from disk."""

    target: DatasetManifest
    generic: Optional[DatasetManifest] = None
    industrial: Optional[DatasetManifest] = None

    def items(self) -> list[tuple[str, DatasetManifest]]:
        found = [(TARGET, self.target), (GENERIC, self.generic), (INDUSTRIAL, self.industrial)]
        return [(name, manifest) for name, manifest in found if manifest is not None]


def prepare_splits(
    manifest: DatasetManifest,
    ratios: tuple[float, float, float],
    seed: int,
    balance: bool,
) -> CorpusSplits:
    """Split by part, then balance each split independently when ``balance`` is set."""
    train, val, test = split_by_part(manifest, ratios, seed)
    if not balance:
        return CorpusSplits(
            train=train, val=val, test=test, raw_test=test, raw_train=train, raw_val=val
        )
    return CorpusSplits(
        train=balance_undersample(train, seed + 1),
        val=balance_undersample(val, seed + 2),
        test=balance_undersample(test, seed + 3),
        raw_test=test,
        raw_train=train,
        raw_val=val,
    )


def generate_raw_corpora(config: CorporaConfig) -> RawCorpora:
    _, target = generate_corpus(config.target)
    industrial = generate_corpus(config.industrial)[1] if config.industrial else None
    generic = generate_texture_corpus(config.generic) if config.generic else None
    return RawCorpora(target=target, generic=generic, industrial=industrial)


def write_raw_corpora(corpora: RawCorpora, directory: Path) -> dict[str, Path]:
    """Write each corpus into ``directory/<target|generic|industrial>``."""
    return {name: write_dataset(manifest, Path(directory) / name) for name, manifest in corpora.items()}


def read_raw_corpora(directory: Path) -> RawCorpora:
    """Read the corpora under ``directory``; source corpora are optional."""
    directory = Path(directory)

    def optional(name: str) -> Optional[DatasetManifest]:
        return read_dataset(directory / name) if (directory / name).is_dir() else None

    return RawCorpora(
        target=read_dataset(directory / TARGET),
        generic=optional(GENERIC),
        industrial=optional(INDUSTRIAL),
    )


def prepare_corpora(raw: RawCorpora, config: CorporaConfig) -> Corpora:
    """Split and balance the raw corpora; the generic corpus is split but never balanced.

    Examples:
        >>> from sdds_lab.models import CorpusConfig
        >>> cfg = CorporaConfig(
        ...     target=CorpusConfig(parts=12, segment_count=4, segment_size=16,
        ...                         defect_size_range=(4, 6), defects_per_part=(1, 1)),
        ...     industrial=None, generic=None)
        >>> corpora = prepare_corpora(generate_raw_corpora(cfg), cfg)
        >>> train = corpora.target.train
        >>> train.defective_count() * 2 == len(train.samples)
        True
    """

    def splits(manifest: Optional[DatasetManifest], balance: bool, offset: int) -> Optional[CorpusSplits]:
        if manifest is None:
            return None
        return prepare_splits(manifest, config.split_ratios, config.seed + offset, balance)

    target = splits(raw.target, config.balance, 0)
    assert target is not None
    corpora = Corpora(
        target=target,
        generic=splits(raw.generic, False, 100),
        industrial=splits(raw.industrial, config.balance, 200),
    )
    logger.info(
        f"Prepared corpora: target train/val/test = {len(target.train.samples)}/"
        f"{len(target.val.samples)}/{len(target.test.samples)}"
    )
    return corpora


def build_corpora(config: CorporaConfig) -> Corpora:
    return prepare_corpora(generate_raw_corpora(config), config)

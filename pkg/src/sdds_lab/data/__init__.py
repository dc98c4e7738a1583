"""Synthetic part corpora: generation, balancing, splitting, augmentation and dataset files."""

from sdds_lab.data.augment import augment
from sdds_lab.data.balance import EmptyClassError, balance_undersample
from sdds_lab.data.dataset_io import DatasetReadError, read_dataset, write_dataset
from sdds_lab.data.generator import (
    GeometryError,
    generate_corpus,
    generate_part,
    generate_texture_corpus,
)
from sdds_lab.data.split import split_by_part

__all__ = [
    "DatasetReadError",
    "EmptyClassError",
    "GeometryError",
    "augment",
    "balance_undersample",
    "generate_corpus",
    "generate_part",
    "generate_texture_corpus",
    "read_dataset",
    "split_by_part",
    "write_dataset",
]

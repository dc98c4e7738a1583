"""Synthetic part generator.

A part is a textured band wrapped around a rotating cylinder. The camera sees
``segment_count`` overlapping windows of ``segment_size x segment_size``
pixels; each window becomes one labeled segment image with its ground-truth
mask.
"""

import logging
from collections import Counter
from typing import Optional

import numpy as np

from sdds_lab import __version__
from sdds_lab.data.textures import DefectRegistry, TextureRegistry
from sdds_lab.models import (
    NON_DEFECTIVE_LABEL,
    CorpusConfig,
    DatasetManifest,
    DefectSpec,
    DefectType,
    ImageSample,
    PartRecord,
    PartSurfaceSpec,
    SampleEntry,
    TextureCorpusConfig,
)

logger = logging.getLogger(__name__)


class GeometryError(ValueError):
    """Part geometry or defect placement is invalid."""


def label_names_for(defect_types: list[DefectType]) -> list[str]:
    """Label set: the non-defective class followed by the declared defect types.

    Examples:
        >>> from sdds_lab.models import DEFAULT_DEFECT_TYPES
        >>> label_names_for(list(DEFAULT_DEFECT_TYPES))
        ['ok', 'nonfill', 'joining_mark', 'dirt']
    """
    return [NON_DEFECTIVE_LABEL] + [t.value for t in defect_types]


def _validate(spec: PartSurfaceSpec) -> None:
    if spec.stride < 1:
        raise GeometryError(f"{spec.part_id}: overlap leaves no stride")
    for defect in spec.defects:
        if defect.size >= spec.segment_size:
            raise GeometryError(
                f"{spec.part_id}: defect of size {defect.size} does not fit a "
                f"{spec.segment_size}px segment"
            )
        if defect.defect_type not in spec.defect_types:
            raise GeometryError(
                f"{spec.part_id}: defect type '{defect.defect_type.value}' is not in the label set"
            )
        if defect.row >= spec.band_height or defect.col >= spec.circumference:
            raise GeometryError(
                f"{spec.part_id}: defect at ({defect.row}, {defect.col}) lies outside the "
                f"{spec.band_height}x{spec.circumference} band"
            )


def segment_label(mask: np.ndarray) -> int:
    """Most frequent defect class in ``mask``; 0 when the mask is empty.

    Ties go to the smaller class id.

    Examples:
        >>> segment_label(np.array([[0, 2], [2, 1]]))
        2
        >>> segment_label(np.zeros((2, 2), dtype=int))
        0
    """
    counts = Counter(int(v) for v in mask[mask > 0].ravel())
    if not counts:
        return 0
    return min(counts, key=lambda label: (-counts[label], label))


def render_band(spec: PartSurfaceSpec) -> tuple[np.ndarray, np.ndarray]:
    """Render the full surface band and its class mask.

    Returns:
        (band, mask) of shape ``band_height x circumference``
    """
    _validate(spec)
    rng = np.random.default_rng(spec.seed)
    height, circumference = spec.band_height, spec.circumference
    band = TextureRegistry.create(spec.texture_family).render(height, circumference, rng)
    phase = rng.uniform(0.0, 2 * np.pi)
    columns = np.arange(circumference)
    illumination = 1.0 + spec.illumination_variation * np.sin(
        2 * np.pi * columns / circumference + phase
    )
    band = band * illumination[None, :]

    mask = np.zeros((height, circumference), dtype=np.int64)
    for defect in spec.defects:
        class_id = spec.defect_types.index(defect.defect_type) + 1
        DefectRegistry.create(defect.defect_type).apply(band, mask, defect, class_id, rng)

    if spec.noise_sigma > 0:
        band = band + rng.normal(0.0, spec.noise_sigma, size=band.shape)
    return np.clip(band, 0.0, 1.0), mask


def generate_part(spec: PartSurfaceSpec) -> PartRecord:
    """Render a part and slice it into overlapping, auto-labeled segments.

    Segment ``i`` covers band columns ``i * stride ... i * stride + size - 1``
    modulo the circumference. A segment is defective iff a defect pixel falls
    inside it.

    Args:
        spec: Part geometry, texture and defects

    Returns:
        PartRecord with ``segment_count`` samples

    Raises:
        GeometryError: if a defect is too large, outside the band or of an undeclared type

    Examples:
        >>> part = generate_part(PartSurfaceSpec(part_id="p0", segment_count=4, segment_size=16))
        >>> part.segment_count, {s.label for s in part.samples}
        (4, {0})
        >>> part.samples[0].image.shape
        (16, 16, 1)
    """
    band, mask = render_band(spec)
    size = spec.segment_size
    samples = []
    for index in range(spec.segment_count):
        columns = (index * spec.stride + np.arange(size)) % spec.circumference
        segment_mask = mask[:, columns]
        samples.append(
            ImageSample(
                image=band[:, columns][..., None],
                part_id=spec.part_id,
                segment_index=index,
                label=segment_label(segment_mask),
                mask=segment_mask,
            )
        )
    return PartRecord(part_id=spec.part_id, samples=samples)


def random_part_spec(config: CorpusConfig, index: int, rng: np.random.Generator) -> PartSurfaceSpec:
    """Draw the defects and seed of the ``index``-th part of a corpus."""
    template = PartSurfaceSpec(
        part_id=f"{config.name}-p{index:04d}",
        texture_family=config.texture_family,
        segment_count=config.segment_count,
        segment_size=config.segment_size,
        overlap=config.overlap,
        defect_types=list(config.defect_types),
        noise_sigma=config.noise_sigma,
        seed=int(rng.integers(0, 2**31 - 1)),
    )
    low, high = config.defects_per_part
    smallest, largest = config.defect_size_range
    defects = []
    for _ in range(int(rng.integers(low, high + 1))):
        size = int(rng.integers(smallest, largest + 1))
        defects.append(
            DefectSpec(
                defect_type=config.defect_types[int(rng.integers(0, len(config.defect_types)))],
                row=int(rng.integers(size // 2, template.band_height - size // 2)),
                col=int(rng.integers(0, template.circumference)),
                size=size,
            )
        )
    return template.model_copy(update={"defects": defects})


def _entry(sample: ImageSample) -> SampleEntry:
    return SampleEntry(
        image_path=f"images/{sample.sample_id}.png",
        part_id=sample.part_id,
        segment_index=sample.segment_index,
        label=sample.label,
        mask_path=f"masks/{sample.sample_id}.png" if sample.mask is not None else None,
    )


def manifest_from_samples(
    name: str, label_names: list[str], samples: list[ImageSample], seed: Optional[int]
) -> DatasetManifest:
    """Manifest over in-memory samples, with the samples attached as its cache."""
    manifest = DatasetManifest(
        name=name,
        label_names=label_names,
        samples=[_entry(s) for s in samples],
        seed=seed,
        generator_version=__version__,
    )
    manifest.attach({(s.part_id, s.segment_index): s for s in samples})
    return manifest


def generate_corpus(config: CorpusConfig) -> tuple[list[PartRecord], DatasetManifest]:
    """Generate ``config.parts`` parts and a manifest over all their segments.

    Examples:
        >>> cfg = CorpusConfig(parts=3, segment_count=4, segment_size=16,
        ...                    defect_size_range=(4, 6), seed=5)
        >>> parts, manifest = generate_corpus(cfg)
        >>> len(parts), len(manifest.samples)
        (3, 12)
    """
    rng = np.random.default_rng(config.seed)
    parts = [generate_part(random_part_spec(config, i, rng)) for i in range(config.parts)]
    samples = [sample for part in parts for sample in part.samples]
    manifest = manifest_from_samples(
        config.name, label_names_for(config.defect_types), samples, config.seed
    )
    logger.info(
        f"Generated corpus '{config.name}': {len(parts)} parts, {len(samples)} segments, "
        f"{manifest.defective_count()} defective"
    )
    return parts, manifest


def generate_texture_corpus(config: TextureCorpusConfig) -> DatasetManifest:
    """Many-class texture corpus; each image is its own single-segment part.

    Examples:
        >>> m = generate_texture_corpus(TextureCorpusConfig(samples_per_family=2, image_size=16))
        >>> len(m.samples), m.label_names[:2]
        (12, ['blobs', 'checker'])
    """
    rng = np.random.default_rng(config.seed)
    samples = []
    for label, family in enumerate(config.families):
        texture = TextureRegistry.create(family)
        for j in range(config.samples_per_family):
            image = texture.render(config.image_size, config.image_size, rng)
            samples.append(
                ImageSample(
                    image=image[..., None],
                    part_id=f"{config.name}-{family}-{j:04d}",
                    segment_index=0,
                    label=label,
                )
            )
    manifest = manifest_from_samples(config.name, list(config.families), samples, config.seed)
    logger.info(
        f"Generated texture corpus '{config.name}': {len(samples)} images, "
        f"{len(config.families)} families"
    )
    return manifest


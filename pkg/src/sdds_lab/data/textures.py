"""Procedural surface textures and defect renderers.

Textures are registered by family name. ``rubber`` and ``metal`` render the
periodic part bands; the remaining families make up the generic texture
corpus. All smoothing wraps around the borders, so a band rendered with width
equal to the part circumference is seamless where the last segment meets the
first.

Examples:
    >>> import numpy as np
    >>> band = TextureRegistry.create("rubber").render(16, 32, np.random.default_rng(0))
    >>> band.shape, bool(band.min() >= 0.0 and band.max() <= 1.0)
    ((16, 32), True)
    >>> "metal" in TextureRegistry.list_families()
    True
"""

import logging
from abc import ABC, abstractmethod
from typing import ClassVar, Union

import numpy as np
from scipy.ndimage import gaussian_filter

from sdds_lab.models import DefectSpec, DefectType

logger = logging.getLogger(__name__)

GENERIC_FAMILIES = ("blobs", "checker", "waves", "dots", "crosshatch", "speckle")


def _smooth_noise(
    rng: np.random.Generator, height: int, width: int, sigma: Union[float, tuple[float, float]]
) -> np.ndarray:
    """Unit-variance smoothed gaussian noise with periodic borders."""
    field = gaussian_filter(rng.standard_normal((height, width)), sigma=sigma, mode="wrap")
    spread = field.std()
    return field / spread if spread > 0 else field


class Texture(ABC):
    family: ClassVar[str]

    @abstractmethod
    def render(self, height: int, width: int, rng: np.random.Generator) -> np.ndarray:
        """Grayscale texture in [0, 1] of shape ``height x width``."""
        ...


class TextureRegistry:
    """Registry of texture families."""

    _by_family: dict[str, type[Texture]] = {}

    @classmethod
    def register(cls, texture_class: type[Texture]) -> type[Texture]:
        cls._by_family[texture_class.family] = texture_class
        logger.debug(f"Registered texture: {texture_class.family}")
        return texture_class

    @classmethod
    def create(cls, family: str) -> Texture:
        try:
            return cls._by_family[family]()
        except KeyError:
            raise ValueError(
                f"Unknown texture family '{family}'; known: {', '.join(sorted(cls._by_family))}"
            ) from None

    @classmethod
    def list_families(cls) -> list[str]:
        return list(cls._by_family)

    @classmethod
    def clear(cls) -> None:
        """Clear all registered texture families (for testing)."""
        cls._by_family = {}


@TextureRegistry.register
class RubberTexture(Texture):
    """Dark, low-contrast grain."""

    family = "rubber"

    def render(self, height, width, rng):
        base = rng.uniform(0.28, 0.36)
        grain = 0.035 * _smooth_noise(rng, height, width, 1.2)
        mottling = 0.025 * _smooth_noise(rng, height, width, 6.0)
        return np.clip(base + grain + mottling, 0.0, 1.0)


@TextureRegistry.register
class MetalTexture(Texture):
    """Bright surface with striations running along the rotation direction."""

    family = "metal"

    def render(self, height, width, rng):
        base = rng.uniform(0.55, 0.65)
        striations = 0.08 * _smooth_noise(rng, height, width, (0.7, 14.0))
        grain = 0.02 * _smooth_noise(rng, height, width, 0.6)
        return np.clip(base + striations + grain, 0.0, 1.0)


@TextureRegistry.register
class BlobsTexture(Texture):
    family = "blobs"

    def render(self, height, width, rng):
        field = _smooth_noise(rng, height, width, rng.uniform(2.5, 5.0))
        return np.clip(0.5 + 0.35 * np.tanh(2.0 * field), 0.0, 1.0)


@TextureRegistry.register
class CheckerTexture(Texture):
    family = "checker"

    def render(self, height, width, rng):
        period = int(rng.integers(6, 17))
        rows, cols = np.mgrid[0:height, 0:width]
        offset_r, offset_c = rng.integers(0, period, size=2)
        cells = ((rows + offset_r) // period + (cols + offset_c) // period) % 2
        low, high = sorted(rng.uniform(0.15, 0.85, size=2))
        return np.clip(np.where(cells == 1, high, low) + 0.02 * rng.standard_normal((height, width)), 0.0, 1.0)


@TextureRegistry.register
class WavesTexture(Texture):
    family = "waves"

    def render(self, height, width, rng):
        rows, cols = np.mgrid[0:height, 0:width]
        angle = rng.uniform(0.0, np.pi)
        frequency = rng.uniform(0.08, 0.25)
        phase = rng.uniform(0.0, 2 * np.pi)
        wave = np.sin(2 * np.pi * frequency * (rows * np.sin(angle) + cols * np.cos(angle)) + phase)
        return np.clip(0.5 + 0.3 * wave + 0.02 * rng.standard_normal((height, width)), 0.0, 1.0)


@TextureRegistry.register
class DotsTexture(Texture):
    family = "dots"

    def render(self, height, width, rng):
        field = np.zeros((height, width))
        count = int(rng.integers(8, 24))
        field[rng.integers(0, height, count), rng.integers(0, width, count)] = 1.0
        dots = gaussian_filter(field, sigma=rng.uniform(1.0, 2.0), mode="wrap")
        dots = dots / dots.max() if dots.max() > 0 else dots
        return np.clip(0.2 + 0.7 * dots + 0.02 * rng.standard_normal((height, width)), 0.0, 1.0)


@TextureRegistry.register
class CrosshatchTexture(Texture):
    family = "crosshatch"

    def render(self, height, width, rng):
        rows, cols = np.mgrid[0:height, 0:width]
        angle = rng.uniform(0.0, np.pi / 2)
        period = rng.uniform(5.0, 10.0)
        first = np.cos(2 * np.pi * (rows * np.sin(angle) + cols * np.cos(angle)) / period)
        second = np.cos(2 * np.pi * (rows * np.cos(angle) - cols * np.sin(angle)) / period)
        lines = np.maximum(first, second) > 0.7
        return np.clip(np.where(lines, 0.8, 0.3) + 0.03 * rng.standard_normal((height, width)), 0.0, 1.0)


@TextureRegistry.register
class SpeckleTexture(Texture):
    family = "speckle"

    def render(self, height, width, rng):
        field = gaussian_filter(rng.random((height, width)), sigma=0.6, mode="wrap")
        return np.clip(rng.uniform(0.3, 0.7) + 0.6 * (field - field.mean()), 0.0, 1.0)


# ============================================================================
# Defects
# ============================================================================


def _offsets(height: int, circumference: int, defect: DefectSpec) -> tuple[np.ndarray, np.ndarray]:
    """Row and column offsets of every band pixel from the defect centre.

    Column offsets wrap around the circumference.
    """
    rows = np.arange(height)[:, None] - defect.row
    cols = (np.arange(circumference)[None, :] - defect.col + circumference // 2) % circumference
    cols = cols - circumference // 2
    return np.broadcast_to(rows, (height, circumference)), np.broadcast_to(cols, (height, circumference))


class DefectRenderer(ABC):
    defect_type: ClassVar[DefectType]

    @abstractmethod
    def footprint(
        self, defect: DefectSpec, height: int, circumference: int, rng: np.random.Generator
    ) -> tuple[np.ndarray, float]:
        """Boolean defect region on the band and the intensity it is drawn with."""
        ...

    def apply(
        self,
        band: np.ndarray,
        mask: np.ndarray,
        defect: DefectSpec,
        class_id: int,
        rng: np.random.Generator,
    ) -> None:
        """Draw the defect into ``band`` and mark its pixels with ``class_id`` in ``mask``."""
        region, intensity = self.footprint(defect, band.shape[0], band.shape[1], rng)
        if not region.any():
            row = min(max(defect.row, 0), band.shape[0] - 1)
            region = np.zeros_like(region)
            region[row, defect.col % band.shape[1]] = True
        band[region] = np.clip(intensity + 0.02 * rng.standard_normal(int(region.sum())), 0.0, 1.0)
        mask[region] = class_id


class DefectRegistry:
    """Registry of defect renderers keyed by defect type."""

    _by_type: dict[DefectType, type[DefectRenderer]] = {}

    @classmethod
    def register(cls, renderer_class: type[DefectRenderer]) -> type[DefectRenderer]:
        cls._by_type[renderer_class.defect_type] = renderer_class
        logger.debug(f"Registered defect renderer: {renderer_class.defect_type.value}")
        return renderer_class

    @classmethod
    def create(cls, defect_type: DefectType) -> DefectRenderer:
        try:
            return cls._by_type[defect_type]()
        except KeyError:
            raise ValueError(f"No renderer for defect type '{defect_type}'") from None

    @classmethod
    def list_types(cls) -> list[DefectType]:
        return list(cls._by_type)

    @classmethod
    def clear(cls) -> None:
        """Clear all registered defect renderers (for testing)."""
        cls._by_type = {}


@DefectRegistry.register
class NonfillRenderer(DefectRenderer):
    """Irregular patch of missing material, lighter than the surface."""

    defect_type = DefectType.NONFILL

    def footprint(self, defect, height, circumference, rng):
        rows, cols = _offsets(height, circumference, defect)
        radius_r, radius_c = defect.size / 2 * rng.uniform(0.6, 1.0, size=2)
        angle = np.arctan2(rows, cols)
        wobble = 1.0 + 0.2 * np.sin(3 * angle + rng.uniform(0, 2 * np.pi))
        distance = np.sqrt((rows / radius_r) ** 2 + (cols / radius_c) ** 2)
        return distance <= wobble, rng.uniform(0.62, 0.72)


@DefectRegistry.register
class JoiningMarkRenderer(DefectRenderer):
    """Thin straight seam where two flow fronts meet."""

    defect_type = DefectType.JOINING_MARK

    def footprint(self, defect, height, circumference, rng):
        rows, cols = _offsets(height, circumference, defect)
        angle = rng.uniform(0.0, np.pi)
        along = rows * np.sin(angle) + cols * np.cos(angle)
        across = rows * np.cos(angle) - cols * np.sin(angle)
        return (np.abs(across) <= 1.0) & (np.abs(along) <= defect.size / 2), rng.uniform(0.05, 0.12)


@DefectRegistry.register
class DirtRenderer(DefectRenderer):
    """Cluster of small dark specks."""

    defect_type = DefectType.DIRT

    def footprint(self, defect, height, circumference, rng):
        rows, cols = _offsets(height, circumference, defect)
        region = np.zeros((height, circumference), dtype=bool)
        for _ in range(int(rng.integers(3, 7))):
            center_r, center_c = rng.uniform(-defect.size / 3, defect.size / 3, size=2)
            radius = rng.uniform(1.0, max(1.5, defect.size / 6))
            region |= (rows - center_r) ** 2 + (cols - center_c) ** 2 <= radius**2
        return region, rng.uniform(0.0, 0.06)


@DefectRegistry.register
class FlowLineRenderer(DefectRenderer):
    """Wavy bright streak."""

    defect_type = DefectType.FLOW_LINE

    def footprint(self, defect, height, circumference, rng):
        rows, cols = _offsets(height, circumference, defect)
        amplitude = defect.size / 6
        curve = amplitude * np.sin(2 * np.pi * cols / defect.size + rng.uniform(0, 2 * np.pi))
        return (np.abs(rows - curve) <= 1.0) & (np.abs(cols) <= defect.size / 2), rng.uniform(0.55, 0.65)


@DefectRegistry.register
class BlisterRenderer(DefectRenderer):
    """Raised ring with a bright rim."""

    defect_type = DefectType.BLISTER

    def footprint(self, defect, height, circumference, rng):
        rows, cols = _offsets(height, circumference, defect)
        distance = np.sqrt(rows**2 + cols**2)
        radius = defect.size / 2
        return (distance <= radius) & (distance >= radius - 2.0), rng.uniform(0.75, 0.85)

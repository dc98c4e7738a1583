"""Input-domain translators.

A translator maps target-domain images into the source domain so a classifier
trained on the source corpus can be applied unchanged. Translators are
registered by kind; a learned translator plugs in by registering a new kind.

Examples:
    >>> import numpy as np
    >>> image = np.full((4, 4, 1), 0.3)
    >>> reference = fit_reference_cdf([np.linspace(0, 1, 256).reshape(16, 16, 1)])
    >>> out = translate_domain(image, DomainTranslator(kind=TranslatorKind.HISTOGRAM_MATCH,
    ...                                                reference_cdf=reference))
    >>> float(out[0, 0, 0]) == (127 + 0.5) / 256
    True
"""

import logging
from abc import ABC, abstractmethod
from typing import ClassVar, Iterable

import numpy as np

from sdds_lab.models import DomainTranslator, TranslatorKind

logger = logging.getLogger(__name__)

BINS = 256


def intensity_bins(image: np.ndarray) -> np.ndarray:
    """Bin index ``min(floor(v * 256), 255)`` of every pixel.

    Examples:
        >>> intensity_bins(np.array([0.0, 0.5, 1.0])).tolist()
        [0, 128, 255]
    """
    return np.minimum(np.floor(np.asarray(image) * BINS), BINS - 1).astype(np.int64)


def _cdf(bins: np.ndarray) -> np.ndarray:
    counts = np.bincount(bins.ravel(), minlength=BINS).astype(np.float64)
    return np.cumsum(counts) / counts.sum()


def fit_reference_cdf(images: Iterable[np.ndarray]) -> list[float]:
    """Cumulative 256-bin intensity histogram pooled over ``images``."""
    bins = [intensity_bins(image).ravel() for image in images]
    if not bins:
        raise ValueError("reference CDF needs at least one image")
    cdf = _cdf(np.concatenate(bins))
    cdf[-1] = 1.0
    return cdf.tolist()


class Translator(ABC):
    kind: ClassVar[TranslatorKind]

    def __init__(self, config: DomainTranslator):
        self.config = config

    @abstractmethod
    def translate(self, image: np.ndarray) -> np.ndarray: ...


class TranslatorRegistry:
    """Registry of translator implementations keyed by kind."""

    _by_kind: dict[TranslatorKind, type[Translator]] = {}

    @classmethod
    def register(cls, translator_class: type[Translator]) -> type[Translator]:
        cls._by_kind[translator_class.kind] = translator_class
        logger.debug(f"Registered translator: {translator_class.kind.value}")
        return translator_class

    @classmethod
    def create(cls, config: DomainTranslator) -> Translator:
        try:
            return cls._by_kind[config.kind](config)
        except KeyError:
            raise ValueError(f"No translator registered for kind '{config.kind}'") from None

    @classmethod
    def list_kinds(cls) -> list[TranslatorKind]:
        return list(cls._by_kind)

    @classmethod
    def clear(cls) -> None:
        """Clear all registered translators (for testing)."""
        cls._by_kind = {}


@TranslatorRegistry.register
class IdentityTranslator(Translator):
    kind = TranslatorKind.IDENTITY

    def translate(self, image: np.ndarray) -> np.ndarray:
        return image


@TranslatorRegistry.register
class HistogramMatchTranslator(Translator):
    """Map each intensity bin's mid-rank quantile onto the reference CDF.

    A pixel in bin ``b`` has quantile ``q = (cdf[b - 1] + cdf[b]) / 2`` in its
    own image; it becomes the centre of the smallest reference bin whose CDF
    reaches ``q``. The mapping is monotone and stays inside [0, 1].
    """

    kind = TranslatorKind.HISTOGRAM_MATCH

    def __init__(self, config: DomainTranslator):
        super().__init__(config)
        assert config.reference_cdf is not None
        self.reference = np.asarray(config.reference_cdf, dtype=np.float64)

    def translate(self, image: np.ndarray) -> np.ndarray:
        bins = intensity_bins(image)
        cdf = _cdf(bins)
        below = np.concatenate([[0.0], cdf[:-1]])
        quantiles = (below + cdf) / 2.0
        targets = np.minimum(np.searchsorted(self.reference, quantiles, side="left"), BINS - 1)
        lookup = (targets + 0.5) / BINS
        return lookup[bins]


def translate_domain(image: np.ndarray, translator: DomainTranslator) -> np.ndarray:
    """Translate one grayscale image in [0, 1].

    Examples:
        >>> x = np.random.default_rng(0).random((8, 8, 1))
        >>> translate_domain(x, DomainTranslator()) is x
        True
    """
    return TranslatorRegistry.create(translator).translate(image)

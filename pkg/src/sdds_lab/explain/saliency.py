"""Gradient saliency: where does a model look when it scores a class?

The score is the pre-activation logit of the target class, so confident
predictions still produce usable gradients. The map is the absolute gradient
of that score with respect to every input pixel, reduced over channels by a
maximum (a no-op for grayscale input).
"""

import logging

import numpy as np

from sdds_lab.engine.network import backward, forward
from sdds_lab.models import HeadKind, Mode, ModelState, SaliencyMap

logger = logging.getLogger(__name__)

FOCUS_CAP = 1e6


def score_seed(state: ModelState, output_shape: tuple[int, ...], target_class: int) -> np.ndarray:
    """Gradient of the class score with respect to the head's logits.

    Binary heads have one logit: class 1 scores it as is, class 0 scores its
    negation. Multiclass heads select one logit. Segmentation heads sum the
    target-class logit plane over all pixels.

    Raises:
        ValueError: if ``target_class`` is not a class of the head

    Examples:
        >>> from sdds_lab.models import HeadSpec, ModelSpec
        >>> from sdds_lab.engine.init import init_weights
        >>> state = init_weights(ModelSpec(head=HeadSpec(kind=HeadKind.MULTICLASS, num_classes=3),
        ...                                input_shape=(4, 4, 1)), seed=0)
        >>> score_seed(state, (1, 3), 2).tolist()
        [[0.0, 0.0, 1.0]]
    """
    head = state.spec.head
    classes = 2 if head.kind == HeadKind.BINARY else head.output_channels
    if not 0 <= target_class < classes:
        raise ValueError(f"invalid class {target_class} for a {head.kind.value} head with {classes} classes")
    seed = np.zeros(output_shape, dtype=np.float64)
    if head.kind == HeadKind.BINARY:
        seed[..., 0] = 1.0 if target_class == 1 else -1.0
    else:
        seed[..., target_class] = 1.0
    return seed


def class_score(state: ModelState, image: np.ndarray, target_class: int = 1) -> float:
    """Scalar class score whose input gradient ``saliency`` takes."""
    logits = forward(state, np.asarray(image, dtype=np.float64)[None], Mode.EVAL, logits=True)
    state.tape = None
    return float(np.sum(logits * score_seed(state, logits.shape, target_class)))


def saliency(
    state: ModelState, image: np.ndarray, target_class: int = 1, sample_id: str = ""
) -> SaliencyMap:
    """Absolute input gradient of the ``target_class`` logit for one image.

    Args:
        state: Trained model; evaluated in eval mode so dropout is off
        image: ``H x W x C`` image
        target_class: Class whose score is explained (1 = defective for binary heads)
        sample_id: Identifier carried on the returned map

    Returns:
        ``H x W`` non-negative saliency map

    Examples:
        >>> from sdds_lab.models import HeadSpec, ModelSpec
        >>> from sdds_lab.engine.init import init_weights
        >>> state = init_weights(ModelSpec(head=HeadSpec(kind=HeadKind.BINARY),
        ...                                input_shape=(8, 8, 1)), seed=0)
        >>> smap = saliency(state, np.random.default_rng(0).random((8, 8, 1)))
        >>> smap.values.shape, bool((smap.values >= 0).all())
        ((8, 8), True)
    """
    batch = np.asarray(image, dtype=np.float64)[None]
    logits = forward(state, batch, Mode.EVAL, logits=True)
    grads = backward(state, score_seed(state, logits.shape, target_class), store=False)
    values = np.abs(grads.input[0]).max(axis=-1)
    logger.debug(f"Saliency for {sample_id or 'image'}: peak {values.max():.3g}")
    return SaliencyMap(values=values, sample_id=sample_id, target_class=target_class)


def saliency_focus_score(smap: SaliencyMap, gt_mask: np.ndarray) -> float:
    """Mean saliency inside the defect mask over mean saliency outside it.

    A ratio above 1 means the model attends to the defect. An all-zero map
    scores 1.0; a map with no saliency outside the mask is capped at ``FOCUS_CAP``.

    Raises:
        ValueError: if the mask is empty or its shape differs from the map

    Examples:
        >>> mask = np.zeros((2, 2), dtype=int); mask[0, 0] = 1
        >>> saliency_focus_score(SaliencyMap(values=np.ones((2, 2))), mask)
        1.0
        >>> values = np.array([[0.8, 0.2], [0.2, 0.2]])
        >>> round(saliency_focus_score(SaliencyMap(values=values), mask), 12)
        4.0
    """
    inside = np.asarray(gt_mask) > 0
    if inside.shape != smap.values.shape:
        raise ValueError(f"mask shape {inside.shape} does not match saliency {smap.values.shape}")
    if not inside.any():
        raise ValueError("focus ratio needs a nonempty ground-truth mask")
    values = smap.values
    if not values.any():
        return 1.0
    inside_mean = float(values[inside].mean())
    outside = values[~inside]
    outside_mean = float(outside.mean()) if outside.size else 0.0
    if outside_mean <= 0.0:
        return FOCUS_CAP
    return min(inside_mean / outside_mean, FOCUS_CAP)

"""Compile a ModelSpec into the engine's ordered layer list.

Classification heads follow the backbone with global average pooling,
dropout and a dense layer. Segmentation heads form a U-shaped decoder: one
upsample / concat-skip / conv / relu stage per pooled encoder block, then a
1x1 classifier and a per-pixel softmax.

Examples:
    >>> from sdds_lab.models import ConvBlockSpec, HeadKind, HeadSpec, ModelSpec
    >>> spec = ModelSpec(backbone=[ConvBlockSpec(channels=4)],
    ...                  head=HeadSpec(kind=HeadKind.BINARY), input_shape=(8, 8, 1))
    >>> [layer.name for layer in compile_layers(spec)]  # doctest: +NORMALIZE_WHITESPACE
    ['backbone.block1.conv', 'backbone.block1.relu', 'backbone.block1.pool',
     'head.gap', 'head.dropout', 'head.dense', 'head.sigmoid']
"""

from sdds_lab.models import HeadKind, LayerKind, LayerSpec, ModelSpec


def _backbone(spec: ModelSpec) -> tuple[list[LayerSpec], list[tuple[str, int]], int, int]:
    """Backbone layers, the (relu name, channels) of pooled blocks, final channels and size."""
    height, width, channels = spec.input_shape
    layers: list[LayerSpec] = []
    skips: list[tuple[str, int]] = []
    for index, block in enumerate(spec.backbone, start=1):
        prefix = f"backbone.block{index}"
        padding = block.kernel_size // 2
        layers.append(
            LayerSpec(
                name=f"{prefix}.conv",
                kind=LayerKind.CONV2D,
                kernel_size=block.kernel_size,
                stride=block.stride,
                padding=padding,
                in_channels=channels,
                out_channels=block.channels,
            )
        )
        layers.append(LayerSpec(name=f"{prefix}.relu", kind=LayerKind.RELU))
        height = (height + 2 * padding - block.kernel_size) // block.stride + 1
        width = (width + 2 * padding - block.kernel_size) // block.stride + 1
        channels = block.channels
        if block.pooling:
            skips.append((f"{prefix}.relu", channels))
            layers.append(LayerSpec(name=f"{prefix}.pool", kind=LayerKind.MAXPOOL2D, size=2))
            height, width = height // 2, width // 2
        if height < 1 or width < 1:
            raise ValueError(f"{prefix} reduces the input {spec.input_shape} below 1 pixel")
    return layers, skips, channels, min(height, width)


def compile_layers(spec: ModelSpec) -> list[LayerSpec]:
    """Ordered layer descriptors for ``spec``.

    Args:
        spec: Architecture descriptor

    Returns:
        Layer specs named ``backbone.*`` / ``head.*``

    Examples:
        >>> from sdds_lab.models import ConvBlockSpec, HeadKind, HeadSpec, ModelSpec
        >>> seg = ModelSpec(backbone=[ConvBlockSpec(channels=4), ConvBlockSpec(channels=8, pooling=False)],
        ...                 head=HeadSpec(kind=HeadKind.SEGMENTATION), input_shape=(8, 8, 1))
        >>> [layer.name for layer in compile_layers(seg)][-6:]  # doctest: +NORMALIZE_WHITESPACE
        ['head.up1.upsample', 'head.up1.concat', 'head.up1.conv', 'head.up1.relu',
         'head.classifier', 'head.softmax']
    """
    layers, skips, channels, _ = _backbone(spec)
    head = spec.head

    if head.kind == HeadKind.SEGMENTATION:
        if any(block.kernel_size % 2 == 0 for block in spec.backbone):
            raise ValueError("segmentation backbone kernels must be odd")
        for level, (skip_name, skip_channels) in zip(range(len(skips), 0, -1), reversed(skips)):
            prefix = f"head.up{level}"
            layers.extend(
                [
                    LayerSpec(name=f"{prefix}.upsample", kind=LayerKind.UPSAMPLE2D, size=2),
                    LayerSpec(name=f"{prefix}.concat", kind=LayerKind.CONCAT_SKIP, skip_from=skip_name),
                    LayerSpec(
                        name=f"{prefix}.conv",
                        kind=LayerKind.CONV2D,
                        kernel_size=3,
                        padding=1,
                        in_channels=channels + skip_channels,
                        out_channels=skip_channels,
                    ),
                    LayerSpec(name=f"{prefix}.relu", kind=LayerKind.RELU),
                ]
            )
            channels = skip_channels
        layers.append(
            LayerSpec(
                name="head.classifier",
                kind=LayerKind.CONV2D,
                kernel_size=1,
                padding=0,
                in_channels=channels,
                out_channels=head.output_channels,
            )
        )
        layers.append(LayerSpec(name="head.softmax", kind=LayerKind.SOFTMAX))
        return layers

    layers.append(LayerSpec(name="head.gap", kind=LayerKind.GLOBALAVGPOOL))
    layers.append(LayerSpec(name="head.dropout", kind=LayerKind.DROPOUT, rate=spec.dropout_rate))
    layers.append(
        LayerSpec(
            name="head.dense",
            kind=LayerKind.DENSE,
            in_channels=channels,
            out_channels=head.output_channels,
        )
    )
    activation = LayerKind.SIGMOID if head.kind == HeadKind.BINARY else LayerKind.SOFTMAX
    layers.append(LayerSpec(name=f"head.{activation.value}", kind=activation))
    return layers

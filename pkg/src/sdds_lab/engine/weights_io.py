"""Weight container files.

Layout: the magic ``SDDSW1``, an 8-byte little-endian header length, a JSON
header holding the model spec and a (name, shape, offset) entry per tensor,
then the raw little-endian float64 data. Offsets count bytes from the start
of the data section.
"""

import json
import logging
import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from sdds_lab.engine.errors import WeightFileError
from sdds_lab.engine.init import initialize_parameters
from sdds_lab.models import ModelSpec, ModelState, Parameter
from sdds_lab.networks.architectures import compile_layers

logger = logging.getLogger(__name__)

MAGIC = b"SDDSW1"
_DTYPE = np.dtype("<f8")


def save_weights(state: ModelState, path: Path) -> Path:
    """Write ``state`` to ``path``; parent directories are created.

    Examples:
        >>> import tempfile
        >>> from sdds_lab.engine.init import init_weights
        >>> from sdds_lab.models import HeadKind, HeadSpec
        >>> state = init_weights(ModelSpec(head=HeadSpec(kind=HeadKind.BINARY),
        ...                                input_shape=(4, 4, 1)), seed=0)
        >>> with tempfile.TemporaryDirectory() as tmp:
        ...     path = save_weights(state, Path(tmp) / "m.sdw")
        ...     loaded = load_weights(path)
        >>> np.array_equal(loaded.params["head.dense.weight"].value,
        ...                state.params["head.dense.weight"].value)
        True
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    chunks = []
    offset = 0
    for name, param in state.params.items():
        data = np.ascontiguousarray(param.value, dtype=_DTYPE).tobytes()
        entries.append({"name": name, "shape": list(param.value.shape), "offset": offset})
        chunks.append(data)
        offset += len(data)
    header = json.dumps(
        {"spec": state.spec.model_dump(mode="json"), "tensors": entries}, sort_keys=True
    ).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(header)))
        f.write(header)
        for chunk in chunks:
            f.write(chunk)
    logger.debug(f"Saved {len(entries)} tensors to {path}")
    return path


def read_weight_file(path: Path) -> tuple[ModelSpec, dict[str, np.ndarray]]:
    """Parse a container into its spec and tensors, without compatibility checks."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise WeightFileError(f"cannot read weight file {path}: {e}") from e
    if not raw.startswith(MAGIC):
        raise WeightFileError(f"{path} is not a weight file (bad magic)")
    start = len(MAGIC) + 8
    if len(raw) < start:
        raise WeightFileError(f"{path} is truncated")
    (header_length,) = struct.unpack("<Q", raw[len(MAGIC) : start])
    try:
        header = json.loads(raw[start : start + header_length].decode("utf-8"))
        spec = ModelSpec.model_validate(header["spec"])
        entries = header["tensors"]
    except (ValueError, KeyError, ValidationError) as e:
        raise WeightFileError(f"{path} has an invalid header: {e}") from e

    data = raw[start + header_length :]
    tensors: dict[str, np.ndarray] = {}
    for entry in entries:
        shape = tuple(entry["shape"])
        begin = entry["offset"]
        end = begin + int(np.prod(shape, dtype=np.int64)) * _DTYPE.itemsize
        if end > len(data):
            raise WeightFileError(f"{path}: tensor {entry['name']} extends past end of file")
        tensors[entry["name"]] = (
            np.frombuffer(data[begin:end], dtype=_DTYPE).reshape(shape).astype(np.float64)
        )
    return spec, tensors


def load_weights(path: Path) -> ModelState:
    """Load a container and validate its tensors against the compiled spec.

    Raises:
        WeightFileError: if the file is malformed, or a tensor is missing,
            unexpected or has the wrong shape for the stored spec
    """
    spec, tensors = read_weight_file(path)
    layers = compile_layers(spec)
    expected = initialize_parameters(layers, np.random.default_rng(0))
    missing = sorted(set(expected) - set(tensors))
    unexpected = sorted(set(tensors) - set(expected))
    if missing or unexpected:
        raise WeightFileError(
            f"{path}: tensors do not match spec (missing {missing}, unexpected {unexpected})"
        )
    params: dict[str, Parameter] = {}
    for name, reference in expected.items():
        if tensors[name].shape != reference.shape:
            raise WeightFileError(
                f"{path}: tensor {name} has shape {tensors[name].shape}, spec needs {reference.shape}"
            )
        params[name] = Parameter(tensors[name])
    logger.debug(f"Loaded {len(params)} tensors from {path}")
    return ModelState(spec=spec, layers=layers, params=params)

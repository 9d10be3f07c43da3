"""
Checkpoint container

Layout (all integers little-endian):
    8 bytes   magic b"DRL2CKPT"
    u32       format version
    u32       header length in bytes
    header    UTF-8 JSON: {"version", "config_hash", "tensors": [{"name", "shape", "offset"}], "extra"}
    payload   row-major float32 little-endian values; offsets are byte offsets into the payload
"""

import json
import struct
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import torch
from loguru import logger
from torch import nn

MAGIC = b"DRL2CKPT"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<II")
_DTYPE = np.dtype("<f4")


def save_checkpoint(
    path: Union[str, Path],
    tensors: Dict[str, torch.Tensor],
    config_hash: str,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Write named tensors to a checkpoint file

    Args:
        path: Output file
        tensors: Name -> tensor (e.g. a module state_dict)
        config_hash: Hash of the RunConfig that produced the weights
        extra: JSON-serializable metadata (step, episodes, ...)

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    entries = []
    blobs = []
    offset = 0
    for name, tensor in tensors.items():
        array = tensor.detach().cpu().numpy().astype(_DTYPE)
        entries.append({"name": name, "shape": list(array.shape), "offset": offset})
        blob = np.ascontiguousarray(array).tobytes()
        blobs.append(blob)
        offset += len(blob)

    header = json.dumps({
        "version": FORMAT_VERSION,
        "config_hash": config_hash,
        "tensors": entries,
        "extra": extra or {},
    }).encode("utf-8")

    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(_PREFIX.pack(FORMAT_VERSION, len(header)))
        f.write(header)
        for blob in blobs:
            f.write(blob)

    logger.debug(f"Checkpoint saved: {path} ({len(entries)} tensors, {offset} bytes)")
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[Dict[str, torch.Tensor], Dict[str, Any]]:
    """
    Read a checkpoint file

    Returns:
        (name -> float32 tensor, header dict)
    """
    data = Path(path).read_bytes()
    if data[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file (bad magic)")

    version, header_len = _PREFIX.unpack_from(data, len(MAGIC))
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")

    start = len(MAGIC) + _PREFIX.size
    header = json.loads(data[start:start + header_len].decode("utf-8"))
    payload = memoryview(data)[start + header_len:]

    tensors: Dict[str, torch.Tensor] = {}
    for entry in header["tensors"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        array = np.frombuffer(payload, dtype=_DTYPE, count=count, offset=entry["offset"])
        tensors[entry["name"]] = torch.from_numpy(array.astype(np.float32).reshape(entry["shape"]))
    return tensors, header


def load_into(module: nn.Module, path: Union[str, Path], prefix: str = "", strict: bool = True) -> Dict[str, Any]:
    """
    Load the tensors under `prefix` into a module

    Returns:
        Checkpoint header
    """
    tensors, header = load_checkpoint(path)
    state = {name[len(prefix):]: t for name, t in tensors.items() if name.startswith(prefix)}
    module.load_state_dict(state, strict=strict)
    return header

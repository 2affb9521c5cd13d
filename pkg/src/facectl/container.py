"""Deterministic named-array container.

A container is a plain zip archive holding one ``<name>.npy`` entry per array
plus a ``manifest.json`` listing every array with its shape and dtype, a
format version, and arbitrary JSON metadata. Entries are stored uncompressed,
sorted by name, with a constant timestamp, so writing the same content twice
produces byte-identical files. ``numpy.load`` can open the archives directly;
see docs/formats.md for the layout.
"""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"

# zip stores no zone info; the epoch below is the earliest valid zip timestamp
_FIXED_DATE = (1980, 1, 1, 0, 0, 0)


class ContainerError(RuntimeError):
    """Raised for unreadable, truncated, or version-mismatched containers."""


def _npy_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.ascontiguousarray(arr), allow_pickle=False)
    return buf.getvalue()


def save_container(path, arrays: dict[str, np.ndarray], metadata: dict | None = None) -> None:
    """Write ``arrays`` (name -> ndarray) and JSON ``metadata`` to ``path``."""
    path = Path(path)
    manifest = {
        "format_version": FORMAT_VERSION,
        "arrays": {
            name: {"shape": list(arr.shape), "dtype": str(arr.dtype)}
            for name, arr in sorted(arrays.items())
        },
        "metadata": metadata or {},
    }
    manifest_bytes = json.dumps(manifest, sort_keys=True, indent=1).encode("utf-8")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with zipfile.ZipFile(tmp, "w", compression=zipfile.ZIP_STORED) as zf:
        info = zipfile.ZipInfo(MANIFEST_NAME, date_time=_FIXED_DATE)
        zf.writestr(info, manifest_bytes)
        for name in sorted(arrays):
            info = zipfile.ZipInfo(name + ".npy", date_time=_FIXED_DATE)
            zf.writestr(info, _npy_bytes(arrays[name]))
    tmp.replace(path)


def load_container(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read a container, returning (arrays, metadata).

    Truncated or foreign files raise ContainerError; nothing is returned
    partially. Every array is checked against the manifest's shape/dtype.
    """
    path = Path(path)
    if not path.exists():
        raise ContainerError(f"container not found: {path}")
    try:
        with zipfile.ZipFile(path, "r") as zf:
            if MANIFEST_NAME not in zf.namelist():
                raise ContainerError(f"{path}: missing {MANIFEST_NAME}")
            manifest = json.loads(zf.read(MANIFEST_NAME).decode("utf-8"))
            version = manifest.get("format_version")
            if version != FORMAT_VERSION:
                raise ContainerError(
                    f"{path}: format version {version!r}, expected {FORMAT_VERSION}"
                )
            arrays = {}
            for name, spec in manifest["arrays"].items():
                entry = name + ".npy"
                if entry not in zf.namelist():
                    raise ContainerError(f"{path}: manifest lists {name!r} but entry is missing")
                arr = np.lib.format.read_array(io.BytesIO(zf.read(entry)), allow_pickle=False)
                if list(arr.shape) != spec["shape"] or str(arr.dtype) != spec["dtype"]:
                    raise ContainerError(
                        f"{path}: array {name!r} is {arr.shape}/{arr.dtype}, "
                        f"manifest says {tuple(spec['shape'])}/{spec['dtype']}"
                    )
                arrays[name] = arr
    except (zipfile.BadZipFile, EOFError, KeyError, json.JSONDecodeError, ValueError) as exc:
        raise ContainerError(f"{path}: corrupt or truncated container ({exc})") from exc
    return arrays, manifest["metadata"]

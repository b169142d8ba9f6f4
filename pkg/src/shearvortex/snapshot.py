"""Field/state persistence: raw binary payload plus a text sidecar.

Payload: little-endian IEEE-754 doubles of the physical-space samples,
row major with the second axis fastest. Sidecar (path + ".meta") lists
every metadata key needed to rebuild the object and a sha256 of the
payload; reads validate the checksum and every structural invariant
before constructing anything.
"""

import hashlib
import os

import numpy as np

from .errors import ChecksumError, GridError, SnapshotError
from .grid import Field, Frame, make_grid

_FORMAT = "shearvortex-snapshot-1"


def _sidecar(path):
    return os.fspath(path) + ".meta"


def write_snapshot(obj, path):
    """Persist a Field or a SelfSimilarState (duck-typed on .omega)."""
    if hasattr(obj, "omega"):
        f = obj.omega
        meta_extra = {"kind": "state", "t": repr(float(obj.t)),
                      "nu": repr(float(obj.nu)), "alpha": repr(float(obj.alpha))}
    else:
        f = obj
        meta_extra = {"kind": "field"}
    payload = np.ascontiguousarray(f.values, dtype="<f8").tobytes()
    meta = {
        "format": _FORMAT,
        "n": str(f.grid.n),
        "half_width": repr(float(f.grid.half_width)),
        "frame": f.grid.frame.name.lower(),
        "dtype": "float64",
        "endianness": "little",
        "order": "row-major, second axis fastest",
        "payload_bytes": str(len(payload)),
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    meta.update(meta_extra)
    with open(path, "wb") as fh:
        fh.write(payload)
    with open(_sidecar(path), "w", encoding="ascii") as fh:
        for k in sorted(meta):
            fh.write(f"{k} = {meta[k]}\n")


def read_metadata(path):
    """Parse the sidecar into a plain dict (no payload access)."""
    side = _sidecar(path)
    if not os.path.exists(side):
        raise SnapshotError(f"missing sidecar {side}")
    meta = {}
    with open(side, encoding="ascii") as fh:
        for line in fh:
            if not line.strip():
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise SnapshotError(f"malformed sidecar line {line.strip()!r}")
            meta[key.strip()] = val.strip()
    if meta.get("format") != _FORMAT:
        raise SnapshotError(f"unrecognized snapshot format {meta.get('format')!r}")
    return meta


def read_snapshot(path, grid=None):
    """Rebuild the stored Field or SelfSimilarState.

    If grid is given, the stored grid must match it exactly; useful when
    a caller needs samples on a predetermined grid.
    """
    meta = read_metadata(path)
    try:
        n = int(meta["n"])
        half_width = float(meta["half_width"])
        frame = Frame[meta["frame"].upper()]
        declared = int(meta["payload_bytes"])
        digest = meta["sha256"]
        kind = meta["kind"]
    except KeyError as e:
        raise SnapshotError(f"sidecar missing key {e.args[0]!r}") from None
    if declared != n * n * 8:
        raise SnapshotError(
            f"metadata disagrees with itself: payload_bytes={declared} "
            f"but n={n} needs {n * n * 8}")
    with open(path, "rb") as fh:
        payload = fh.read()
    if len(payload) != declared:
        raise SnapshotError(
            f"truncated payload: expected {declared} bytes, found {len(payload)}")
    if hashlib.sha256(payload).hexdigest() != digest:
        raise ChecksumError(f"payload checksum mismatch for {path}")
    stored_grid = make_grid(half_width, n, frame)
    if grid is not None and grid != stored_grid:
        raise GridError(
            f"snapshot shape mismatch: stored grid (n={n}, L={half_width:g}, "
            f"{frame.name.lower()}) differs from requested (n={grid.n}, "
            f"L={grid.half_width:g}, {grid.frame.name.lower()})")
    values = np.frombuffer(payload, dtype="<f8").reshape(n, n)
    f = Field(stored_grid, values=values.astype(np.float64))
    if kind == "field":
        return f
    if kind != "state":
        raise SnapshotError(f"unknown snapshot kind {kind!r}")
    from .selfsim import SelfSimilarState
    return SelfSimilarState(omega=f, t=float(meta["t"]), nu=float(meta["nu"]),
                            alpha=float(meta["alpha"]))

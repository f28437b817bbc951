"""On-disk cache of enumerated groups.

File layout (all lengths little-endian)::

    b"DPWC"  u16 format version  u8 n  u8 kind  u64 count  u8 digest id
    count x ( u32 item length, item bytes )

An item is the row-major concatenation of the matrix entries, each written
as ``u8 length`` followed by the big-endian two's-complement bytes of the
entry.  Items are sorted bytewise, so the file is independent of how the
group was enumerated.
"""

from __future__ import annotations

import os
import struct
import tempfile
import threading
from pathlib import Path

import numpy as np

from . import __version__, engine
from .errors import DomainError

MAGIC = b"DPWC"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHBBQB")
KIND_CODES = {"wall_full": 0, "weyl": 1, "parabolic_P": 2}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}

ENV_VAR = "DPWC_CACHE"


def encode_entry(x: int) -> bytes:
    x = int(x)
    size = ((x if x >= 0 else ~x).bit_length() + 8) // 8
    return bytes([size]) + x.to_bytes(size, "big", signed=True)


def encode_matrix(m) -> bytes:
    return b"".join(encode_entry(x) for x in np.asarray(m).flat)


def decode_matrix(data: bytes, d: int) -> list:
    vals = []
    pos = 0
    while pos < len(data):
        size = data[pos]
        vals.append(int.from_bytes(data[pos + 1:pos + 1 + size], "big", signed=True))
        pos += 1 + size
    if len(vals) != d * d:
        raise DomainError(f"item holds {len(vals)} entries, expected {d * d}")
    return [vals[i * d:(i + 1) * d] for i in range(d)]


def _sorted_items(mats: np.ndarray) -> list | np.ndarray:
    """Encoded items, sorted. Fast path when every entry fits one byte."""
    d = mats.shape[1]
    if mats.dtype == np.int8:
        k = d * d
        n = len(mats)
        rec = np.empty((n, 2 * k), dtype=np.uint8)
        rec[:, 0::2] = 1
        rec[:, 1::2] = mats.reshape(n, k).view(np.uint8)
        order = np.argsort(rec.view(f"V{2 * k}").ravel(), kind="stable")
        return rec[order]
    return sorted(encode_matrix(m) for m in mats)


def write_group(path, group) -> None:
    """Write an EnumeratedGroup atomically."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    items = _sorted_items(group.elements)
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, group.n, KIND_CODES[group.kind], len(items), engine.DIGEST_ID)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".dpwc")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            if isinstance(items, np.ndarray):
                n, width = items.shape
                out = np.empty((n, 4 + width), dtype=np.uint8)
                out[:, :4] = np.frombuffer(struct.pack("<I", width), dtype=np.uint8)
                out[:, 4:] = items
                fh.write(out.tobytes())
            else:
                for it in items:
                    fh.write(struct.pack("<I", len(it)))
                    fh.write(it)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_items(path):
    """Return (n, kind, digest id, list of raw items) from a cache file."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise DomainError("cache file truncated")
    magic, version, n, kind, count, digest_id = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DomainError("not a group cache file")
    if version != FORMAT_VERSION:
        raise DomainError(f"unsupported cache format version {version}")
    items = []
    pos = _HEADER.size
    for _ in range(count):
        (size,) = struct.unpack_from("<I", data, pos)
        pos += 4
        items.append(data[pos:pos + size])
        pos += size
    if pos != len(data):
        raise DomainError("cache payload length does not match header count")
    return n, KIND_NAMES[kind], digest_id, items


def read_group(path):
    """Load a cache file back into an EnumeratedGroup."""
    from .weylgroups import EnumeratedGroup

    data = Path(path).read_bytes()
    magic, version, n, kind, count, digest_id = _HEADER.unpack_from(data)
    if magic != MAGIC or version != FORMAT_VERSION:
        raise DomainError("unrecognised cache file")
    d = n + 1
    width = 2 * d * d
    payload = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
    fixed = len(payload) == count * (4 + width)
    if fixed and count:
        rec = payload.reshape(count, 4 + width)
        fixed = bool(np.all(rec[:, :4] == np.frombuffer(struct.pack("<I", width), dtype=np.uint8)))
        fixed = fixed and bool(np.all(rec[:, 4::2] == 1))
    if fixed:
        mats = rec[:, 5::2].copy().view(np.int8).reshape(count, d, d) if count else np.zeros((0, d, d), np.int8)
    else:
        _, _, _, items = read_items(path)
        mats = engine.compact(np.array([decode_matrix(it, d) for it in items], dtype=object))
    a, b = engine.digests(mats)
    order = np.lexsort((b, a))
    return EnumeratedGroup(n, KIND_NAMES[kind], mats[order], a[order], b[order], depth=-1)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    import platformdirs

    return Path(platformdirs.user_cache_dir("dpweyl"))


def cache_path(cache_dir, n: int, kind: str) -> Path:
    return Path(cache_dir) / f"{kind}_n{n}_f{FORMAT_VERSION}_v{__version__}.dpwc"


# ---------------------------------------------------------------- group store

_memo: dict = {}
_lock = threading.Lock()


def get_group(n: int, kind: str = "weyl", *, cache_dir=None, threads: int = 1, use_disk: bool = False):
    """Enumerated W_n or P_n, memoised in-process and optionally on disk."""
    from . import weylgroups as wg

    key = (n, kind)
    with _lock:
        if key in _memo:
            return _memo[key]
    path = None
    if use_disk or cache_dir is not None:
        path = cache_path(cache_dir if cache_dir is not None else default_cache_dir(), n, kind)
        if path.exists():
            group = read_group(path)
            with _lock:
                _memo[key] = group
            return group
    gens = {"weyl": wg.weyl_generators, "parabolic_P": wg.parabolic_P_generators}[kind](n)
    group = wg.enumerate_group(gens, threads=threads)
    if path is not None:
        write_group(path, group)
    with _lock:
        _memo[key] = group
    return group

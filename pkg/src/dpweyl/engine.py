"""Vectorised breadth-first search over batches of integer matrices.

Elements are held as numpy arrays of shape (N, d, d) in the smallest signed
integer dtype that fits.  Arithmetic runs in int64 behind an explicit bound
check and falls back to Python integers (object dtype) if entries ever get
large, so results are always exact.

Each element is keyed by a 128-bit linear digest (two independent uint64
dot products with fixed odd weights, wrapping mod 2^64).  Equal digests
are always confirmed by comparing the full matrices, so a digest
collision can never merge two distinct elements.

Every generator handed to the search is an involution, which makes the
search graph undirected: neighbours of BFS layer k lie in layers k-1, k
and k+1.  Membership tests therefore only need the previous and current
layer, and the orbit counter can drop older layers entirely.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import InternalError, ResourceError
from .lattice import Isometry

DIGEST_ID = 1
_DIGEST_BLOCK = 1 << 14
_INT64_SAFE = 1 << 62

_rng = np.random.default_rng(20240601)
_WEIGHTS = (_rng.integers(0, 2**63, size=(2, 128), dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
del _rng


def smallest_dtype(max_abs: int):
    for dt in (np.int8, np.int16, np.int32, np.int64):
        if max_abs <= np.iinfo(dt).max:
            return dt
    return object


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(max(a.max(), -a.min()))


def compact(a: np.ndarray) -> np.ndarray:
    dt = smallest_dtype(_max_abs(a))
    if a.dtype == dt:
        return a
    return a.astype(dt)


def digests(batch: np.ndarray):
    """Two uint64 digests per matrix in the batch."""
    n = batch.shape[0]
    k = int(np.prod(batch.shape[1:]))
    flat = batch.reshape(n, k)
    a = np.empty(n, dtype=np.uint64)
    b = np.empty(n, dtype=np.uint64)
    # blocked to keep the uint64 temporaries small
    for lo in range(0, n, _DIGEST_BLOCK):
        block = flat[lo:lo + _DIGEST_BLOCK]
        if block.dtype == object:
            mod = 1 << 64
            block = np.array([[int(x) % mod for x in row] for row in block], dtype=np.uint64).reshape(-1, k)
        else:
            block = block.astype(np.int64).view(np.uint64)
        with np.errstate(over="ignore"):
            a[lo:lo + _DIGEST_BLOCK] = block @ _WEIGHTS[0, :k]
            b[lo:lo + _DIGEST_BLOCK] = block @ _WEIGHTS[1, :k]
    return a, b


# ---------------------------------------------------------------- generator ops


class BatchOp:
    """Left/right multiplication and conjugation by a fixed isometry."""

    def __init__(self, g: Isometry, name: str = ""):
        self.name = name
        self.g = g
        m = np.array(g.matrix, dtype=object)
        d = m.shape[0]
        self.d = d
        self.perm = None
        self.rank1 = None
        nz = [(i, j) for i in range(d) for j in range(d) if m[i, j] != 0]
        if len(nz) == d and all(abs(m[i, j]) == 1 for i, j in nz) and len({i for i, _ in nz}) == d:
            # signed permutation: column j is sign[j] * e_{pi[j]}
            pi = np.zeros(d, dtype=np.intp)
            sg = np.zeros(d, dtype=np.int64)
            for i, j in nz:
                pi[j] = i
                sg[j] = int(m[i, j])
            self.perm = (pi, sg)
        else:
            D = m - np.eye(d, dtype=np.int64).astype(object)
            i, j = next((i, j) for i in range(d) for j in range(d) if D[i, j] != 0)
            u = [int(x) for x in D[:, j]]
            c = [Fraction(int(x), int(D[i, j])) for x in D[i, :]]
            if all(x.denominator == 1 for x in c) and all(
                D[r, s] == u[r] * c[s] for r in range(d) for s in range(d)
            ):
                self.rank1 = (np.array(u, dtype=np.int64), np.array([int(x) for x in c], dtype=np.int64))
        if self.perm is None and self.rank1 is None:
            self.dense = np.array(g.matrix, dtype=np.int64)
            self.dense_inv = np.array(g.inverse().matrix, dtype=np.int64)
        self.growth = self._growth()
        self.involution = (g @ g).is_identity()

    def _growth(self) -> int:
        if self.perm is not None:
            return 1
        if self.rank1 is not None:
            u, c = self.rank1
            return 1 + self.d * int(np.abs(u).max()) * int(np.abs(c).max())
        return self.d * int(max(np.abs(self.dense).max(), np.abs(self.dense_inv).max()))

    def _work(self, G: np.ndarray, factor: int) -> np.ndarray:
        if G.dtype == object:
            return G
        if _max_abs(G) * factor >= _INT64_SAFE:
            return G.astype(object)
        return G.astype(np.int64, copy=False)

    def right(self, G: np.ndarray) -> np.ndarray:
        """G @ g for each matrix in the batch."""
        if self.perm is not None:
            pi, sg = self.perm
            # (G P)[:, j] = sg[j] G[:, pi[j]]
            return G[:, :, pi] * sg.astype(G.dtype) if G.dtype != object else G[:, :, pi] * sg
        W = self._work(G, self.growth)
        if self.rank1 is not None:
            u, c = self.rank1
            Gu = W @ u if W.dtype != object else W @ u.astype(object)
            return W + Gu[:, :, None] * c[None, None, :]
        return W @ (self.dense if W.dtype != object else self.dense.astype(object))

    def left(self, G: np.ndarray) -> np.ndarray:
        """g @ G for each matrix in the batch."""
        if self.perm is not None:
            pi, sg = self.perm
            inv = np.empty_like(pi)
            inv[pi] = np.arange(len(pi))
            # (P G)[r, :] = sg[inv[r]] G[inv[r], :]
            s = sg[inv]
            return G[:, inv, :] * (s.astype(G.dtype) if G.dtype != object else s)[None, :, None]
        W = self._work(G, self.growth)
        if self.rank1 is not None:
            u, c = self.rank1
            cG = np.einsum("j,njk->nk", c, W) if W.dtype != object else np.einsum("j,njk->nk", c.astype(object), W)
            return W + u[None, :, None] * cG[:, None, :]
        return (self.dense if W.dtype != object else self.dense.astype(object)) @ W

    def conj(self, G: np.ndarray) -> np.ndarray:
        """g G g^{-1}."""
        if not self.involution:
            raise InternalError("conjugation by non-involutions is not wired into the search")
        return self.left(self.right(G))


# ---------------------------------------------------------------- layers


@dataclass
class Layer:
    mats: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def build(cls, mats: np.ndarray) -> "Layer":
        a, b = digests(mats)
        order = np.lexsort((b, a))
        return cls(mats[order], a[order], b[order])

    def __len__(self):
        return len(self.a)


def _same(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise equality of two batches (handles mixed dtypes)."""
    if x.dtype == object or y.dtype == object:
        return np.array([np.array_equal(p, q) for p, q in zip(x, y)], dtype=bool)
    if x.dtype != y.dtype:
        dt = np.result_type(x.dtype, y.dtype)
        x, y = x.astype(dt), y.astype(dt)
    return (x == y).reshape(len(x), -1).all(axis=1)


def _member(layer: Layer, mats: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Boolean mask: which candidates already occur in ``layer``."""
    if len(layer) == 0 or len(a) == 0:
        return np.zeros(len(a), dtype=bool)
    idx = np.searchsorted(layer.a, a, side="left")
    idx_c = np.minimum(idx, len(layer) - 1)
    a_hit = layer.a[idx_c] == a
    hit = a_hit & (layer.b[idx_c] == b)
    if hit.any():
        sel = np.nonzero(hit)[0]
        ok = _same(layer.mats[idx_c[sel]], mats[sel])
        hit[sel[~ok]] = False
    # rare: primary digest matched something else; scan the whole run
    slow = np.nonzero(a_hit & ~hit)[0]
    for k in slow:
        j = idx[k]
        while j < len(layer) and layer.a[j] == a[k]:
            if layer.b[j] == b[k] and np.array_equal(layer.mats[j].astype(object), mats[k].astype(object)):
                hit[k] = True
                break
            j += 1
    return hit


def _unique(mats: np.ndarray):
    """Deduplicate a candidate batch; returns a sorted Layer."""
    a, b = digests(mats)
    order = np.lexsort((b, a))
    mats, a, b = mats[order], a[order], b[order]
    if len(a) < 2:
        return Layer(mats, a, b)
    same_key = (a[1:] == a[:-1]) & (b[1:] == b[:-1])
    keep = np.ones(len(a), dtype=bool)
    if same_key.any():
        sel = np.nonzero(same_key)[0]
        eq = _same(mats[sel], mats[sel + 1])
        if eq.all():
            keep[sel + 1] = False
        else:
            # genuine digest collision: dedupe each equal-key run by content
            keep[sel + 1] = False
            starts = np.nonzero(np.r_[True, ~same_key])[0]
            ends = np.r_[starts[1:], len(a)]
            for s, e in zip(starts, ends):
                if e - s < 2:
                    continue
                seen = set()
                for j in range(s, e):
                    key = tuple(int(x) for x in mats[j].flat)
                    keep[j] = key not in seen
                    seen.add(key)
    return Layer(mats[keep], a[keep], b[keep])


# ---------------------------------------------------------------- search


@dataclass
class SearchResult:
    count: int
    depth: int
    layer_sizes: list
    elements: np.ndarray | None = None
    a: np.ndarray | None = None
    b: np.ndarray | None = None


def _concat(parts):
    dt = np.result_type(*[p.dtype for p in parts])
    return np.concatenate([p.astype(dt, copy=False) for p in parts])


def _split(n: int, parts: int):
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(bounds[i], bounds[i + 1]) for i in range(parts)]


def bfs(
    seed: np.ndarray,
    ops: Sequence[BatchOp],
    mode: str = "right",
    *,
    keep: bool = True,
    cap: int = 5_000_000,
    threads: int = 1,
    memory_budget: int = 8 << 30,
    chunk_size: int = 1 << 15,
    progress: Callable[[int, int], None] | None = None,
) -> SearchResult:
    """Closure of ``seed`` under ``mode`` ('right', 'left' or 'conj') by ``ops``.

    With ``keep`` the full element set is returned sorted by digest;
    otherwise only the count survives (two layers are held at a time).
    """
    if not all(op.involution for op in ops):
        raise InternalError("search generators must be involutions")
    seed = compact(np.asarray(seed))
    if seed.ndim == 2:
        seed = seed[None]
    prev = Layer.build(seed[:0])
    cur = _unique(seed)
    kept = [cur] if keep else None
    count = len(cur)
    sizes = [len(cur)]
    depth = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while len(cur):
            nchunks = max(threads if pool else 1, -(-len(cur) // chunk_size))

            def expand(bounds, prev=prev, cur=cur):
                lo, hi = bounds
                part = cur.mats[lo:hi]
                cand = _concat([compact(getattr(op, mode)(part)) for op in ops])
                layer = _unique(cand)
                fresh = ~(_member(prev, layer.mats, layer.a, layer.b) | _member(cur, layer.mats, layer.a, layer.b))
                return layer.mats[fresh]

            chunks = _split(len(cur), nchunks)
            if pool:
                pieces = list(pool.map(expand, chunks))
            else:
                pieces = [expand(c) for c in chunks]
            nxt = _unique(_concat(pieces))
            del pieces
            if not len(nxt):
                break
            depth += 1
            count += len(nxt)
            sizes.append(len(nxt))
            if count > cap:
                raise ResourceError(f"element cap {cap} exceeded", cap=cap)
            if keep:
                kept.append(nxt)
                used = sum(l.mats.nbytes + 16 * len(l) for l in kept)
                if used > memory_budget:
                    raise ResourceError(f"memory budget {memory_budget} bytes exceeded", cap=memory_budget)
            if progress:
                progress(depth, count)
            prev, cur = cur, nxt
    finally:
        if pool:
            pool.shutdown()
    res = SearchResult(count=count, depth=depth, layer_sizes=sizes)
    if keep:
        mats = _concat([l.mats for l in kept])
        a = np.concatenate([l.a for l in kept])
        b = np.concatenate([l.b for l in kept])
        order = np.lexsort((b, a))
        res.elements, res.a, res.b = mats[order], a[order], b[order]
    return res


def lookup(a_sorted: np.ndarray, b_sorted: np.ndarray, mats_sorted: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Index of each query matrix inside a digest-sorted element array (-1 if absent)."""
    qa, qb = digests(query)
    idx = np.searchsorted(a_sorted, qa, side="left")
    idx_c = np.minimum(idx, len(a_sorted) - 1)
    hit = (a_sorted[idx_c] == qa) & (b_sorted[idx_c] == qb)
    sel = np.nonzero(hit)[0]
    if len(sel):
        ok = _same(mats_sorted[idx_c[sel]], query[sel])
        hit[sel[~ok]] = False
    out = np.where(hit, idx_c, -1)
    for k in np.nonzero(~hit & (a_sorted[idx_c] == qa))[0]:
        j = idx[k]
        while j < len(a_sorted) and a_sorted[j] == qa[k]:
            if b_sorted[j] == qb[k] and np.array_equal(mats_sorted[j].astype(object), query[k].astype(object)):
                out[k] = j
                break
            j += 1
    return out


# ---------------------------------------------------------------- batched invariants


def _bmm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.dtype != object and (_max_abs(x) * _max_abs(y) * x.shape[-1] >= _INT64_SAFE):
        x, y = x.astype(object), y.astype(object)
    return x @ y


def batch_charpoly(mats: np.ndarray, chunk: int = 1 << 15) -> np.ndarray:
    """Characteristic polynomials det(tI - g) of a batch, ascending coefficients.

    Power sums p_k = tr(g^k) come from products of powers up to ceil(d/2)
    (tr(AB) is an elementwise dot product), then Newton's identities.
    """
    n, d = mats.shape[0], mats.shape[1]
    out = np.zeros((n, d + 1), dtype=object if mats.dtype == object else np.int64)
    half = (d + 1) // 2
    for lo in range(0, n, chunk):
        g = mats[lo:lo + chunk]
        g = g.astype(np.int64) if g.dtype != object else g
        pw = [None, g]
        for _ in range(2, half + 1):
            pw.append(_bmm(pw[-1], g))
        m = len(g)
        p = [None] * (d + 1)
        for k in range(1, d + 1):
            if k == 1:
                p[1] = np.trace(g, axis1=1, axis2=2)
                continue
            i = (k + 1) // 2
            j = k - i
            # tr(P_i P_j) = sum_{r,s} P_i[r,s] P_j[s,r]
            p[k] = (pw[i] * np.swapaxes(pw[j], 1, 2)).reshape(m, -1).sum(axis=1)
        e = [np.ones(m, dtype=p[1].dtype)]
        for k in range(1, d + 1):
            acc = np.zeros(m, dtype=p[1].dtype)
            for i in range(1, k + 1):
                term = e[k - i] * p[i]
                acc = acc + term if i % 2 == 1 else acc - term
            if np.any(acc % k):
                raise InternalError("non-integral Newton identity step")
            e.append(acc // k)
        for k in range(d + 1):
            out[lo:lo + chunk, d - k] = e[k] if k % 2 == 0 else -e[k]
    return out

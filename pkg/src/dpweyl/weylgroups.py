"""Reflection generators of O+(1,n)(Z), the Weyl group W_n and the parabolic P_n.

W_n is the stabiliser of the canonical class K; it is finite for n <= 8.
P_n is generated by the simple reflections other than E1-E2 and En, and
also fixes H - E1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import engine
from .errors import DomainError, InternalError, RefusalError, ResourceError
from .lattice import Isometry, parse_vector, reflection

__all__ = [
    "GeneratorSet",
    "EnumeratedGroup",
    "weyl_generators",
    "wall_generators",
    "parabolic_P_generators",
    "enumerate_group",
    "element_order",
    "standard_coxeter",
    "coxeter_number",
    "KNOWN_WEYL_ORDERS",
]

KINDS = ("wall_full", "weyl", "parabolic_P")

# Coxeter numbers h_n for n = 3..8
_COXETER_NUMBER = {3: 6, 4: 5, 5: 8, 6: 12, 7: 18, 8: 30}

# Orders of W_n = W(A2 x A1), W(A4), W(D5), W(E6), W(E7), W(E8)
KNOWN_WEYL_ORDERS = {3: 12, 4: 120, 5: 1920, 6: 51840, 7: 2903040, 8: 696729600}

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class GeneratorSet:
    n: int
    generators: tuple  # of (name, Isometry)
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown generator kind {self.kind!r}")
        for name, g in self.generators:
            if not (g @ g).is_identity():
                raise InternalError(f"generator {name} is not an involution")

    @property
    def names(self):
        return [name for name, _ in self.generators]

    @property
    def isometries(self):
        return [g for _, g in self.generators]

    def __len__(self):
        return len(self.generators)


def _ref(n: int, text: str):
    return (f"Ref[{text}]", reflection(parse_vector(n, text)))


def _simple_roots(n: int):
    return ["H - E1 - E2 - E3"] + [f"E{i} - E{i + 1}" for i in range(1, n)]


def weyl_generators(n: int) -> GeneratorSet:
    """Simple reflections in H-E1-E2-E3 and Ei-E(i+1)."""
    if not 3 <= n <= 8:
        raise DomainError(f"Weyl generators need 3 <= n <= 8, got {n}")
    return GeneratorSet(n, tuple(_ref(n, r) for r in _simple_roots(n)), "weyl")


def wall_generators(n: int) -> GeneratorSet:
    """Generators of the full group O+(1,n)(Z) for 2 <= n <= 9."""
    if not 2 <= n <= 9:
        raise DomainError(f"Wall generators need 2 <= n <= 9, got {n}")
    if n == 2:
        roots = ["H - E1 - E2", "E1 - E2", "E2"]
    else:
        roots = _simple_roots(n) + [f"E{n}"]
    return GeneratorSet(n, tuple(_ref(n, r) for r in roots), "wall_full")


def parabolic_P_generators(n: int) -> GeneratorSet:
    """Simple reflections omitting E1-E2 (and En, which is not in W_n anyway)."""
    if not 3 <= n <= 8:
        raise DomainError(f"P_n generators need 3 <= n <= 8, got {n}")
    roots = ["H - E1 - E2 - E3"] + [f"E{i} - E{i + 1}" for i in range(2, n)]
    return GeneratorSet(n, tuple(_ref(n, r) for r in roots), "parabolic_P")


def coxeter_number(n: int) -> int:
    if n not in _COXETER_NUMBER:
        raise DomainError(f"no Coxeter number recorded for n={n}")
    return _COXETER_NUMBER[n]


def standard_coxeter(n: int) -> Isometry:
    """Ref[E1-E2] . Ref[E2-E3] ... Ref[E(n-1)-En] . Ref[H-E1-E2-E3]."""
    if not 3 <= n <= 8:
        raise DomainError(f"standard Coxeter element needs 3 <= n <= 8, got {n}")
    w = Isometry.identity(n)
    for i in range(1, n):
        w = w @ reflection(parse_vector(n, f"E{i} - E{i + 1}"))
    return w @ reflection(parse_vector(n, "H - E1 - E2 - E3"))


def element_order(g: Isometry, cap: int = 10_000) -> int:
    """Least k >= 1 with g^k = I."""
    if cap < 1:
        raise DomainError("cap must be positive")
    p = g
    for k in range(1, cap + 1):
        if p.is_identity():
            return k
        p = p @ g
    raise ResourceError(f"order exceeds {cap}; probably infinite", cap=cap)


# ---------------------------------------------------------------- enumeration


@dataclass
class EnumeratedGroup:
    """A finite group given by its full element list.

    ``elements`` is an (N, d, d) integer array sorted by digest, with the
    digests in ``a`` and ``b``; use :meth:`index_of` for membership.
    """

    n: int
    kind: str
    elements: np.ndarray
    a: np.ndarray
    b: np.ndarray
    depth: int
    layer_sizes: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def provenance(self) -> dict:
        return {"kind": self.kind, "bfs_depth": self.depth}

    def __len__(self):
        return self.order

    def index_of(self, mats) -> np.ndarray:
        q = np.asarray(mats)
        if q.ndim == 2:
            q = q[None]
        return engine.lookup(self.a, self.b, self.elements, q)

    def __contains__(self, g: Isometry) -> bool:
        return bool(self.index_of(np.array(g.matrix, dtype=object).astype(self.elements.dtype))[0] >= 0)

    def isometry(self, i: int) -> Isometry:
        return Isometry.from_array(self.elements[i].astype(np.int64), check=False)

    def canonical_sorted(self) -> list:
        """Canonical byte encodings of all elements, sorted."""
        from .cache import encode_matrix

        return sorted(encode_matrix(m) for m in self.elements)


def enumerate_group(
    gens: GeneratorSet,
    *,
    cap: int | None = None,
    large: bool = False,
    threads: int = 1,
    memory_budget: int = 8 << 30,
    progress=None,
) -> EnumeratedGroup:
    """Breadth-first closure of the identity under right multiplication."""
    if gens.kind == "weyl" and gens.n == 8 and not large:
        raise RefusalError("enumerating W_8 (696729600 elements) requires the large flag")
    if gens.kind == "wall_full" and cap is None:
        raise RefusalError("O+(1,n)(Z) is infinite; pass an explicit element cap")
    cap = DEFAULT_CAP if cap is None else cap
    if gens.kind == "weyl" and large and gens.n == 8:
        cap = max(cap, KNOWN_WEYL_ORDERS[8])
    ops = [engine.BatchOp(g, name) for name, g in gens.generators]
    seed = np.eye(gens.n + 1, dtype=np.int8)
    res = engine.bfs(seed, ops, "right", keep=True, cap=cap, threads=threads,
                     memory_budget=memory_budget, progress=progress)
    return EnumeratedGroup(gens.n, gens.kind, res.elements, res.a, res.b, res.depth, res.layer_sizes)


# enumerate() is the public name; keep the builtin usable inside this module
enumerate = enumerate_group  # noqa: A001

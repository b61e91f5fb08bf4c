"""Rooted bounded-degree graphs and their exact partition functions."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .config import BRUTE_FORCE_MAX_VERTICES
from .errors import DegreeBound, DomainError, NotATree, OracleLimit, ParseError
from .exact_arith import ONE, ZERO, GaussianRational
from .moebius import INFINITY, SpherePoint

logger = logging.getLogger("hardcore")

Edge = Tuple[int, int]


class _Indeterminate:
    _instance: Optional["_Indeterminate"] = None

    def __new__(cls) -> "_Indeterminate":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INDETERMINATE"

    def __str__(self) -> str:
        return "indeterminate"


INDETERMINATE = _Indeterminate()
RatioValue = Union[SpherePoint, _Indeterminate]


# --- Rooted graphs ---
@dataclass(frozen=True)
class RootedGraph:
    vertex_count: int
    edges: FrozenSet[Edge]
    root: int
    delta: int
    adjacency: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise DomainError("a rooted graph needs at least one vertex")
        if self.delta < 2:
            raise DomainError("degree bound must be at least 2")
        if not 0 <= self.root < self.vertex_count:
            raise DomainError(f"root {self.root} out of range")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise DomainError(f"loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise DomainError(f"edge ({u}, {v}) out of range")
            normalized.add((min(u, v), max(u, v)))
        neighbors: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in sorted(normalized):
            neighbors[u].append(v)
            neighbors[v].append(u)
        for v, adj in enumerate(neighbors):
            if len(adj) > self.delta:
                raise DegreeBound(f"vertex {v} has degree {len(adj)} > {self.delta}")
        object.__setattr__(self, "edges", frozenset(normalized))
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in neighbors))

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def root_degree(self) -> int:
        return self.degree(self.root)

    def in_class(self, i: int) -> bool:
        """Membership in G_delta^i."""
        return self.root_degree <= i

    def is_connected(self) -> bool:
        seen = {self.root}
        stack = [self.root]
        while stack:
            for w in self.adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def is_tree(self) -> bool:
        return len(self.edges) == self.vertex_count - 1 and self.is_connected()

    def with_delta(self, delta: int) -> "RootedGraph":
        return RootedGraph(self.vertex_count, self.edges, self.root, delta)

    def to_json(self) -> Dict[str, Any]:
        return {
            "vertices": self.vertex_count,
            "edges": [list(e) for e in sorted(self.edges)],
            "root": self.root,
            "delta": self.delta,
        }

    @classmethod
    def from_json(cls, data: Union[str, Dict[str, Any]]) -> "RootedGraph":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise ParseError(f"malformed graph JSON: {e}") from e
        try:
            vertices = int(data["vertices"])
            edges = frozenset((int(u), int(v)) for u, v in data["edges"])
            root = int(data.get("root", 0))
            delta = int(data["delta"])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"malformed graph JSON: {e}") from e
        return cls(vertices, edges, root, delta)

    def to_dot(self, name: str = "T") -> str:
        lines = [f"graph {name} {{"]
        lines.append(f'  {self.root} [shape=doublecircle];')
        for u, v in sorted(self.edges):
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines)

    def ahu(self) -> str:
        """AHU canonical string of a rooted tree."""
        if not self.is_tree():
            raise NotATree("canonical form is defined for trees only")
        order, parent = _bfs_order(self)
        codes: Dict[int, str] = {}
        for v in reversed(order):
            kids = sorted(codes[w] for w in self.adjacency[v] if w != parent[v])
            codes[v] = "(" + "".join(kids) + ")"
        return codes[self.root]


def _bfs_order(g: RootedGraph) -> Tuple[List[int], List[int]]:
    parent = [-1] * g.vertex_count
    order = [g.root]
    seen = [False] * g.vertex_count
    seen[g.root] = True
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for w in g.adjacency[v]:
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                order.append(w)
    return order, parent


# --- Builders ---
def single_vertex(delta: int = 3) -> RootedGraph:
    return RootedGraph(1, frozenset(), 0, delta)


def path(n: int, delta: int = 3) -> RootedGraph:
    """P_n rooted at its last vertex."""
    if n < 1:
        raise DomainError("a path needs at least one vertex")
    return RootedGraph(n, frozenset((i, i + 1) for i in range(n - 1)), n - 1, delta)


def star(leaves: int, delta: int = 3) -> RootedGraph:
    """A center with `leaves` pendant vertices, rooted at the center."""
    return RootedGraph(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)), 0, delta)


def cayley_tree(d: int, n: int) -> RootedGraph:
    """Depth-n tree in which every non-leaf vertex has d children."""
    if d < 1 or n < 0:
        raise DomainError("Cayley tree needs d >= 1 and n >= 0")
    edges = []
    level = [0]
    count = 1
    for _ in range(n):
        nxt = []
        for v in level:
            for _ in range(d):
                edges.append((v, count))
                nxt.append(count)
                count += 1
        level = nxt
    return RootedGraph(count, frozenset(edges), 0, max(d + 1, 2))


def tree_from_ahu(code: str, delta: int) -> RootedGraph:
    """Rebuild a rooted tree from its AHU string, vertices in preorder."""
    edges = []
    stack: List[int] = []
    count = 0
    for ch in code:
        if ch == "(":
            if stack:
                edges.append((stack[-1], count))
            stack.append(count)
            count += 1
        elif ch == ")":
            stack.pop()
        else:
            raise ParseError(f"invalid AHU code character '{ch}'")
    return RootedGraph(count, frozenset(edges), 0, delta)


# --- Partition functions ---
@dataclass(frozen=True)
class PartitionPair:
    """(Z^in, Z^out) of a rooted graph at a fixed parameter."""

    z_in: GaussianRational
    z_out: GaussianRational

    @property
    def total(self) -> GaussianRational:
        return self.z_in + self.z_out

    def ratio(self) -> RatioValue:
        if self.z_out.is_zero():
            return INDETERMINATE if self.z_in.is_zero() else INFINITY
        return self.z_in / self.z_out

    def to_json(self) -> Dict[str, str]:
        return {"z_in": str(self.z_in), "z_out": str(self.z_out), "ratio": format_ratio(self.ratio())}


def format_ratio(value: RatioValue) -> str:
    if value is INFINITY:
        return "inf"
    if value is INDETERMINATE:
        return "indeterminate"
    return str(value)


def _coerce_parameter(lam: Any) -> GaussianRational:
    return GaussianRational.coerce(lam)


def evaluate_polynomial(coeffs: Sequence[int], lam: GaussianRational) -> GaussianRational:
    """Horner evaluation of sum coeffs[k] * lam^k."""
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * lam + c
    return acc


def _polynomial_of_mask(adjacency: Tuple[int, ...], mask: int) -> List[int]:
    """Independence polynomial of the induced subgraph on `mask`."""

    @lru_cache(maxsize=None)
    def count(m: int) -> Tuple[int, ...]:
        if m == 0:
            return (1,)
        v = (m & -m).bit_length() - 1
        without = count(m & ~(1 << v))
        with_v = count(m & ~(1 << v) & ~adjacency[v])
        size = max(len(without), len(with_v) + 1)
        out = [0] * size
        for k, c in enumerate(without):
            out[k] += c
        for k, c in enumerate(with_v):
            out[k + 1] += c
        return tuple(out)

    return list(count(mask))


def _neighbor_masks(g: RootedGraph) -> Tuple[int, ...]:
    return tuple(sum(1 << w for w in adj) for adj in g.adjacency)


def independence_polynomial(g: RootedGraph, removed: Iterable[int] = ()) -> List[int]:
    """Integer coefficients of Z_{G - removed}, enumerating independent sets."""
    if g.vertex_count > BRUTE_FORCE_MAX_VERTICES:
        raise OracleLimit(
            f"enumeration limited to {BRUTE_FORCE_MAX_VERTICES} vertices, got {g.vertex_count}"
        )
    mask = (1 << g.vertex_count) - 1
    for v in removed:
        mask &= ~(1 << v)
    return _polynomial_of_mask(_neighbor_masks(g), mask)


def brute_force_partition(g: RootedGraph, lam: Any) -> PartitionPair:
    """Sum over all independent sets, split by root membership."""
    lam = _coerce_parameter(lam)
    closed = set(g.adjacency[g.root]) | {g.root}
    z_in = lam * evaluate_polynomial(independence_polynomial(g, closed), lam)
    z_out = evaluate_polynomial(independence_polynomial(g, [g.root]), lam)
    return PartitionPair(z_in, z_out)


def tree_partition(t: RootedGraph, lam: Any) -> PartitionPair:
    """Leaves-to-root recursion over the subtrees hanging off each vertex."""
    if not t.is_tree():
        raise NotATree("tree recursion needs a connected acyclic graph")
    lam = _coerce_parameter(lam)
    order, parent = _bfs_order(t)
    z_in: List[GaussianRational] = [ZERO] * t.vertex_count
    z_out: List[GaussianRational] = [ZERO] * t.vertex_count
    for v in reversed(order):
        prod_out = ONE
        prod_total = ONE
        for w in t.adjacency[v]:
            if w == parent[v]:
                continue
            prod_out = prod_out * z_out[w]
            prod_total = prod_total * (z_in[w] + z_out[w])
        z_in[v] = lam * prod_out
        z_out[v] = prod_total
    return PartitionPair(z_in[t.root], z_out[t.root])


def partition(g: RootedGraph, lam: Any) -> PartitionPair:
    if g.is_tree():
        return tree_partition(g, lam)
    return brute_force_partition(g, lam)


def ratio(g: RootedGraph, lam: Any) -> RatioValue:
    return partition(g, lam).ratio()


def equivalence_check(g: RootedGraph, lam: Any) -> bool:
    """Z^out = Z_{G-v} and Z^in = lam * Z_{G-N[v]} at lam."""
    lam = _coerce_parameter(lam)
    pair = partition(g, lam)
    closed = set(g.adjacency[g.root]) | {g.root}
    z_minus_v = evaluate_polynomial(independence_polynomial(g, [g.root]), lam)
    z_minus_closed = evaluate_polynomial(independence_polynomial(g, closed), lam)
    return pair.z_out == z_minus_v and pair.z_in == lam * z_minus_closed


# --- Gluing ---
def _offset_edges(g: RootedGraph, offset: int) -> Iterator[Edge]:
    for u, v in g.edges:
        yield (u + offset, v + offset)


def implement_on_path(blocks: Sequence[RootedGraph], delta: Optional[int] = None) -> RootedGraph:
    """Join block roots along a path; the result is rooted at the last block.

    Its ratio is f_{R_n} o ... o f_{R_1}(0) where R_i is the ratio of block i.
    """
    if not blocks:
        raise DomainError("at least one block is required")
    delta = delta or max(b.delta for b in blocks)
    if len(blocks) == 1:
        return blocks[0].with_delta(delta)
    last = len(blocks) - 1
    for i, b in enumerate(blocks):
        limit = delta - 1 if i in (0, last) else delta - 2
        if b.root_degree > limit:
            raise DegreeBound(
                f"block {i} has root degree {b.root_degree}, path position allows {limit}"
            )
    edges: List[Edge] = []
    offset = 0
    prev_root = -1
    for b in blocks:
        edges.extend(_offset_edges(b, offset))
        if prev_root >= 0:
            edges.append((prev_root, b.root + offset))
        prev_root = b.root + offset
        offset += b.vertex_count
    return RootedGraph(offset, frozenset(edges), prev_root, delta)


def implement_copies(g: RootedGraph, h: RootedGraph, delta: Optional[int] = None) -> RootedGraph:
    """Attach a copy of (H, v) at every vertex of G, identifying v with it."""
    delta = delta or max(g.delta, h.delta)
    for x in range(g.vertex_count):
        if g.degree(x) + h.root_degree > delta:
            raise DegreeBound(f"vertex {x}: {g.degree(x)} + {h.root_degree} > {delta}")
    edges: List[Edge] = list(g.edges)
    count = g.vertex_count
    others = [w for w in range(h.vertex_count) if w != h.root]
    for x in range(g.vertex_count):
        ids = {h.root: x}
        for w in others:
            ids[w] = count
            count += 1
        edges.extend((ids[u], ids[v]) for u, v in h.edges)
    return RootedGraph(count, frozenset(edges), g.root, delta)


def merge_roots(g1: RootedGraph, g2: RootedGraph, delta: Optional[int] = None) -> RootedGraph:
    """Identify the two roots; ratio law R = R_1 * R_2 / lambda."""
    delta = delta or max(g1.delta, g2.delta)
    if g1.root_degree + g2.root_degree > delta:
        raise DegreeBound(f"merged root degree {g1.root_degree + g2.root_degree} > {delta}")
    ids = {}
    count = g1.vertex_count
    for w in range(g2.vertex_count):
        if w == g2.root:
            ids[w] = g1.root
        else:
            ids[w] = count
            count += 1
    edges = list(g1.edges) + [(ids[u], ids[v]) for u, v in g2.edges]
    return RootedGraph(count, frozenset(edges), g1.root, delta)


# --- Canonical enumeration ---
class _TreeForms:
    """AHU codes of rooted trees, generated by multisets of planted subtrees."""

    def __init__(self, delta: int):
        self.delta = delta
        self.children: Dict[str, Tuple[str, ...]] = {}
        self._planted: Dict[int, List[str]] = {}
        self._ordered: List[Tuple[int, str]] = []

    def planted(self, n: int) -> List[str]:
        """Trees on n vertices whose vertices all have <= delta-1 children."""
        if n not in self._planted:
            for m in range(1, n):
                self.planted(m)
            forms = sorted(
                self._root_code(kids) for kids in self._forests(n - 1, self.delta - 1)
            )
            self._planted[n] = forms
            self._ordered.extend((n, f) for f in forms)
        return self._planted[n]

    def _root_code(self, kids: Tuple[str, ...]) -> str:
        code = "(" + "".join(sorted(kids)) + ")"
        self.children.setdefault(code, tuple(sorted(kids)))
        return code

    def _forests(self, total: int, max_trees: int, start: int = 0) -> Iterator[Tuple[str, ...]]:
        if total == 0:
            yield ()
            return
        if max_trees == 0:
            return
        for m in range(1, total + 1):
            self.planted(m)
        for idx in range(start, len(self._ordered)):
            size, code = self._ordered[idx]
            if size > total:
                break
            for rest in self._forests(total - size, max_trees - 1, idx):
                yield (code,) + rest

    def rooted(self, n: int, root_degree: int) -> List[str]:
        if n == 1:
            return [self._root_code(())]
        for m in range(1, n):
            self.planted(m)
        return sorted(self._root_code(kids) for kids in self._forests(n - 1, root_degree))


@lru_cache(maxsize=16)
def _forms(delta: int) -> _TreeForms:
    return _TreeForms(delta)


def enumerate_rooted_trees(delta: int, max_vertices: int, root_degree: Optional[int] = None) -> Iterator[Tuple[str, RootedGraph]]:
    """All rooted trees up to isomorphism, ordered by size then AHU code."""
    root_degree = delta if root_degree is None else root_degree
    forms = _forms(delta)
    for n in range(1, max_vertices + 1):
        for code in forms.rooted(n, root_degree):
            yield code, tree_from_ahu(code, delta)


def _form_partition(forms: _TreeForms, code: str, lam: GaussianRational, memo: Dict[str, PartitionPair]) -> PartitionPair:
    if code in memo:
        return memo[code]
    prod_out = ONE
    prod_total = ONE
    for kid in forms.children[code]:
        sub = _form_partition(forms, kid, lam, memo)
        prod_out = prod_out * sub.z_out
        prod_total = prod_total * sub.total
    pair = PartitionPair(lam * prod_out, prod_total)
    memo[code] = pair
    return pair


@dataclass(frozen=True)
class CatalogEntry:
    tree: RootedGraph
    ratio: RatioValue
    code: str

    @property
    def size(self) -> int:
        return self.tree.vertex_count


@dataclass(frozen=True)
class TreeCatalog:
    delta: int
    lambda0: GaussianRational
    max_vertices: int
    entries: Tuple[CatalogEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CatalogEntry]:
        return iter(self.entries)

    def finite_entries(self) -> List[CatalogEntry]:
        return [e for e in self.entries if isinstance(e.ratio, GaussianRational)]


def enumerate_catalog(delta: int, lambda0: Any, max_vertices: int) -> TreeCatalog:
    """Trees in G_delta^1 with at most `max_vertices` vertices, one per ratio value."""
    if delta < 3:
        raise DomainError("catalogs need delta >= 3")
    lam = _coerce_parameter(lambda0)
    forms = _forms(delta)
    memo: Dict[str, PartitionPair] = {}
    seen = set()
    entries: List[CatalogEntry] = []
    for n in range(1, max_vertices + 1):
        for code in forms.rooted(n, 1):
            value = _form_partition(forms, code, lam, memo).ratio()
            if value in seen:
                continue
            seen.add(value)
            entries.append(CatalogEntry(tree_from_ahu(code, delta), value, code))
        logger.debug("Catalog at %s: %d entries after %d vertices", lam, len(entries), n)
    logger.info("Catalog for delta=%d at %s has %d entries", delta, lam, len(entries))
    return TreeCatalog(delta, lam, max_vertices, tuple(entries))


def find_minimal_zero_tree(lam: Any, delta: int, max_vertices: int) -> Optional[RootedGraph]:
    """Smallest tree in G_delta^1 with Z_T(lam) = 0 and root ratio -1."""
    lam = _coerce_parameter(lam)
    if lam.is_zero():
        raise DomainError("zero search needs lambda != 0")
    forms = _forms(delta)
    memo: Dict[str, PartitionPair] = {}
    minus_one = GaussianRational(-1)
    for n in range(1, max_vertices + 1):
        for code in forms.rooted(n, 1):
            pair = _form_partition(forms, code, lam, memo)
            if pair.total.is_zero() and pair.ratio() == minus_one:
                logger.info("Zero of Z_T at %s found on %d vertices", lam, n)
                return tree_from_ahu(code, delta)
    return None

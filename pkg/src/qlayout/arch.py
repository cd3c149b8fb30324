"""Hardware coupling-graph model.

Contents: :class:`CouplingGraph` plus built-in generators (``line_graph``,
``ring_graph``, ``grid_graph``, ``qx2``), a JSON file loader
(:func:`load_graph`) and a name resolver (:func:`resolve_graph`) used by the
command line (``qx2``, ``line:5``, ``ring:5``, ``grid:2x3``, or a file path).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field


class GraphError(ValueError):
    """Invalid coupling-graph description."""


@dataclass(frozen=True)
class CouplingGraph:
    """Undirected connectivity between physical qubits.

    ``edges`` is kept sorted so that every edge has a stable index; the
    constraint encoder and solution decoder share that indexing.
    """

    name: str
    num_qubits: int
    edges: tuple[tuple[int, int], ...]
    _adjacency: dict[int, frozenset[int]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        seen = set()
        canon = []
        for a, b in self.edges:
            if a == b:
                raise GraphError(f"self-loop edge ({a},{b})")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise GraphError(f"edge ({a},{b}) out of range for {self.num_qubits} qubits")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise GraphError(f"duplicate edge ({a},{b})")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        adj: dict[int, set[int]] = {p: set() for p in range(self.num_qubits)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(
            self, "_adjacency", {p: frozenset(s) for p, s in adj.items()}
        )
        if self.num_qubits > 1 and not self._is_connected():
            warnings.warn(f"coupling graph {self.name!r} is not connected", stacklevel=2)

    def _is_connected(self) -> bool:
        if self.num_qubits == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for n in self._adjacency[stack.pop()]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        return len(seen) == self.num_qubits

    def neighbors(self, p: int) -> frozenset[int]:
        return self._adjacency[p]

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in set(self.edges)

    def edges_touching(self, edge_index: int) -> list[int]:
        """Indices of other edges sharing a physical qubit with this edge."""
        a, b = self.edges[edge_index]
        out = []
        for k, (x, y) in enumerate(self.edges):
            if k != edge_index and {x, y} & {a, b}:
                out.append(k)
        return out

    def edges_at(self, p: int) -> list[int]:
        """Indices of edges incident to physical qubit ``p``."""
        return [k for k, (a, b) in enumerate(self.edges) if p in (a, b)]


def line_graph(n: int) -> CouplingGraph:
    """Path topology on ``n >= 2`` qubits."""
    if n < 2:
        raise GraphError("line graph needs at least 2 qubits")
    return CouplingGraph(f"line:{n}", n, tuple((i, i + 1) for i in range(n - 1)))


def ring_graph(n: int) -> CouplingGraph:
    """Cycle topology on ``n >= 3`` qubits."""
    if n < 3:
        raise GraphError("ring graph needs at least 3 qubits")
    edges = tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),)
    return CouplingGraph(f"ring:{n}", n, edges)


def grid_graph(rows: int, cols: int) -> CouplingGraph:
    """rows x cols lattice with horizontal/vertical neighbor couplings."""
    if rows < 1 or cols < 1:
        raise GraphError("grid dimensions must be positive")
    edges = []
    for r in range(rows):
        for c in range(cols):
            p = r * cols + c
            if c + 1 < cols:
                edges.append((p, p + 1))
            if r + 1 < rows:
                edges.append((p, p + cols))
    return CouplingGraph(f"grid:{rows}x{cols}", rows * cols, tuple(edges))


def qx2() -> CouplingGraph:
    """5-qubit device: two triangles sharing qubit 2."""
    return CouplingGraph(
        "qx2", 5, ((0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4))
    )


def load_graph(path) -> CouplingGraph:
    """Load a graph file: JSON {"name", "num_qubits", "edges": [[a,b],...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: not valid JSON ({exc})") from None
    try:
        name = str(doc.get("name", str(path)))
        num_qubits = int(doc["num_qubits"])
        edges = tuple((int(a), int(b)) for a, b in doc["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"{path}: bad graph schema ({exc})") from None
    return CouplingGraph(name, num_qubits, edges)


def resolve_graph(spec: str) -> CouplingGraph:
    """Resolve an architecture name or file path to a CouplingGraph."""
    s = spec.strip().lower()
    if s == "qx2":
        return qx2()
    for prefix, builder in (("line:", line_graph), ("ring:", ring_graph)):
        if s.startswith(prefix):
            return builder(int(s[len(prefix):]))
    if s.startswith("grid:"):
        rows, _, cols = s[len("grid:"):].partition("x")
        return grid_graph(int(rows), int(cols))
    return load_graph(spec)

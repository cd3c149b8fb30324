"""Bit-vector satisfiability encoding of one layout decision instance.

The question "can this circuit be mapped onto this device within depth T_B
(and at most S_B swaps)?" becomes a quantifier-free bit-vector script:

* ``pos_q{q}_t{t}`` — physical location of logical qubit q at step t;
* ``swp_e{k}_t{t}`` — true iff a swap on edge k completes at step t;
* ``time_g{i}`` — execution step of gate i, a bit vector of
  ``time_bits`` bits.

A gate executing at step t contributes t+1 to the final depth; a swap
completing at t occupies its two physical qubits over the window
[t-duration+1, t] and exchanges the mapping that takes effect at t+1.
The time grid has extent ``horizon`` (exclusive), which always exceeds any
depth bound asserted against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arch import CouplingGraph
from .circuit import Circuit, build_dag

DEFAULT_SWAP_DURATION = 3


class EncodingError(ValueError):
    """Instance cannot be encoded with the requested shape."""


def bit_length(value: int) -> int:
    """Bits needed to represent ``value``: floor(log2(value)) + 1, min 1."""
    return max(1, int(value).bit_length())


def _bv(value: int, width: int) -> str:
    return "#b" + format(value, f"0{width}b")


@dataclass(frozen=True)
class EncodingContext:
    """Variable grids and shape parameters for one instance."""

    circuit: Circuit
    graph: CouplingGraph
    horizon: int                 # exclusive extent of the time grids
    time_bits: int               # width of every gate-time bit vector
    swap_duration: int = DEFAULT_SWAP_DURATION
    dag_edges: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        if self.circuit.num_qubits > self.graph.num_qubits:
            raise EncodingError(
                f"circuit needs {self.circuit.num_qubits} qubits but device"
                f" {self.graph.name!r} has {self.graph.num_qubits}"
            )
        if self.horizon < 1:
            raise EncodingError("time horizon must be at least 1")
        if self.time_bits < 1:
            raise EncodingError("gate-time width must be at least 1 bit")
        if self.swap_duration < 1:
            raise EncodingError("swap duration must be at least 1 step")
        object.__setattr__(self, "dag_edges", tuple(sorted(build_dag(self.circuit).edges)))

    @property
    def qubit_bits(self) -> int:
        """Width of each position variable: ceil(log2 |P|), at least 1."""
        n = self.graph.num_qubits
        return max(1, (n - 1).bit_length() if n > 1 else 1)

    @property
    def representable_times(self) -> int:
        """Largest time-step count expressible in gate-time equalities."""
        return min(self.horizon, 1 << self.time_bits)

    def pos_name(self, q: int, t: int) -> str:
        return f"pos_q{q}_t{t}"

    def swap_name(self, e: int, t: int) -> str:
        return f"swp_e{e}_t{t}"

    def time_name(self, g: int) -> str:
        return f"time_g{g}"

    def variables(self) -> list[tuple[str, str]]:
        """All (name, sort) pairs, in declaration order."""
        out = []
        for q in range(self.circuit.num_qubits):
            for t in range(self.horizon):
                out.append((self.pos_name(q, t), f"(_ BitVec {self.qubit_bits})"))
        for e in range(len(self.graph.edges)):
            for t in range(self.horizon):
                out.append((self.swap_name(e, t), "Bool"))
        for g in range(len(self.circuit.gates)):
            out.append((self.time_name(g), f"(_ BitVec {self.time_bits})"))
        return out


def build_context(
    circuit: Circuit,
    graph: CouplingGraph,
    horizon: int,
    time_bits: int,
    swap_duration: int = DEFAULT_SWAP_DURATION,
) -> EncodingContext:
    return EncodingContext(circuit, graph, horizon, time_bits, swap_duration)


def declarations(ctx: EncodingContext) -> list[str]:
    return [f"(declare-const {name} {sort})" for name, sort in ctx.variables()]


def encode_base(ctx: EncodingContext) -> list[str]:
    """The instance-defining constraints, independent of any bound.

    Families: mapping validity and injectivity; two-qubit adjacency at
    execution time; dependency ordering; swap-window exclusivity and gate
    blocking; mapping transformation after swap completion.
    """
    lines: list[str] = []
    nq = ctx.circuit.num_qubits
    nphys = ctx.graph.num_qubits
    qb = ctx.qubit_bits
    edges = ctx.graph.edges
    dur = ctx.swap_duration

    # Mapping validity: positions inside the device, distinct per step.
    phys_limit = None if nphys == (1 << qb) else _bv(nphys, qb)
    for t in range(ctx.horizon):
        if phys_limit is not None:
            for q in range(nq):
                lines.append(f"(assert (bvult {ctx.pos_name(q, t)} {phys_limit}))")
        if nq > 1:
            names = " ".join(ctx.pos_name(q, t) for q in range(nq))
            lines.append(f"(assert (distinct {names}))")

    # Two-qubit gates execute on device edges.
    for g in ctx.circuit.gates:
        if not g.is_two_qubit:
            continue
        q1, q2 = g.qubits
        for t in range(ctx.representable_times):
            placements = []
            for a, b in edges:
                pa, pb = _bv(a, qb), _bv(b, qb)
                p1, p2 = ctx.pos_name(q1, t), ctx.pos_name(q2, t)
                placements.append(f"(and (= {p1} {pa}) (= {p2} {pb}))")
                placements.append(f"(and (= {p1} {pb}) (= {p2} {pa}))")
            lines.append(
                f"(assert (=> (= {ctx.time_name(g.id)} {_bv(t, ctx.time_bits)})"
                f" (or {' '.join(placements)})))"
            )

    # Dependent gates execute strictly in order.
    for i, j in ctx.dag_edges:
        lines.append(f"(assert (bvult {ctx.time_name(i)} {ctx.time_name(j)}))")

    # Swaps need a full window: none may complete before duration-1.
    for e in range(len(edges)):
        for t in range(min(dur - 1, ctx.horizon)):
            lines.append(f"(assert (not {ctx.swap_name(e, t)}))")

    # Swap windows exclude overlapping swaps on the same or touching edges.
    for t in range(dur - 1, ctx.horizon):
        for k in range(len(edges)):
            me = ctx.swap_name(k, t)
            for tt in range(t - dur + 1, t):
                lines.append(f"(assert (not (and {me} {ctx.swap_name(k, tt)})))")
            for kk in ctx.graph.edges_touching(k):
                for tt in range(t - dur + 1, t + 1):
                    lines.append(f"(assert (not (and {me} {ctx.swap_name(kk, tt)})))")

    # Swap windows block gates on the swapped physical qubits.
    for t in range(dur - 1, ctx.horizon):
        for k, (a, b) in enumerate(edges):
            pa, pb = _bv(a, qb), _bv(b, qb)
            me = ctx.swap_name(k, t)
            for g in ctx.circuit.gates:
                for tt in range(t - dur + 1, min(t + 1, ctx.representable_times)):
                    on_edge = " ".join(
                        f"(= {ctx.pos_name(q, tt)} {p})"
                        for q in g.qubits
                        for p in (pa, pb)
                    )
                    lines.append(
                        f"(assert (=> (and (= {ctx.time_name(g.id)}"
                        f" {_bv(tt, ctx.time_bits)}) (or {on_edge})) (not {me})))"
                    )

    # Mapping evolves exactly through completed swaps.
    for t in range(ctx.horizon - 1):
        for q in range(nq):
            now, nxt = ctx.pos_name(q, t), ctx.pos_name(q, t + 1)
            for p in range(nphys):
                incident = [ctx.swap_name(k, t) for k in ctx.graph.edges_at(p)]
                pv = _bv(p, qb)
                if incident:
                    stay = f"(and (not (or {' '.join(incident)})) (= {now} {pv}))"
                else:
                    stay = f"(= {now} {pv})"
                lines.append(f"(assert (=> {stay} (= {nxt} {pv})))")
            for k, (a, b) in enumerate(edges):
                sw = ctx.swap_name(k, t)
                pa, pb = _bv(a, qb), _bv(b, qb)
                lines.append(
                    f"(assert (=> (and {sw} (= {now} {pa})) (= {nxt} {pb})))"
                )
                lines.append(
                    f"(assert (=> (and {sw} (= {now} {pb})) (= {nxt} {pa})))"
                )
    return lines


def encode_depth_bound(ctx: EncodingContext, depth_bound: int) -> list[str]:
    """Assert every gate time below the bound and no swap completing at or
    beyond it."""
    if depth_bound > ctx.horizon:
        raise EncodingError(
            f"depth bound {depth_bound} exceeds time horizon {ctx.horizon};"
            " resize the context first"
        )
    lines = []
    if depth_bound < (1 << ctx.time_bits):
        limit = _bv(depth_bound, ctx.time_bits)
        for g in range(len(ctx.circuit.gates)):
            lines.append(f"(assert (bvult {ctx.time_name(g)} {limit}))")
    for e in range(len(ctx.graph.edges)):
        for t in range(depth_bound, ctx.horizon):
            lines.append(f"(assert (not {ctx.swap_name(e, t)}))")
    return lines


def encode_swap_bound(ctx: EncodingContext, swap_bound: int) -> list[str]:
    """Cap the number of true swap indicators via a zero-extended adder tree."""
    if swap_bound < 0:
        raise EncodingError("swap bound must be nonnegative")
    all_swaps = [
        ctx.swap_name(e, t)
        for e in range(len(ctx.graph.edges))
        for t in range(ctx.horizon)
    ]
    if not all_swaps or swap_bound >= len(all_swaps):
        return []
    if swap_bound == 0:
        return [f"(assert (not {name}))" for name in all_swaps]
    width = (len(all_swaps)).bit_length()  # ceil(log2(N+1)) for N >= 1
    one, zero = _bv(1, width), _bv(0, width)
    terms = [f"(ite {name} {one} {zero})" for name in all_swaps]
    while len(terms) > 1:
        merged = []
        for i in range(0, len(terms) - 1, 2):
            merged.append(f"(bvadd {terms[i]} {terms[i + 1]})")
        if len(terms) % 2:
            merged.append(terms[-1])
        terms = merged
    return [f"(assert (bvule {terms[0]} {_bv(swap_bound, width)}))"]


def emit_script(ctx: EncodingContext, fragments: list[list[str]]) -> str:
    """Assemble a complete solver script: declarations, constraint
    fragments, the satisfiability query, and value queries for every
    variable."""
    lines = ["(set-option :produce-models true)", "(set-logic QF_BV)"]
    lines.extend(declarations(ctx))
    for fragment in fragments:
        lines.extend(fragment)
    lines.append("(check-sat)")
    for name, _ in ctx.variables():
        lines.append(f"(get-value ({name}))")
    return "\n".join(lines) + "\n"

"""Prediction-seeded iterative search for optimal depth, then optimal swaps.

Phase one finds the smallest satisfiable depth bound: start at
``max(predicted depth, longest dependency chain)``, move in 2-unit steps
(down after a satisfiable check, up after an unsatisfiable one), and close
a 2-wide satisfiable/unsatisfiable gap with a single check between the two
bounds.  Phase two fixes the optimal depth and runs the same stepping on
the swap-count bound, starting at ``min(predicted swaps, swaps in the last
satisfiable model)`` with floor zero.

Variable shapes grow on demand: the time-grid extent starts one increment
above the first bound and grows by a large or small increment (chosen by
comparing the just-checked bound against a threshold) whenever the next
bound would not fit; gate-time widths widen before a bound that crosses a
power of two and may narrow again after satisfiable checks.  Every check
emits a fresh, self-contained script to its own solver subprocess.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import backend as be
from .arch import CouplingGraph
from .circuit import Circuit, gate_depths, longest_chain
from .encode import (
    DEFAULT_SWAP_DURATION,
    bit_length,
    build_context,
    emit_script,
    encode_base,
    encode_depth_bound,
    encode_swap_bound,
)
from .features import extract_features


class SearchError(RuntimeError):
    """Search aborted by a solver failure; carries partial telemetry."""

    def __init__(self, message: str, telemetry: Optional[dict] = None):
        super().__init__(message)
        self.telemetry = telemetry or {}


@dataclass(frozen=True)
class ResizePolicy:
    """Extent-growth policy: large increment at or above the threshold."""

    threshold: int = 50
    large_step: int = 15
    small_step: int = 10

    def step(self, bound: int) -> int:
        return self.large_step if bound >= self.threshold else self.small_step


@dataclass
class BoundSearchOutcome:
    optimum: int
    history: list[tuple[int, bool]]   # (bound, satisfiable) in check order
    payload: object                   # probe payload of the optimum's model


Probe = Callable[[int], tuple[bool, object]]


def run_bound_search(start: int, floor: int, probe: Probe) -> BoundSearchOutcome:
    """Find the minimal bound whose probe is satisfiable.

    Requires a monotone frontier (satisfiable at b implies satisfiable at
    b+1) and a satisfiable region reachable above ``start``.  The returned
    payload always comes from a satisfiable check at the optimum itself.
    """
    history: list[tuple[int, bool]] = []

    def check(bound: int) -> tuple[bool, object]:
        sat, payload = probe(bound)
        history.append((bound, sat))
        return sat, payload

    current = max(start, floor)
    sat, payload = check(current)
    if sat:
        best = payload
        while current > floor:
            lower = max(current - 2, floor)
            sat2, payload2 = check(lower)
            if sat2:
                best, current = payload2, lower
                continue
            if current - lower == 1:       # nothing between the two bounds
                return BoundSearchOutcome(current, history, best)
            sat3, payload3 = check(lower + 1)
            if sat3:
                return BoundSearchOutcome(lower + 1, history, payload3)
            return BoundSearchOutcome(current, history, best)
        return BoundSearchOutcome(current, history, best)

    while True:
        upper = current + 2
        sat2, payload2 = check(upper)
        if not sat2:
            current = upper
            continue
        sat3, payload3 = check(upper - 1)
        if sat3:
            return BoundSearchOutcome(upper - 1, history, payload3)
        return BoundSearchOutcome(upper, history, payload2)


@dataclass
class SolveResult:
    optimal_depth: int
    optimal_swaps: int
    depth_checks: int
    swap_checks: int
    resize_events: list[dict] = field(default_factory=list)
    wall_time_per_check: list[float] = field(default_factory=list)
    depth_history: list[tuple[int, bool]] = field(default_factory=list)
    swap_history: list[tuple[int, bool]] = field(default_factory=list)
    solution: Optional[be.MappingSolution] = None

    def telemetry(self) -> dict:
        return {
            "optimal_depth": self.optimal_depth,
            "optimal_swaps": self.optimal_swaps,
            "depth_checks": self.depth_checks,
            "swap_checks": self.swap_checks,
            "resize_events": self.resize_events,
            "wall_time_per_check": self.wall_time_per_check,
        }


def _trivial_solution(circuit: Circuit, graph: CouplingGraph) -> SolveResult:
    """Circuits without two-qubit gates: schedule greedily, map identically."""
    times = tuple(d - 1 for d in gate_depths(circuit))
    depth = longest_chain(circuit)
    mapped = Circuit(num_qubits=graph.num_qubits, gates=circuit.gates)
    solution = be.MappingSolution(
        initial_map=tuple(range(circuit.num_qubits)),
        gate_times=times,
        swaps=(),
        final_depth=depth,
        swap_count=0,
        mapped_circuit=mapped,
    )
    return SolveResult(
        optimal_depth=depth,
        optimal_swaps=0,
        depth_checks=0,
        swap_checks=0,
        solution=solution,
    )


def solve_optimal(
    circuit: Circuit,
    graph: CouplingGraph,
    depth_model=None,
    swap_model=None,
    *,
    solver: Optional[be.SolverConfig] = None,
    swap_duration: int = DEFAULT_SWAP_DURATION,
    policy: ResizePolicy = ResizePolicy(),
    keep_swap_opcode: bool = False,
) -> SolveResult:
    """Optimal (depth, swap count) for a circuit on a device, with telemetry.

    ``depth_model``/``swap_model`` are optional predictors exposing
    ``predict(features) -> int``; they only seed the search and cannot
    change the reported optima.
    """
    if circuit.num_qubits > graph.num_qubits:
        raise ValueError(
            f"circuit needs {circuit.num_qubits} qubits but device"
            f" {graph.name!r} has {graph.num_qubits}"
        )
    if not any(g.is_two_qubit for g in circuit.gates):
        return _trivial_solution(circuit, graph)

    solver = solver or be.SolverConfig.resolve()
    ldc = longest_chain(circuit)
    features = None
    if depth_model is not None or swap_model is not None:
        features = extract_features(circuit)

    predicted_depth = depth_model.predict(features) if depth_model else 0
    start = max(predicted_depth, ldc)

    shape = {
        "horizon": start + policy.step(start),
        "time_bits": 0,
        "last_bound": None,
    }
    shape["time_bits"] = bit_length(shape["horizon"])
    resize_events: list[dict] = []
    wall_times: list[float] = []
    check_index = [0]

    def record_resize(phase: str, kind: str, old: int, new: int):
        resize_events.append(
            {"phase": phase, "check_index": check_index[0], "kind": kind,
             "old": old, "new": new}
        )

    def run_check(fragments_for, bound: int, phase: str):
        ctx = build_context(
            circuit, graph, shape["horizon"], shape["time_bits"], swap_duration
        )
        script = emit_script(ctx, fragments_for(ctx, bound))
        result = be.check(script, solver)
        wall_times.append(result.wall_time)
        check_index[0] += 1
        shape["last_bound"] = bound
        return ctx, result

    def depth_probe(bound: int) -> tuple[bool, object]:
        if bound >= shape["horizon"]:
            base = shape["last_bound"] if shape["last_bound"] is not None else bound
            record_resize("depth", "horizon", shape["horizon"], base + policy.step(base))
            shape["horizon"] = base + policy.step(base)
        if bit_length(bound) > shape["time_bits"]:
            record_resize("depth", "time_bits", shape["time_bits"], bit_length(bound))
            shape["time_bits"] = bit_length(bound)
        ctx, result = run_check(
            lambda c, b: [encode_base(c), encode_depth_bound(c, b)], bound, "depth"
        )
        if result.sat and bit_length(bound) < shape["time_bits"]:
            record_resize("depth", "time_bits", shape["time_bits"], bit_length(bound))
            shape["time_bits"] = bit_length(bound)
        return result.sat, (ctx, result.values) if result.sat else None

    try:
        depth_outcome = run_bound_search(start, ldc, depth_probe)
    except be.SolverError as exc:
        raise SearchError(
            f"depth phase failed: {exc}",
            {"wall_time_per_check": wall_times, "resize_events": resize_events},
        ) from exc

    best_depth = depth_outcome.optimum
    depth_ctx, depth_values = depth_outcome.payload
    swaps_in_model = sum(
        1
        for e in range(len(graph.edges))
        for t in range(depth_ctx.horizon)
        if depth_values[depth_ctx.swap_name(e, t)] is True
    )

    predicted_swaps = swap_model.predict(features) if swap_model else swaps_in_model
    swap_start = max(0, min(predicted_swaps, swaps_in_model))

    def swap_probe(bound: int) -> tuple[bool, object]:
        ctx, result = run_check(
            lambda c, b: [
                encode_base(c),
                encode_depth_bound(c, best_depth),
                encode_swap_bound(c, b),
            ],
            bound,
            "swap",
        )
        return result.sat, (ctx, result.values) if result.sat else None

    try:
        swap_outcome = run_bound_search(swap_start, 0, swap_probe)
    except be.SolverError as exc:
        raise SearchError(
            f"swap phase failed: {exc}",
            {"wall_time_per_check": wall_times, "resize_events": resize_events},
        ) from exc

    final_ctx, final_values = swap_outcome.payload
    solution = be.decode_solution(
        final_values, final_ctx, keep_swap_opcode=keep_swap_opcode
    )
    return SolveResult(
        optimal_depth=best_depth,
        optimal_swaps=swap_outcome.optimum,
        depth_checks=len(depth_outcome.history),
        swap_checks=len(swap_outcome.history),
        resize_events=resize_events,
        wall_time_per_check=wall_times,
        depth_history=depth_outcome.history,
        swap_history=swap_outcome.history,
        solution=solution,
    )

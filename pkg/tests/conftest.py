"""Shared fixtures: solver availability, the cross-check suite, solve caches.

The acceptance suite reuses solver results across tests (the same instance
is solved under several predictor seedings), so results are memoized in a
session-scoped cache keyed by (circuit, device, depth seed, swap seed).
"""

from __future__ import annotations

import random

import pytest

from qlayout.arch import CouplingGraph, grid_graph, line_graph, qx2, ring_graph
from qlayout.augment import ChunkPlan, gate_allocation
from qlayout.backend import SolverConfig, check
from qlayout.circuit import Circuit, longest_chain, make_circuit
from qlayout.corpus import load_bundled
from qlayout.search import SolveResult, solve_optimal

from . import oracles

# --------------------------------------------------------------------------
# Solver availability
# --------------------------------------------------------------------------

_PROBE = """(set-logic QF_BV)
(declare-const x (_ BitVec 2))
(assert (= x #b10))
(check-sat)
(get-value (x))
"""


@pytest.fixture(scope="session")
def solver_cfg() -> SolverConfig:
    cfg = SolverConfig.resolve(timeout=120.0)
    try:
        result = check(_PROBE, cfg)
    except Exception as exc:  # noqa: BLE001 - report any launch failure
        pytest.fail(
            f"SMT solver {' '.join(cfg.command)!r} is not usable: {exc}.\n"
            "Install z3 (or set QLAYOUT_SOLVER to an SMT-LIB2 command "
            "reading scripts on stdin) and rerun."
        )
    if not result.sat or result.values.get("x") != 2:
        pytest.fail(f"solver probe returned unexpected output: {result}")
    return cfg


# --------------------------------------------------------------------------
# Devices and the cross-check circuit suite
# --------------------------------------------------------------------------


def suite_graphs() -> dict[str, CouplingGraph]:
    return {
        "qx2": qx2(),
        "line5": line_graph(5),
        "ring5": ring_graph(5),
        "grid2x3": grid_graph(2, 3),
    }


def _chunk(name: str, budgets: tuple[int, ...], index: int, two_qubit_only=False):
    circuit = load_bundled(name)
    chunks = gate_allocation(circuit, ChunkPlan(budgets, two_qubit_only))
    return chunks[index]


def suite_circuits() -> list[tuple[str, Circuit]]:
    """Twenty small circuits: bundled algorithm fragments plus chunk cuts."""
    whole = [
        "ghz_n4", "bv_n4", "bv_n5", "wstate_n3", "teleport_n3",
        "qft_n3", "qft_n4", "qaoa_n3", "adder_n4", "ising_n4",
        "vqe_n4", "swap_ring_n4", "linear_n5",
    ]
    out: list[tuple[str, Circuit]] = [(n, load_bundled(n)) for n in whole]
    out += [
        ("qft_n4[b5#0]", _chunk("qft_n4", (5,), 0)),
        ("qft_n4[b5#1]", _chunk("qft_n4", (5,), 1)),
        ("ghz_n6[b3#0]", _chunk("ghz_n6", (3,), 0)),
        ("ghz_n6[b3#1]", _chunk("ghz_n6", (3,), 1)),
        ("fredkin_n3[cx4#0]", _chunk("fredkin_n3", (4,), 0, two_qubit_only=True)),
        ("fredkin_n3[cx4#1]", _chunk("fredkin_n3", (4,), 1, two_qubit_only=True)),
        ("toffoli_n3[b6+3#0]", _chunk("toffoli_n3", (6, 3), 0)),
    ]
    for name, circuit in out:
        assert 3 <= circuit.num_qubits <= 6, (name, circuit.num_qubits)
        assert len(circuit.gates) <= 30, (name, len(circuit.gates))
    assert len(out) == 20
    return out


class _Const:
    """Predictor stub returning a fixed value."""

    def __init__(self, value: int):
        self.value = value

    def predict(self, features) -> int:
        return self.value


class SuiteCache:
    """Memoized optimal-mapping results over the cross-check suite."""

    def __init__(self, solver: SolverConfig):
        self.solver = solver
        self.circuits = dict(suite_circuits())
        self.graphs = suite_graphs()
        self._solves: dict[tuple, SolveResult] = {}
        self._scans: dict[tuple, tuple[int, int, int]] = {}

    def instances(self):
        for cname in self.circuits:
            for aname in self.graphs:
                yield cname, aname

    def solve(self, cname: str, aname: str, depth_seed=None, swap_seed=None) -> SolveResult:
        key = (cname, aname, depth_seed, swap_seed)
        if key not in self._solves:
            self._solves[key] = solve_optimal(
                self.circuits[cname],
                self.graphs[aname],
                depth_model=None if depth_seed is None else _Const(depth_seed),
                swap_model=None if swap_seed is None else _Const(swap_seed),
                solver=self.solver,
            )
        return self._solves[key]

    def scan(self, cname: str, aname: str) -> tuple[int, int, int]:
        key = (cname, aname)
        if key not in self._scans:
            self._scans[key] = oracles.linear_scan_solve(
                self.circuits[cname], self.graphs[aname], self.solver
            )
        return self._scans[key]

    def ldc(self, cname: str) -> int:
        return longest_chain(self.circuits[cname])


@pytest.fixture(scope="session")
def suite(solver_cfg) -> SuiteCache:
    return SuiteCache(solver_cfg)


# --------------------------------------------------------------------------
# Random-circuit generation
# --------------------------------------------------------------------------

ONE_QUBIT_GATES = ("h", "x", "s", "t", "tdg", "z")
TWO_QUBIT_GATES = ("cx", "cz")


def random_circuit(
    rng: random.Random,
    max_qubits: int = 6,
    max_gates: int = 30,
    min_qubits: int = 1,
    min_gates: int = 0,
) -> Circuit:
    nq = rng.randint(min_qubits, max_qubits)
    ops = []
    for _ in range(rng.randint(min_gates, max_gates)):
        if nq >= 2 and rng.random() < 0.45:
            a, b = rng.sample(range(nq), 2)
            ops.append((rng.choice(TWO_QUBIT_GATES), (a, b)))
        elif rng.random() < 0.2:
            ops.append(("rz", (rng.randrange(nq),), (round(rng.uniform(0, 3), 4),)))
        else:
            ops.append((rng.choice(ONE_QUBIT_GATES), (rng.randrange(nq),)))
    return make_circuit(nq, ops)

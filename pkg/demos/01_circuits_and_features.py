"""
Parsing circuits and describing them with six numbers
=====================================================

Load an OpenQASM 2.0 program, look at its dependency structure, and
condense it into the six-quantity description used to train the
search-seeding predictors.
"""

from qlayout.circuit import build_dag, gate_depths, longest_chain, parse_qasm
from qlayout.corpus import load_bundled
from qlayout.features import extract_features

# A four-qubit GHZ-state preparation ships with the package.  Any
# OpenQASM 2.0 text with named registers works the same way; registers
# are flattened into one qubit index space in declaration order.
circuit = load_bundled("ghz_n4")
print(f"{circuit.num_qubits} qubits, {len(circuit.gates)} gates")
for gate in circuit.gates:
    print(f"  g{gate.id}: {gate.name} on {gate.qubits}")

# Gates that share a qubit are ordered; everything else can run in
# parallel.  The pairwise dependency edges and the longest chain follow
# straight from that rule.
dag = build_dag(circuit)
print("\ndependency edges:", sorted(dag.edges))
print("per-gate chain position:", gate_depths(circuit))
print("longest dependency chain:", longest_chain(circuit))

# The six-feature description: structural sizes plus two density-style
# ratios.  Serialization keeps nine significant digits so the same
# circuit always produces byte-identical training rows.
features = extract_features(circuit)
for name, value in features.to_dict().items():
    print(f"{name:24s} {value}")
print("\nas JSON:", features.to_json())

# The parser reports positions on malformed input.
try:
    parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[4];\n")
except Exception as exc:
    print("\nrejected bad program:", exc)

"""
Growing a training corpus out of a handful of circuits
======================================================

One seed circuit becomes several labeled samples: cut it into chunks
along a cycle of size budgets, renumber qubits by first appearance, and
clean the resulting table with repeated edited-nearest-neighbor rounds.
"""

import random

from qlayout.augment import ChunkPlan, Dataset, Sample, allknn_refine, gate_allocation, qubit_reorder
from qlayout.corpus import load_bundled
from qlayout.features import FeatureVector, extract_features

# --- chunking -------------------------------------------------------------
# Budgets cycle: with (6, 3) a 12-gate circuit yields chunks of 6, 3, 3.
# A trailing remainder is kept only when it still contains a two-qubit
# gate; a remainder of leftover one-qubit gates teaches the predictors
# nothing about routing.
seed = load_bundled("qft_n4")
print(f"seed: {len(seed.gates)} gates on {seed.num_qubits} qubits")

for plan in (ChunkPlan((4,)), ChunkPlan((6, 3)), ChunkPlan((5,), two_qubit_only=True)):
    chunks = gate_allocation(seed, plan)
    sizes = [len(c.gates) for c in chunks]
    widths = [c.num_qubits for c in chunks]
    label = "2q-only" if plan.two_qubit_only else "all gates"
    print(f"budgets {plan.budgets} ({label}): sizes {sizes}, widths {widths}")

# --- qubit renumbering ----------------------------------------------------
# Chunks are renumbered so the first qubit touched becomes 0, the next
# new one 1, and so on.  Two cuts with the same interaction shape then
# produce identical feature rows.
chunk = gate_allocation(seed, ChunkPlan((3,)))[2]
print("\nthird chunk after reordering:")
for gate in chunk.gates:
    print(f"  {gate.name} {gate.qubits}")
print("same thing run through qubit_reorder again is unchanged:",
      qubit_reorder(chunk).gates == chunk.gates)

# --- nearest-neighbor cleaning ---------------------------------------------
# Labels near a cluster boundary disagree with their neighborhood and
# get dropped; rounds use 1, 2, ... up to k_max neighbors, removing each
# round's casualties in one batch.
rng = random.Random(5)
samples = []
for i in range(40):
    label = i % 2
    row = tuple(label * 3.0 + rng.gauss(0.0, 0.8) for _ in range(6))
    samples.append(Sample(FeatureVector(*row), label, f"s{i}"))
# one loud outlier deep inside the other cluster
samples.append(Sample(FeatureVector(0.1, 0.0, 0.2, 0.1, 0.0, 0.1), 1, "odd"))

noisy = Dataset("depth", samples)
clean = allknn_refine(noisy, k_max=3)
kept = {s.source for s in clean.samples}
print(f"\nrefinement kept {len(clean.samples)} of {len(noisy.samples)} samples")
print("the planted outlier survived:", "odd" in kept)

# Feature rows for whatever survives go straight into training tables.
first = clean.samples[0]
print("first surviving row:", first.features.as_tuple(), "->", first.label)
print("(extract_features on a chunk gives the same kind of row:",
      extract_features(chunk).as_tuple(), ")")

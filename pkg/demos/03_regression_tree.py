"""
A regression tree that predicts search bounds
=============================================

The predictors are plain CART regression trees grown from scratch:
every split exhaustively minimizes the size-weighted child variance,
thresholds sit halfway between neighboring feature values, and leaves
predict the rounded mean of their training labels.
"""

import random

from qlayout.regressor import RegressionTree, fit

# Synthetic table: depth grows with the first feature, plus noise.
rng = random.Random(12)
rows, labels = [], []
for _ in range(120):
    chain = rng.randint(1, 12)
    width = rng.randint(2, 6)
    rows.append((
        float(chain), float(width), float(chain + rng.randint(0, 2)),
        round(rng.uniform(0.2, 1.0), 3), float(rng.randint(0, 10)),
        round(rng.uniform(0.0, 1.5), 3),
    ))
    labels.append(chain + rng.choice((0, 0, 1)))

tree = fit(rows, labels, target="depth", max_depth=4)

# The root split should latch onto the first feature immediately.
root = tree.root
print(f"root split: feature {root.split.feature_index} "
      f"({tree.feature_names[root.split.feature_index]}) "
      f"at {root.split.threshold}")
print(f"root variance {root.node_mse:.3f} -> weighted child loss "
      f"{root.split.loss:.3f}")

# Importances are the normalized variance reductions each feature earned.
print("\nimportances:")
for name, weight in zip(tree.feature_names, tree.feature_importance()):
    bar = "#" * int(round(weight * 40))
    print(f"  {name:24s} {weight:6.3f} {bar}")

# Predictions are integers: leaf means rounded half-up, floored at zero.
probe = (9.0, 4.0, 10.0, 0.7, 5.0, 0.4)
print("\npredict", probe, "->", tree.predict(probe))

# Models serialize to a plain JSON document and round-trip exactly.
clone = RegressionTree.from_json(tree.to_json())
assert clone.predict(probe) == tree.predict(probe)
print("JSON round-trip preserves predictions")

"""CART-style decision tree classifier with Gini impurity.

Splits are axis-aligned thresholds at midpoints between consecutive
distinct feature values; descent goes left iff feature < threshold, so a
value exactly at the threshold routes right. Ties in split quality break
toward the lowest feature index, then the lowest threshold, which makes
fitted trees fully deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledFeature

_GINI_EPS = 1e-12


@dataclass
class TreeNode:
    """Either an internal split (feature/threshold/children) or a leaf."""

    is_leaf: bool
    feature_index: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    label: str | None = None
    class_counts: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class DecisionTree:
    nodes: tuple[TreeNode, ...]
    classes: tuple[str, ...]
    n_features: int
    max_depth: int | None
    min_samples_split: int


@dataclass(frozen=True, eq=False)
class EvalResult:
    accuracy: float  # percent
    confusion: np.ndarray  # rows true label, columns predicted
    labels: tuple[str, ...]
    n_test: int

    def __post_init__(self):
        arr = np.array(self.confusion, dtype=np.int64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "confusion", arr)


def _gini(counts: np.ndarray, n: int) -> float:
    return 1.0 - float(((counts / n) ** 2).sum())


def _best_split(X: np.ndarray, codes: np.ndarray, n_classes: int):
    """Lowest weighted-Gini split, or None if nothing strictly improves."""
    n = len(codes)
    total = np.bincount(codes, minlength=n_classes).astype(float)
    parent = _gini(total, n)
    best = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cut = np.nonzero(xs[1:] > xs[:-1])[0]  # boundaries between distinct values
        if cut.size == 0:
            continue
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), codes[order]] = 1.0
        prefix = np.cumsum(onehot, axis=0)
        n_left = (cut + 1).astype(float)
        n_right = n - n_left
        left = prefix[cut]
        right = total - left
        gini_left = 1.0 - (left ** 2).sum(axis=1) / n_left ** 2
        gini_right = 1.0 - (right ** 2).sum(axis=1) / n_right ** 2
        weighted = (n_left * gini_left + n_right * gini_right) / n
        i = int(np.argmin(weighted))  # first minimum -> lowest threshold
        if best is None or weighted[i] < best[0]:
            best = (float(weighted[i]), f, float((xs[cut[i]] + xs[cut[i] + 1]) / 2.0))
    if best is None or best[0] >= parent - _GINI_EPS:
        return None
    return best


def fit(train: list[LabeledFeature], max_depth: int | None = None,
        min_samples_split: int = 2) -> DecisionTree:
    """Grow a tree by greedy recursive partitioning on the training set."""
    if not train:
        raise ValueError("empty training set")
    dims = {len(s.features) for s in train}
    if len(dims) != 1:
        raise ValueError(f"inconsistent feature dimensionality: {sorted(dims)}")
    X = np.stack([s.features for s in train])
    classes = tuple(sorted({s.label for s in train}))
    code_of = {c: i for i, c in enumerate(classes)}
    codes = np.array([code_of[s.label] for s in train])

    nodes: list[TreeNode] = []
    # (sample indices, depth, parent node index, side); right pushed first
    # so the left child is built before the right one
    stack = [(np.arange(len(train)), 0, -1, "")]
    while stack:
        idx, depth, parent, side = stack.pop()
        node_index = len(nodes)
        if parent >= 0:
            setattr(nodes[parent], side, node_index)

        counts = np.bincount(codes[idx], minlength=len(classes))
        pure = np.count_nonzero(counts) == 1
        depth_capped = max_depth is not None and depth >= max_depth
        split = None
        if not pure and not depth_capped and len(idx) >= min_samples_split:
            split = _best_split(X[idx], codes[idx], len(classes))

        if split is None:
            majority = classes[int(np.argmax(counts))]  # ties break lexicographically
            nodes.append(TreeNode(is_leaf=True, label=majority,
                                  class_counts={classes[i]: int(c)
                                                for i, c in enumerate(counts) if c}))
        else:
            _, feature, threshold = split
            nodes.append(TreeNode(is_leaf=False, feature_index=feature,
                                  threshold=threshold))
            goes_left = X[idx, feature] < threshold
            stack.append((idx[~goes_left], depth + 1, node_index, "right"))
            stack.append((idx[goes_left], depth + 1, node_index, "left"))

    return DecisionTree(nodes=tuple(nodes), classes=classes, n_features=X.shape[1],
                        max_depth=max_depth, min_samples_split=min_samples_split)


def predict(tree: DecisionTree, features: np.ndarray) -> str:
    """Root-to-leaf descent; left iff feature < threshold."""
    features = np.asarray(features, dtype=np.float64)
    if len(features) != tree.n_features:
        raise ValueError(f"expected {tree.n_features} features, got {len(features)}")
    node = tree.nodes[0]
    while not node.is_leaf:
        node = tree.nodes[node.left if features[node.feature_index] < node.threshold
                          else node.right]
    return node.label


def evaluate(tree: DecisionTree, test: list[LabeledFeature]) -> EvalResult:
    """Accuracy (percent) and the full confusion matrix over the test set."""
    if not test:
        raise ValueError("empty test set")
    labels = tuple(sorted(set(tree.classes) | {s.label for s in test}))
    index = {lbl: i for i, lbl in enumerate(labels)}
    confusion = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for sample in test:
        confusion[index[sample.label], index[predict(tree, sample.features)]] += 1
    accuracy = 100.0 * float(np.trace(confusion)) / len(test)
    return EvalResult(accuracy=accuracy, confusion=confusion, labels=labels,
                      n_test=len(test))


def to_json_lines(tree: DecisionTree) -> str:
    """Serialize as line-delimited JSON: a header record then one record
    per node with explicit child indices."""
    lines = [json.dumps({"kind": "tree", "classes": list(tree.classes),
                         "n_features": tree.n_features}, sort_keys=True)]
    for i, node in enumerate(tree.nodes):
        if node.is_leaf:
            rec = {"kind": "leaf", "index": i, "label": node.label,
                   "counts": node.class_counts}
        else:
            rec = {"kind": "split", "index": i, "feature": node.feature_index,
                   "threshold": node.threshold, "left": node.left,
                   "right": node.right}
        lines.append(json.dumps(rec, sort_keys=True))
    return "\n".join(lines) + "\n"


def from_json_lines(text: str) -> DecisionTree:
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    header = records[0]
    if header.get("kind") != "tree":
        raise ValueError("tree serialization must start with a tree header record")
    nodes: list[TreeNode | None] = [None] * (len(records) - 1)
    for rec in records[1:]:
        if rec["kind"] == "leaf":
            nodes[rec["index"]] = TreeNode(is_leaf=True, label=rec["label"],
                                           class_counts=dict(rec["counts"]))
        else:
            nodes[rec["index"]] = TreeNode(is_leaf=False, feature_index=rec["feature"],
                                           threshold=rec["threshold"],
                                           left=rec["left"], right=rec["right"])
    return DecisionTree(nodes=tuple(nodes), classes=tuple(header["classes"]),
                        n_features=header["n_features"], max_depth=None,
                        min_samples_split=2)

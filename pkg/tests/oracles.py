"""Independent brute-force reference implementations used to check the
package's metrics, assignment, and clustering routines. Everything here works
by explicit enumeration and stays deliberately separate from the library's
code paths."""

import itertools
import math
from collections import Counter

import numpy as np


def all_partitions(n, max_blocks):
    """All partitions of range(n) into at most max_blocks blocks, as label
    tuples in canonical (restricted-growth) form."""
    results = []

    def extend(prefix, used):
        if len(prefix) == n:
            results.append(tuple(prefix))
            return
        for block in range(min(used + 1, max_blocks - 1) + 1):
            if block <= used:
                extend(prefix + [block], used)
            elif block == used + 1 and block < max_blocks:
                extend(prefix + [block], used + 1)

    extend([0], 0)
    return results


def brute_force_assignment(cost):
    """Minimum-cost row-to-column assignment by exhaustive permutation search;
    among ties, the lexicographically smallest column vector wins."""
    cost = np.asarray(cost, dtype=float)
    k = cost.shape[0]
    best_perm = None
    best_total = math.inf
    for perm in itertools.permutations(range(k)):
        total = sum(cost[i, perm[i]] for i in range(k))
        if total < best_total - 1e-12:
            best_total = total
            best_perm = perm
    # second pass: first permutation (lexicographic order) within tolerance
    for perm in itertools.permutations(range(k)):
        total = sum(cost[i, perm[i]] for i in range(k))
        if total <= best_total + 1e-9 * max(1.0, abs(best_total)):
            return np.array(perm), total
    return np.array(best_perm), best_total


def brute_force_acc(pred, truth):
    """Best-bijection accuracy by trying every label permutation."""
    pred = list(pred)
    truth = list(truth)
    pred_ids = sorted(set(pred))
    truth_ids = sorted(set(truth))
    size = max(len(pred_ids), len(truth_ids))
    best = 0
    for perm in itertools.permutations(range(size)):
        matched = 0
        for p, t in zip(pred, truth):
            pi = pred_ids.index(p)
            ti = truth_ids.index(t)
            if perm[pi] == ti:
                matched += 1
        best = max(best, matched)
    return best / len(pred)


def brute_force_nmi(pred, truth):
    """Entropy arithmetic straight from joint label counts (natural log,
    geometric-mean normalization)."""
    n = len(pred)
    joint = Counter(zip(pred, truth))
    cp = Counter(pred)
    ct = Counter(truth)
    h_pred = -sum((c / n) * math.log(c / n) for c in cp.values())
    h_truth = -sum((c / n) * math.log(c / n) for c in ct.values())
    if h_pred == 0.0 and h_truth == 0.0:
        return 1.0
    if h_pred == 0.0 or h_truth == 0.0:
        return 0.0
    mi = 0.0
    for (p, t), c in joint.items():
        mi += (c / n) * math.log((c / n) / ((cp[p] / n) * (ct[t] / n)))
    return mi / math.sqrt(h_pred * h_truth)


def _pair_sets(labels):
    same = set()
    for i, j in itertools.combinations(range(len(labels)), 2):
        if labels[i] == labels[j]:
            same.add((i, j))
    return same


def brute_force_ari(pred, truth):
    """Adjusted Rand index from explicitly enumerated sample pairs."""
    n = len(pred)
    pred_pairs = _pair_sets(pred)
    truth_pairs = _pair_sets(truth)
    both = len(pred_pairs & truth_pairs)
    total = n * (n - 1) // 2
    expected = len(pred_pairs) * len(truth_pairs) / total if total else 0.0
    maximum = (len(pred_pairs) + len(truth_pairs)) / 2
    if maximum == expected:
        return 1.0
    return (both - expected) / (maximum - expected)


def brute_force_f_score(pred, truth):
    """Pairwise F-score from explicitly enumerated same-cluster pairs."""
    pred_pairs = _pair_sets(pred)
    truth_pairs = _pair_sets(truth)
    if not pred_pairs and not truth_pairs:
        return 1.0
    if not pred_pairs or not truth_pairs:
        return 0.0
    agreements = len(pred_pairs & truth_pairs)
    precision = agreements / len(pred_pairs)
    recall = agreements / len(truth_pairs)
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def connected_component_labels(W):
    """Component ids of the graph whose edges are the nonzero entries of W."""
    n = W.shape[0]
    labels = -np.ones(n, dtype=int)
    current = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        stack = [start]
        labels[start] = current
        while stack:
            node = stack.pop()
            for neighbor in range(n):
                if W[node, neighbor] > 0 and labels[neighbor] < 0:
                    labels[neighbor] = current
                    stack.append(neighbor)
        current += 1
    return labels


def central_difference_gradient(func, M, step=1e-5):
    """Entrywise central finite differences of a scalar function of a matrix."""
    M = np.array(M, dtype=float)
    grad = np.zeros_like(M)
    flat = M.ravel()
    grad_flat = grad.ravel()
    for idx in range(flat.size):
        original = flat[idx]
        flat[idx] = original + step
        f_plus = func(M)
        flat[idx] = original - step
        f_minus = func(M)
        flat[idx] = original
        grad_flat[idx] = (f_plus - f_minus) / (2.0 * step)
    return grad

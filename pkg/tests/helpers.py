"""Independent reference implementations the tests check against.

Everything here is a direct transcription of a definition, kept naive on
purpose: agreement between these and the package is evidence, not
tautology. Nothing in this module imports package internals beyond the
plain data types needed to build fixtures.
"""

from __future__ import annotations

import math
import re

from pivotmine.corpus import MultiCorpus, Translation


def chi2_reference(a: float, b: float, c: float, d: float) -> float:
    """Pearson chi-square from the expected-count definition."""
    n = a + b + c + d
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    if 0 in rows or 0 in cols:
        return 0.0
    total = 0.0
    observed = ((a, b), (c, d))
    for i in range(2):
        for j in range(2):
            e = rows[i] * cols[j] / n
            total += (observed[i][j] - e) ** 2 / e
    return total


def jsd_reference(p, q) -> float:
    """Jensen-Shannon divergence, base-2, straight from the formula."""
    m = [(x + y) / 2.0 for x, y in zip(p, q)]

    def kl(u, v):
        acc = 0.0
        for ui, vi in zip(u, v):
            if ui > 0:
                acc += ui * math.log2(ui / vi)
        return acc

    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def upgma_reference(labels, values):
    """O(n^3) UPGMA recomputing cluster distances from the original matrix.

    Returns {(left leaves, right leaves): height} with each side a
    frozenset and left holding the smaller minimum label. Ties break on
    (distance, min label of left, min label of right), matching the
    documented package rule.
    """
    index = {lb: i for i, lb in enumerate(labels)}
    clusters = [frozenset([lb]) for lb in labels]

    def dist(ca, cb):
        total = 0.0
        for x in ca:
            for y in cb:
                total += values[index[x]][index[y]]
        return total / (len(ca) * len(cb))

    merges = {}
    while len(clusters) > 1:
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                a, b = clusters[i], clusters[j]
                lo, hi = (a, b) if min(a) <= min(b) else (b, a)
                key = (dist(a, b), min(lo), min(hi))
                if best is None or key < best[0]:
                    best = (key, i, j, lo, hi)
        key, i, j, lo, hi = best
        merges[(lo, hi)] = key[0] / 2.0
        merged = clusters[i] | clusters[j]
        clusters = [c for k, c in enumerate(clusters) if k not in (i, j)]
        clusters.append(merged)
    return merges


def tree_merges(root):
    """Extract {(left leaves, right leaves): height} from a dendrogram.

    Sides are frozensets ordered so the left one holds the smaller
    minimum label, mirroring upgma_reference's canonical form.
    """

    def leaves(node):
        if node.is_leaf:
            return frozenset([node.label])
        out = frozenset()
        for ch in node.children:
            out |= leaves(ch)
        return out

    merges = {}

    def walk(node):
        if node.is_leaf:
            return
        a, b = (leaves(ch) for ch in node.children)
        lo, hi = (a, b) if min(a) <= min(b) else (b, a)
        merges[(lo, hi)] = node.height
        for ch in node.children:
            walk(ch)

    walk(root)
    return merges


_NUM_RE = re.compile(r"[-+0-9.eE]+")
_BARE_RE = re.compile(r"[^:,();]*")


def parse_newick(text: str) -> dict:
    """Minimal Newick reader for round-trip tests.

    Returns nested {"children": [...], "label": str, "length": float|None}.
    Handles single-quoted labels with doubled-quote escaping.
    """
    s = text.strip()
    if not s.endswith(";"):
        raise ValueError("newick must end with ';'")
    pos = 0

    def node():
        nonlocal pos
        children = []
        if s[pos] == "(":
            pos += 1
            while True:
                children.append(node())
                if s[pos] == ",":
                    pos += 1
                    continue
                if s[pos] == ")":
                    pos += 1
                    break
                raise ValueError(f"unexpected {s[pos]!r} at {pos}")
        if pos < len(s) and s[pos] == "'":
            pos += 1
            buf = []
            while True:
                ch = s[pos]
                if ch == "'":
                    if pos + 1 < len(s) and s[pos + 1] == "'":
                        buf.append("'")
                        pos += 2
                        continue
                    pos += 1
                    break
                buf.append(ch)
                pos += 1
            label = "".join(buf)
        else:
            label = _BARE_RE.match(s, pos).group(0)
            pos += len(label)
        length = None
        if pos < len(s) and s[pos] == ":":
            pos += 1
            m = _NUM_RE.match(s, pos)
            length = float(m.group(0))
            pos += len(m.group(0))
        return {"children": children, "label": label, "length": length}

    root = node()
    if s[pos] != ";":
        raise ValueError(f"trailing content at {pos}: {s[pos:]!r}")
    return root


def newick_leaf_depths(root: dict) -> dict[str, float]:
    """Sum of branch lengths from the root to each leaf label."""
    depths = {}

    def walk(node, acc):
        acc += node["length"] or 0.0
        if not node["children"]:
            depths[node["label"]] = acc
            return
        for ch in node["children"]:
            walk(ch, acc)

    walk(root, 0.0)
    return depths


def make_corpus(verses_by_tid: dict[str, dict[str, str]], iso3=None, select=True):
    """Assemble a MultiCorpus from {translation_id: {verse_id: text}}.

    iso3 overrides default language codes (first three id characters).
    With select the full universe becomes the working selection.
    """
    iso3 = iso3 or {}
    translations = {
        tid: Translation(tid, iso3.get(tid, tid[:3]), dict(verses))
        for tid, verses in verses_by_tid.items()
    }
    universe = sorted({v for t in verses_by_tid.values() for v in t})
    corpus = MultiCorpus(translations=translations, verse_universe=tuple(universe))
    if select:
        corpus = corpus.select(len(universe))
    return corpus

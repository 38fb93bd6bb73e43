"""Surface-text similarity metrics: BLEU (sentence and corpus level) and token edit distance."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

SMOOTH_NONE = "none"
SMOOTH_ADD_ONE = "add-one-on-zero"


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    smoothing: str = SMOOTH_ADD_ONE

    def __post_init__(self):
        if not (1 <= self.max_order <= 4):
            raise ValueError(f"max_order must be in [1, 4], got {self.max_order}")
        if self.smoothing not in (SMOOTH_NONE, SMOOTH_ADD_ONE):
            raise ValueError(f"unknown smoothing {self.smoothing!r}")


def _ngrams(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _clipped_matches(hyp, ref, n: int) -> tuple[int, int]:
    """(clipped match count, total hypothesis n-gram count) for order n."""
    hyp_counts = _ngrams(hyp, n)
    total = sum(hyp_counts.values())
    if total == 0:
        return 0, 0
    ref_counts = _ngrams(ref, n)
    matches = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
    return matches, total


def _combine(matches: list[int], totals: list[int], hyp_len: int, ref_len: int, smoothing: str) -> float:
    # Orders with no hypothesis n-grams at all (text shorter than the order)
    # are vacuous and excluded from the mean; identity then scores 1 at any
    # length and in any smoothing mode.
    logs = []
    for order0, (m, t) in enumerate(zip(matches, totals)):
        if t == 0:
            continue
        if m == 0 and smoothing == SMOOTH_ADD_ONE and order0 > 0:
            # Zero higher-order counts only; unigram zeros still collapse to 0.
            m, t = m + 1, t + 1
        if m == 0:
            return 0.0
        logs.append(math.log(m / t))
    if not logs:
        return 0.0
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * math.exp(sum(logs) / len(logs))


def sentence_bleu(hyp: list[str], ref: list[str], cfg: BleuConfig = BleuConfig()) -> float:
    """BLEU of one hypothesis against one reference, in [0, 1].

    Geometric mean of modified n-gram precisions for orders 1..max_order times
    the brevity penalty.  With add-one smoothing, higher-order precisions with
    zero matches are smoothed to (m+1)/(t+1) so short utterances do not
    collapse to zero; pairs sharing no unigrams still score 0.
    """
    if not hyp or not ref:
        raise ValueError("sentence_bleu requires non-empty hypothesis and reference")
    matches, totals = [], []
    for n in range(1, cfg.max_order + 1):
        m, t = _clipped_matches(hyp, ref, n)
        matches.append(m)
        totals.append(t)
    return _combine(matches, totals, len(hyp), len(ref), cfg.smoothing)


def corpus_bleu(hyps: list[list[str]], refs: list[list[str]], cfg: BleuConfig = BleuConfig(smoothing=SMOOTH_NONE)) -> float:
    """Corpus-level BLEU: n-gram statistics are summed over pairs, then combined.

    A singleton corpus equals the unsmoothed sentence_bleu of that pair.
    """
    if len(hyps) != len(refs):
        raise ValueError(f"hyps and refs must have equal length, got {len(hyps)} vs {len(refs)}")
    matches = [0] * cfg.max_order
    totals = [0] * cfg.max_order
    hyp_len = ref_len = 0
    for hyp, ref in zip(hyps, refs):
        if not hyp or not ref:
            raise ValueError("corpus_bleu requires non-empty hypotheses and references")
        for n in range(1, cfg.max_order + 1):
            m, t = _clipped_matches(hyp, ref, n)
            matches[n - 1] += m
            totals[n - 1] += t
        hyp_len += len(hyp)
        ref_len += len(ref)
    if hyp_len == 0:
        return 0.0
    return _combine(matches, totals, hyp_len, ref_len, cfg.smoothing)


def diversity(a, b) -> int:
    """Word-level Levenshtein distance between two token sequences.

    Insertions, deletions and substitutions all cost 1.  Accepts token lists or
    anything with a `.tokens` attribute (delexicalized utterances).
    """
    ta = list(getattr(a, "tokens", a))
    tb = list(getattr(b, "tokens", b))
    if not ta:
        return len(tb)
    if not tb:
        return len(ta)
    prev = list(range(len(tb) + 1))
    for i, tok_a in enumerate(ta, start=1):
        cur = [i] + [0] * len(tb)
        for j, tok_b in enumerate(tb, start=1):
            cost = 0 if tok_a == tok_b else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[-1]

"""Caption quality and diversity metrics at desk scale.

BLEU-1..4 (no smoothing), ROUGE-L, CIDEr-D, Div-1/Div-2, mBLEU, unique
words per caption, vocabulary size, and the embedding-based average
reference similarity.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .scorer import cosine
from .textnorm import ngrams

CIDER_SIGMA = 6.0
ROUGE_BETA_SQ = 1.2**2


def bleu(candidate, references, max_n: int = 4) -> float:
    """BLEU with clipped modified precision, geometric mean over
    n=1..max_n, brevity penalty against the closest reference length
    (ties resolved to the shorter), and no smoothing: any zero n-gram
    precision zeroes the score."""
    candidate = list(candidate)
    references = [list(r) for r in references]
    if not candidate:
        raise ValueError("candidate must be nonempty")
    if not references or any(not r for r in references):
        raise ValueError("references must be nonempty")
    if not 1 <= max_n <= 4:
        raise ValueError("max_n must be in 1..4")
    # Orders longer than the candidate have no n-grams at all; cap the
    # geometric mean there so a caption identical to a reference scores 1.
    max_n = min(max_n, len(candidate))
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = ngrams(candidate, n)
        max_ref = Counter()
        for ref in references:
            for gram, cnt in ngrams(ref, n).items():
                if cnt > max_ref[gram]:
                    max_ref[gram] = cnt
        clipped = sum(min(cnt, max_ref[gram]) for gram, cnt in cand_counts.items())
        total = sum(cand_counts.values())
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
    c = len(candidate)
    r = min((len(ref) for ref in references), key=lambda L: (abs(L - c), L))
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * math.exp(log_sum / max_n)


def mbleu(candidate, human_references) -> float:
    """BLEU-4 of the candidate against all human references; lower
    indicates a more novel caption."""
    return bleu(candidate, human_references, max_n=4)


def corpus_mbleu(candidates_with_refs) -> float:
    """Mean mBLEU over (candidate, references) pairs."""
    pairs = list(candidates_with_refs)
    if not pairs:
        raise ValueError("corpus must be nonempty")
    return sum(mbleu(c, refs) for c, refs in pairs) / len(pairs)


def div1(caption) -> float:
    """Unique unigrams divided by caption length."""
    caption = list(caption)
    if not caption:
        raise ValueError("caption must be nonempty")
    return len(set(caption)) / len(caption)


def div2(caption) -> float:
    """Unique bigrams divided by caption length (by word count, not
    bigram count)."""
    caption = list(caption)
    if not caption:
        raise ValueError("caption must be nonempty")
    return len(ngrams(caption, 2)) / len(caption)


@dataclass
class DiversityStats:
    mean_uniq_per_caption: float
    vocab_size: int
    mean_div1: float
    mean_div2: float


def corpus_diversity(captions) -> DiversityStats:
    """Uniq (mean unique-token count per caption), vocabulary size, and
    mean Div-1/Div-2 across the corpus."""
    captions = [list(c) for c in captions]
    if not captions:
        raise ValueError("corpus must be nonempty")
    vocab = set()
    uniq_total = 0
    for cap in captions:
        vocab.update(cap)
        uniq_total += len(set(cap))
    return DiversityStats(
        mean_uniq_per_caption=uniq_total / len(captions),
        vocab_size=len(vocab),
        mean_div1=sum(div1(c) for c in captions) / len(captions),
        mean_div2=sum(div2(c) for c in captions) / len(captions),
    )


def _lcs_length(a, b) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, references) -> float:
    """LCS F-measure with beta^2 = 1.44 (beta = 1.2); multi-reference
    score is the max over references."""
    candidate = list(candidate)
    if not candidate:
        raise ValueError("candidate must be nonempty")
    if isinstance(references[0], str):
        references = [references]
    references = [list(r) for r in references]
    if any(not r for r in references):
        raise ValueError("references must be nonempty")
    best = 0.0
    for ref in references:
        lcs = _lcs_length(candidate, ref)
        if lcs == 0:
            continue
        prec = lcs / len(candidate)
        rec = lcs / len(ref)
        f = (1.0 + ROUGE_BETA_SQ) * prec * rec / (rec + ROUGE_BETA_SQ * prec)
        best = max(best, f)
    return best


def cider_d(candidates_with_refs):
    """CIDEr-D over a small corpus of (candidate, references) pairs.

    tf-idf n-gram vectors for n=1..4 with idf from the reference corpus,
    count clipping against the reference, a gaussian length penalty
    (sigma 6), cosine per n averaged and scaled by 10. Returns
    (per-candidate list, mean).
    """
    pairs = [(list(c), [list(r) for r in refs]) for c, refs in candidates_with_refs]
    if len(pairs) < 2:
        raise ValueError("CIDEr-D needs at least 2 images for idf")
    num_images = len(pairs)
    doc_freq = [defaultdict(int) for _ in range(4)]
    for _, refs in pairs:
        for n in range(1, 5):
            seen = set()
            for ref in refs:
                seen.update(ngrams(ref, n).keys())
            for gram in seen:
                doc_freq[n - 1][gram] += 1

    def tfidf(tokens, n):
        counts = ngrams(tokens, n)
        vec = {}
        for gram, cnt in counts.items():
            df = doc_freq[n - 1][gram]
            # grams unseen in the reference corpus carry no idf evidence
            # (and keeps scores invariant under corpus duplication)
            if df > 0:
                vec[gram] = cnt * (math.log(num_images) - math.log(df))
        return vec

    def norm(vec):
        return math.sqrt(sum(v * v for v in vec.values()))

    scores = []
    for cand, refs in pairs:
        per_n = np.zeros(4)
        for ref in refs:
            delta = len(cand) - len(ref)
            penalty = math.exp(-(delta**2) / (2.0 * CIDER_SIGMA**2))
            for n in range(1, 5):
                hv = tfidf(cand, n)
                rv = tfidf(ref, n)
                # clip candidate counts' weight against the reference
                num = sum(min(hv[g], rv.get(g, 0.0)) * rv[g] for g in hv if g in rv)
                nh, nr = norm(hv), norm(rv)
                if nh > 0 and nr > 0:
                    per_n[n - 1] += penalty * num / (nh * nr)
        scores.append(10.0 * float(np.mean(per_n)) / len(refs))
    return scores, float(np.mean(scores))


def avg_ref_similarity(candidate_emb, ref_embs) -> float:
    """Mean cosine between the candidate embedding and each reference."""
    ref_embs = list(ref_embs)
    if not ref_embs:
        raise ValueError("need at least one reference embedding")
    return sum(cosine(candidate_emb, r) for r in ref_embs) / len(ref_embs)

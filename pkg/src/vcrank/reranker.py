"""Re-order beam candidates by visual relatedness.

The score function is pluggable (raw cosine, SimProb, or the trained
CNN head); ordering is total via the (score desc, baseline score desc,
original rank asc) tie-break chain. Optional gender neutralization
scores neutralized copies but always returns the original text.
"""

from __future__ import annotations

from .corpus import CandidateCaption, CandidateSet
from .textnorm import GenderLexicon, tokenize


class ScoringError(RuntimeError):
    """A candidate could not be scored; identifies the candidate."""


def neutralize_gender(text: str, lexicon: GenderLexicon) -> str:
    """Replace gendered person terms with person/people token-wise;
    spacing collapses to single spaces. Idempotent."""
    out = []
    gendered = lexicon.man_terms | lexicon.woman_terms
    for tok in tokenize(text):
        if tok in gendered:
            out.append("people" if tok in lexicon.plural_terms else "person")
        else:
            out.append(tok)
    return " ".join(out)


def rerank(
    candidate_set: CandidateSet,
    contexts,
    score_fn,
    neutralize: bool = False,
    lexicon: GenderLexicon | None = None,
) -> list[tuple[CandidateCaption, float]]:
    """Permutation of the candidates sorted by relatedness score.

    score_fn(caption_text, contexts) -> float. With neutralize, both the
    caption text and the context labels are neutralized before scoring.
    """
    if neutralize and lexicon is None:
        raise ValueError("neutralize requires a lexicon")
    scored = []
    for cand in candidate_set.candidates:
        text = cand.text
        ctxs = contexts
        if neutralize:
            text = neutralize_gender(text, lexicon)
            ctxs = [
                type(d)(neutralize_gender(d.label, lexicon) or d.label, d.confidence, d.source)
                for d in contexts
            ]
        try:
            score = float(score_fn(text, ctxs))
        except Exception as exc:
            raise ScoringError(
                f"scoring failed for candidate rank {cand.original_rank} "
                f"({cand.text!r}): {exc}"
            ) from exc
        scored.append((cand, score))
    scored.sort(key=lambda cs: (-cs[1], -cs[0].baseline_score, cs[0].original_rank))
    return scored


def select_best(candidate_set: CandidateSet, contexts, score_fn, **kwargs) -> CandidateCaption:
    """Head of the reranked order."""
    return rerank(candidate_set, contexts, score_fn, **kwargs)[0][0]

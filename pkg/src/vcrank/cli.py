"""Command-line entry point: build-dataset, stats, train, rerank, eval,
bias, search, embed-toy.

All data flows through the JSONL schemas; stdout carries only short
summaries, diagnostics go to stderr (verbosity via VCRANK_LOG). Any flag
can come from a --config JSON file, with the command line winning.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import (
    bias as bias_mod,
    capmetrics,
    corpus as corpus_mod,
    dataset_builder,
    relatedness_model,
    reranker as reranker_mod,
    scorer as scorer_mod,
    textnorm,
    toy_embedder,
    vcsearch,
)
from .corpus import SchemaError


def _log(*args):
    if os.environ.get("VCRANK_LOG"):
        print(*args, file=sys.stderr)


def _pmap(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _parse_thresholds(text: str):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise SchemaError(f"bad threshold list {text!r}") from None


def _builder_config(args) -> dataset_builder.BuilderConfig:
    return dataset_builder.BuilderConfig(
        confidence_threshold=args.confidence_threshold,
        top_k_contexts=args.top_k,
        dedup_threshold=args.dedup_threshold,
        label_thresholds=_parse_thresholds(args.thresholds),
        context_join=args.context_join,
    )


def _add_builder_flags(p):
    p.add_argument("--confidence-threshold", type=float, default=0.2)
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--dedup-threshold", type=float, default=0.9)
    p.add_argument("--thresholds", default="0.2,0.3,0.4")
    p.add_argument("--context-join", choices=["concatenated", "per_object"], default="concatenated")


def cmd_build_dataset(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    emb = corpus_mod.load_embeddings(args.embeddings)
    cfg = _builder_config(args)
    report = dataset_builder.BuildReport()
    records = dataset_builder.build_relatedness_dataset(corpus, emb, cfg, report)
    corpus_mod.write_jsonl(args.out, corpus_mod.relatedness_to_rows(records))
    per_th = {}
    for r in records:
        per_th.setdefault(r.threshold, [0, 0])
        per_th[r.threshold][r.label] += 1
    for th in sorted(per_th):
        neg, pos = per_th[th]
        print(f"threshold {th}: {pos + neg} records, {pos} positive")
    print(f"skipped {report.images_skipped}/{report.images_processed} images")
    if args.overlap_out:
        overlap = dataset_builder.build_overlap_dataset(corpus, emb, cfg)
        corpus_mod.write_jsonl(args.overlap_out, corpus_mod.relatedness_to_rows(overlap))
        print(f"overlap: {len(overlap)} records")
    if args.stats_out:
        freq = dataset_builder.context_frequency(records)
        corpus_mod.write_jsonl(
            args.stats_out, ({"label": label, "count": count} for label, count in freq)
        )
    return 0


def _load_relatedness(path):
    rows = []
    for lineno, obj in corpus_mod._read_jsonl(path):
        rows.append(
            corpus_mod.RelatednessRecord(
                caption=obj["caption"],
                context=obj["context"],
                cosine=float(obj["cosine"]),
                label=int(obj["label"]),
                threshold=float(obj["threshold"]),
            )
        )
    return rows


def cmd_stats(args) -> int:
    records = _load_relatedness(args.relatedness)
    freq = dataset_builder.context_frequency(records)
    corpus_mod.write_jsonl(args.out, ({"label": l, "count": c} for l, c in freq))
    print(f"{len(freq)} distinct context tokens")
    return 0


def _token_vectors(text, emb, toy_dim, seed):
    vecs = []
    for tok in textnorm.tokenize(text):
        if emb is not None and tok in emb:
            vecs.append(np.asarray(emb[tok]))
        elif toy_dim:
            vecs.append(toy_embedder.embed_token(tok, toy_dim, seed))
        else:
            raise SchemaError(f"no token embedding for {tok!r} (hint: --toy-dim)")
    return vecs


def cmd_train(args) -> int:
    records = _load_relatedness(args.dataset)
    records = [r for r in records if r.threshold == args.threshold]
    if not records:
        raise SchemaError(f"no records at threshold {args.threshold}")
    emb = corpus_mod.load_embeddings(args.embeddings) if args.embeddings else None
    dim = args.toy_dim if emb is None else emb.dim
    dataset = []
    for r in records:
        x = relatedness_model.make_sequence(
            _token_vectors(r.context, emb, args.toy_dim, args.seed),
            _token_vectors(r.caption, emb, args.toy_dim, args.seed),
        )
        dataset.append((x, r.label))
    cfg = relatedness_model.CnnConfig(
        embed_dim=dim,
        window=args.window,
        num_kernels=args.kernels,
        seed=args.seed,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
    )
    result = relatedness_model.train(dataset, cfg)
    relatedness_model.save_params(result.params, args.out)
    if args.loss_log:
        corpus_mod.write_jsonl(
            args.loss_log,
            ({"epoch": i, "loss": loss} for i, loss in enumerate(result.epoch_losses, 1)),
        )
    acc = relatedness_model.accuracy(result.params, dataset)
    print(f"trained on {len(dataset)} examples, final loss {result.epoch_losses[-1]:.6f}, accuracy {acc:.3f}")
    return 0


def _make_score_fn(args, emb):
    if args.scorer == "cosine":
        def fn(text, contexts):
            raw = scorer_mod.context_similarity(text, contexts, emb, args.context_join)
            return min(max(raw, 0.0), 1.0)
        return fn
    if args.scorer == "simprob":
        def fn(text, contexts):
            sim = scorer_mod.context_similarity(text, contexts, emb, args.context_join)
            return scorer_mod.simprob(sim, [d.confidence for d in contexts])
        return fn
    if args.scorer == "cnn":
        if not args.weights:
            raise SchemaError("--weights is required with --scorer cnn")
        params = relatedness_model.load_params(args.weights)
        def fn(text, contexts):
            joined = " ".join(d.label for d in contexts)
            x = relatedness_model.make_sequence(
                _token_vectors(joined, emb, args.toy_dim, args.seed),
                _token_vectors(text, emb, args.toy_dim, args.seed),
            )
            return relatedness_model.forward(params, x)[0]
        return fn
    raise SchemaError(f"unknown scorer {args.scorer!r}")


def cmd_rerank(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    by_id = {r.image_id: r for r in corpus}
    sets = corpus_mod.load_candidates(args.candidates)
    emb = corpus_mod.load_embeddings(args.embeddings)
    cfg = _builder_config(args)
    score_fn = _make_score_fn(args, emb)
    lexicon = textnorm.default_gender_lexicon()

    def process(cand_set):
        record = by_id.get(cand_set.image_id)
        if record is None:
            raise SchemaError(f"no corpus record for image {cand_set.image_id!r}")
        contexts = dataset_builder.dedup_contexts(
            dataset_builder.filter_detections(record.detections, cfg), emb, cfg
        )
        if not contexts:
            # Nothing to rank against: keep the baseline order.
            ordered = [(c, 0.0) for c in sorted(cand_set.candidates, key=lambda c: c.original_rank)]
        else:
            ordered = reranker_mod.rerank(
                cand_set, contexts, score_fn, neutralize=args.neutralize, lexicon=lexicon
            )
        return {
            "image_id": cand_set.image_id,
            "ranking": [{"text": c.text, "score": s} for c, s in ordered],
        }

    rows = _pmap(process, sets, args.jobs)
    corpus_mod.write_jsonl(args.out, rows)
    print(f"reranked {len(rows)} candidate sets")
    return 0


def cmd_eval(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    refs_by_id = {r.image_id: [textnorm.tokenize(c) for c in r.human_captions] for r in corpus}
    pairs = []
    for lineno, obj in corpus_mod._read_jsonl(args.reranked):
        image_id = obj["image_id"]
        if image_id not in refs_by_id:
            raise SchemaError(f"no references for image {image_id!r}", lineno)
        top = obj["ranking"][0]["text"]
        pairs.append((textnorm.tokenize(top), refs_by_id[image_id]))

    def per_image(pair):
        cand, refs = pair
        return {
            "bleu1": capmetrics.bleu(cand, refs, 1),
            "bleu2": capmetrics.bleu(cand, refs, 2),
            "bleu3": capmetrics.bleu(cand, refs, 3),
            "bleu4": capmetrics.bleu(cand, refs, 4),
            "rouge_l": capmetrics.rouge_l(cand, refs),
            "mbleu": capmetrics.mbleu(cand, refs),
        }

    per = _pmap(per_image, pairs, args.jobs)
    metrics = {key: sum(p[key] for p in per) / len(per) for key in per[0]} if per else {}
    if len(pairs) >= 2:
        _, metrics["cider_d"] = capmetrics.cider_d(pairs)
    stats = capmetrics.corpus_diversity([c for c, _ in pairs])
    metrics.update(
        uniq=stats.mean_uniq_per_caption,
        vocab=stats.vocab_size,
        div1=stats.mean_div1,
        div2=stats.mean_div2,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"evaluated {len(pairs)} captions -> {args.out}")
    return 0


def cmd_bias(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    lexicon = (
        textnorm.load_gender_lexicon(args.lexicon)
        if args.lexicon
        else textnorm.default_gender_lexicon()
    )
    objects = [o.strip() for o in args.objects.split(",") if o.strip()]
    rows = bias_mod.bias_report(corpus, objects, lexicon, unit=args.unit)

    def disp(v, decimals=2):
        return None if v is None else bias_mod.truncate(v, decimals)

    out_rows = []
    for row in rows:
        out_rows.append(
            {
                "object": row.object,
                "with_person": row.counts.with_person,
                "with_man": row.counts.with_man,
                "with_woman": row.counts.with_woman,
                "man_ratio": row.man_ratio,
                "woman_ratio": row.woman_ratio,
                "towards_men": row.towards_men,
            }
        )
        print(
            f"{row.object}: person={row.counts.with_person} man={row.counts.with_man} "
            f"woman={row.counts.with_woman} m={disp(row.man_ratio)} "
            f"w={disp(row.woman_ratio)} to-m={disp(row.towards_men)}"
        )
    if args.out:
        corpus_mod.write_jsonl(args.out, out_rows)
    return 0


def cmd_search(args) -> int:
    emb = corpus_mod.load_embeddings(args.embeddings)
    index = vcsearch.build_index(sorted(emb.entries.items()))
    labels = [s.strip() for s in args.contexts.split(",") if s.strip()]
    joined = " ".join(labels)
    if joined in emb:
        query = np.asarray(emb[joined])
    elif args.toy_dim:
        query = toy_embedder.embed_text(joined, emb.dim, args.seed)
    else:
        raise SchemaError(f"no embedding for query {joined!r} (hint: --toy-dim)")
    results = vcsearch.knn(index, query, args.k)
    rows = [
        {"rank": rank, "id": rid, "score": score}
        for rank, (rid, score) in enumerate(results, start=1)
    ]
    if args.out:
        corpus_mod.write_jsonl(args.out, rows)
    for row in rows:
        print(f"{row['rank']:3d}  {row['score']:+.4f}  {row['id']}")
    return 0


def _collect_toy_texts(args):
    """Texts whose embeddings the rest of the pipeline will look up."""
    texts = []
    if args.texts:
        with open(args.texts, encoding="utf-8") as fh:
            texts.extend(line.rstrip("\n") for line in fh if line.strip())
    if args.corpus:
        corpus = corpus_mod.load_corpus(args.corpus)
        cfg = _builder_config(args)
        # Dedup during the real build consults label embeddings, so
        # replay it here with the same toy table to emit the exact keys.
        label_texts = sorted({d.label for r in corpus for d in r.detections})
        table = toy_embedder.build_embedding_table(label_texts, args.dim, args.seed)
        for record in corpus:
            texts.extend(record.human_captions)
            retained = dataset_builder.dedup_contexts(
                dataset_builder.filter_detections(record.detections, cfg), table, cfg
            )
            texts.extend(d.label for d in retained)
            if retained:
                texts.append(" ".join(d.label for d in retained))
        texts.extend(label_texts)
        if args.tokens:
            for record in corpus:
                for cap in record.human_captions:
                    texts.extend(textnorm.tokenize(cap))
                for d in record.detections:
                    texts.extend(textnorm.tokenize(d.label))
    if args.candidates:
        for cand_set in corpus_mod.load_candidates(args.candidates):
            for cand in cand_set.candidates:
                texts.append(cand.text)
                if args.tokens:
                    texts.extend(textnorm.tokenize(cand.text))
    return texts


def cmd_embed_toy(args) -> int:
    texts = _collect_toy_texts(args)
    if not texts:
        raise SchemaError("no texts to embed (use --texts/--corpus/--candidates)")
    seen = set()
    rows = []
    for text in texts:
        if text in seen or not textnorm.tokenize(text):
            continue
        seen.add(text)
        vec = toy_embedder.embed_text(text, args.dim, args.seed)
        rows.append({"key": text, "vector": [float(x) for x in vec]})
    corpus_mod.write_jsonl(args.out, rows)
    print(f"embedded {len(rows)} texts (dim {args.dim})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcrank")
    parser.add_argument("--config", help="JSON file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("build-dataset", help="build the relatedness dataset")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--overlap-out")
    p.add_argument("--stats-out")
    _add_builder_flags(p)
    common(p)
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("stats", help="context frequency statistics")
    p.add_argument("--relatedness", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train the CNN relatedness head")
    p.add_argument("--dataset", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--out", required=True)
    p.add_argument("--loss-log")
    p.add_argument("--threshold", type=float, default=0.3)
    p.add_argument("--toy-dim", type=int, default=0)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--kernels", type=int, default=100)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=16)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rerank", help="re-rank beam candidates")
    p.add_argument("--candidates", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scorer", choices=["cosine", "simprob", "cnn"], default="simprob")
    p.add_argument("--weights")
    p.add_argument("--neutralize", action="store_true")
    p.add_argument("--toy-dim", type=int, default=0)
    _add_builder_flags(p)
    common(p)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("eval", help="caption quality + diversity metrics")
    p.add_argument("--reranked", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bias", help="object-gender co-occurrence report")
    p.add_argument("--corpus", required=True)
    p.add_argument("--objects", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--unit", choices=["caption", "image"], default="caption")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("search", help="visual-context image search")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--contexts", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--toy-dim", type=int, default=0)
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("embed-toy", help="materialize toy embeddings")
    p.add_argument("--texts")
    p.add_argument("--corpus")
    p.add_argument("--candidates")
    p.add_argument("--tokens", action="store_true", help="also embed individual tokens")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--out", required=True)
    _add_builder_flags(p)
    common(p)
    p.set_defaults(func=cmd_embed_toy)

    return parser


def _config_defaults(argv):
    """Pre-scan for --config so file values become parser defaults."""
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
        else:
            continue
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
        return {k.replace("-", "_"): v for k, v in cfg.items()}
    return {}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        defaults = _config_defaults(argv)
        if defaults:
            for sub in parser._subparsers._group_actions[0].choices.values():
                for action in sub._actions:
                    if action.dest in defaults:
                        action.default = defaults[action.dest]
                        action.required = False
        args = parser.parse_args(argv)
        _log(f"running {args.command}")
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()

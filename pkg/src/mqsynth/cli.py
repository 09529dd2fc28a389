"""Command-line interface: synthesis, experiments, neighbor queries, serving.

All outputs (metrics CSV, query JSONL) are deterministic for a fixed flag
set and seed: rerunning a command overwrites files with identical bytes.
"""

import argparse
import random
import sys

from .embeddings import k_nearest, load_embeddings
from .experiments import (
    AL_METHODS,
    ExperimentConfig,
    emit_metrics,
    load_dataset,
    load_synonyms,
    run_batch_al,
    run_label_switch,
)
from .learner import uncertainty
from .oracle import train_simulated_oracle
from .synthesis import METHODS, S_MQ, SynthesisConfig, pool_records, synthesize, write_pool_jsonl
from .textspace import candidate_operators, load_pos_lexicon, make_instance


def _add_resource_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--embeddings", help="word-vector file (default: bundled)")
    p.add_argument("--pos-lexicon", help="POS lexicon TSV (default: bundled)")
    p.add_argument("--suffix-rules", help="suffix rule TSV (default: bundled)")


def _add_synthesis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", default="US-HC-MQ", help=f"one of {', '.join(AL_METHODS)}")
    p.add_argument("--pool-size", type=int, default=20)
    p.add_argument("--batch-size", type=int, default=5)
    p.add_argument("--core-size", type=int, default=10)
    p.add_argument("--k", type=int, default=10, help="semantic neighborhood size")
    p.add_argument("--depth-min", type=int, default=1)
    p.add_argument("--depth-max", type=int, default=7)
    p.add_argument("--beam-width", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)


def _resources(args):
    from .resources import bundled_path, default_embeddings, default_lexicon

    if args.embeddings:
        table = load_embeddings(args.embeddings)
    else:
        table = default_embeddings()
    if args.pos_lexicon:
        suffix = args.suffix_rules or bundled_path("suffix_rules.tsv")
        lexicon = load_pos_lexicon(args.pos_lexicon, suffix)
    else:
        lexicon = default_lexicon()
    return table, lexicon


def _dataset(args):
    from .resources import default_corpus_path

    path = args.dataset or default_corpus_path()
    return load_dataset(path, split_seed=args.seed)


def _experiment_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        core_size=args.core_size,
        pool_size=args.pool_size,
        batch_size=args.batch_size,
        steps=getattr(args, "steps", 8),
        k_neighbors=args.k,
        depth_min=args.depth_min,
        depth_max=args.depth_max,
        beam_width=args.beam_width,
        seed=args.seed,
    )


def cmd_synth(args) -> int:
    from .experiments import AuditedDataset, fit_labeled

    table, lexicon = _resources(args)
    dataset = _dataset(args)
    access = AuditedDataset(dataset)
    rng = random.Random(f"synth-core:{args.seed}")
    core = access.core_sample(args.core_size, rng)
    core_insts = [make_instance(t, lexicon, lbl) for t, lbl in core]
    model = fit_labeled(list(zip(core_insts, [lbl for _, lbl in core])), table,
                        ExperimentConfig().train_params)
    heuristic = None
    if args.method != S_MQ:
        heuristic = lambda inst: uncertainty(model, inst, table)  # noqa: E731
    cfg = SynthesisConfig(
        K=args.pool_size, method=args.method, k_neighbors=args.k,
        depth_min=args.depth_min, depth_max=args.depth_max,
        beam_width=args.beam_width, seed=args.seed,
    )
    generated = synthesize(
        core_insts, cfg, heuristic,
        lambda s: candidate_operators(s, args.k, table, lexicon),
        random.Random(f"synth:{args.method}:{args.seed}"),
    )
    roots = {inst.id: inst for inst in core_insts}
    scorer = heuristic or (lambda inst: uncertainty(model, inst, table))
    records = pool_records(generated, roots, scorer)
    write_pool_jsonl(records, args.out)
    print(f"wrote {len(records)} membership queries -> {args.out}")
    return 0


def cmd_al_run(args) -> int:
    table, lexicon = _resources(args)
    dataset = _dataset(args)
    synonyms = None
    if args.method == "WNA":
        from .resources import default_synonyms_path

        synonyms = load_synonyms(args.synonyms or default_synonyms_path())
    runs = run_batch_al(
        dataset, args.method, _experiment_config(args),
        repetitions=args.reps, table=table, lexicon=lexicon, synonyms=synonyms,
    )
    paths = emit_metrics(runs, args.out)
    final = sum(r.steps[-1].accuracy for r in runs) / len(runs)
    print(f"{args.method}: mean final accuracy {final:.4f} over {args.reps} reps")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_label_switch(args) -> int:
    table, lexicon = _resources(args)
    dataset = _dataset(args)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    for m in methods:
        if m not in METHODS:
            print(f"error: unknown synthesis method {m!r}", file=sys.stderr)
            return 2
    runs = run_label_switch(
        dataset, methods=methods, cfg=_experiment_config(args),
        repetitions=args.reps, n_generate=args.n_generate,
        table=table, lexicon=lexicon,
    )
    paths = emit_metrics(runs, args.out)
    for method in methods:
        rates = [r.switch_rate for r in runs if r.method == method]
        print(f"{method}: mean switch rate {sum(rates) / len(rates):.4f}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_neighbors(args) -> int:
    table, lexicon = _resources(args)
    lines = []
    for word in args.words:
        nb = k_nearest(word, args.k, table)
        pretty = "  ".join(f"{w} ({d:.4f})" for w, d in nb.neighbors)
        lines.append(f"{word}: {pretty}")
    output = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(output)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(output)
    return 0


def cmd_oracle_report(args) -> int:
    dataset = _dataset(args)
    oracle = train_simulated_oracle(dataset.records, seed=args.seed)
    print(f"dataset {dataset.name}: {len(dataset.records)} rows, "
          f"vocab {len(oracle.vocabulary)}, 5-fold CV accuracy {oracle.cv_accuracy:.4f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    table, lexicon = _resources(args)
    app = create_app(table=table, lexicon=lexicon, data_dir=args.data_dir,
                     ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mqsynth",
        description="Membership-query synthesis for text: generate, experiment, label.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a pool of membership queries as JSONL")
    p.add_argument("--dataset", help="label,text CSV the core set is sampled from")
    _add_resource_flags(p)
    _add_synthesis_flags(p)
    p.add_argument("--out", required=True, help="output JSONL path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("al-run", help="batch active-learning experiment (accuracy CSV)")
    p.add_argument("--dataset")
    _add_resource_flags(p)
    _add_synthesis_flags(p)
    p.add_argument("--synonyms", help="synonym TSV for the WNA baseline")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_al_run)

    p = sub.add_parser("label-switch", help="label-switch experiment (switch-rate CSV)")
    p.add_argument("--dataset")
    _add_resource_flags(p)
    _add_synthesis_flags(p)
    p.add_argument("--methods", default="US-HC-MQ,S-HC-MQ,S-MQ")
    p.add_argument("--n-generate", type=int, default=50)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_label_switch)

    p = sub.add_parser("neighbors", help="print k nearest words")
    _add_resource_flags(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("words", nargs="+")
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("oracle-report", help="train the simulated oracle and report CV accuracy")
    p.add_argument("--dataset")
    _add_resource_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_report)

    p = sub.add_parser("serve", help="run the labeling HTTP service")
    _add_resource_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--data-dir", default="mqsynth-sessions")
    p.add_argument("--ui-dir", help="built frontend to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

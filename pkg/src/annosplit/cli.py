"""Command-line entry point orchestrating the pipeline end to end.

Subcommands: validate, annotate-llm, score, allocate, sweep, pareto,
serve, merge, simulate. Every run is replayable: same inputs and seeds
produce byte-identical artifacts (live-backend calls excepted; the
response cache makes reruns identical).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import storage
from .aggregation import escalated_ids, majority_vote, merge_labels
from .allocation import allocate_by_confidence, allocate_by_entropy, allocate_random
from .analytics import build_points, llm_cost, pareto_frontier, threshold_sweep
from .errors import AnnosplitError
from .gateway import GatewayConfig, MockAnnotatorSpec
from .model import CostModel, Estimator, Strategy, validate_dataset
from .pipeline import (
    DEFAULT_FRACTIONS,
    annotate_dataset,
    default_entropy_thresholds,
    simulate_run,
)
from .prompts import load_templates
from .uncertainty import batch_uncertainty

_STRATEGY_ALIASES = {
    "random": Strategy.RANDOM,
    "entropy": Strategy.ENTROPY,
    "self-eval": Strategy.SELF_EVALUATION,
    "self_evaluation": Strategy.SELF_EVALUATION,
}


def _parse_strategy(name: str) -> Strategy:
    try:
        return _STRATEGY_ALIASES[name.strip()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown strategy {name!r} (choose from {', '.join(_STRATEGY_ALIASES)})"
        )


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _cost_model(args) -> CostModel:
    if getattr(args, "cost_model", None):
        model = storage.load_cost_model(args.cost_model)
    else:
        model = CostModel(seconds_per_instance=None)
    if getattr(args, "seconds_per_instance", None) is not None:
        model = CostModel(
            llm_price_per_1k_tokens=model.llm_price_per_1k_tokens,
            human_wage_per_hour=model.human_wage_per_hour,
            annotators_per_instance=model.annotators_per_instance,
            seconds_per_instance=args.seconds_per_instance,
        )
    return model


def _templates(args, config):
    if getattr(args, "templates", None):
        return load_templates(args.templates, config)
    return None


# --- subcommand handlers ------------------------------------------------------

def cmd_validate(args) -> int:
    config = storage.load_task_config(args.config)
    dataset = storage.load_dataset(args.dataset)
    violations = validate_dataset(dataset, config)
    if not violations:
        print(f"ok: {dataset.m} instances, no violations")
        return 0
    for v in violations:
        print(f"violation[{v.kind}] instance={v.instance_id}: {v.detail}")
    print(f"{len(violations)} violation(s) in {dataset.m} instances", file=sys.stderr)
    return 1


def cmd_annotate_llm(args) -> int:
    config = storage.load_task_config(args.config)
    dataset = storage.load_dataset(args.dataset)
    gateway = GatewayConfig(
        backend=args.backend,
        model_name=args.model,
        cache_dir=args.cache_dir,
    )
    mock_spec = MockAnnotatorSpec(
        seed=args.mock_seed,
        ambiguous_rate=args.ambiguous_rate,
        difficulty_low=args.difficulty_low,
        difficulty_high=args.difficulty_high,
    )
    responses = annotate_dataset(
        config,
        dataset,
        gateway,
        mock_spec,
        ask_confidence=not args.no_confidence,
        templates=_templates(args, config),
    )
    storage.save_response_sets(args.out, responses)
    total = sum(rs.k_used for rs in responses.values())
    print(f"annotated {dataset.m} instances ({total} responses) -> {args.out}")
    return 0


def cmd_score(args) -> int:
    config = storage.load_task_config(args.config)
    dataset = storage.load_dataset(args.dataset)
    responses = storage.load_response_sets(args.responses)
    estimators = {
        "entropy": [Estimator.ENTROPY],
        "self-eval": [Estimator.SELF_EVALUATION],
        "both": [Estimator.ENTROPY, Estimator.SELF_EVALUATION],
    }[args.estimator]
    scores = []
    for est in estimators:
        scores.extend(batch_uncertainty(dataset, responses, est))
    storage.save_scores(args.out, scores)
    print(f"scored {dataset.m} instances with {len(estimators)} estimator(s) -> {args.out}")
    return 0


def cmd_allocate(args) -> int:
    config = storage.load_task_config(args.config)
    dataset = storage.load_dataset(args.dataset)
    if (args.n is None) == (args.fraction is None):
        print("error: provide exactly one of --n or --fraction", file=sys.stderr)
        return 2
    n = args.n if args.n is not None else round(args.fraction * dataset.m)
    strategy = args.strategy
    if strategy is Strategy.RANDOM:
        plan = allocate_random(dataset, n, args.seed)
    else:
        if not args.scores:
            print("error: guided strategies need --scores", file=sys.stderr)
            return 2
        estimator = (
            Estimator.ENTROPY if strategy is Strategy.ENTROPY else Estimator.SELF_EVALUATION
        )
        scores = [s for s in storage.load_scores(args.scores) if s.estimator is estimator]
        if strategy is Strategy.ENTROPY:
            plan = allocate_by_entropy(dataset, scores, n)
        else:
            plan = allocate_by_confidence(dataset, scores, n)
    storage.save_plan(args.out, plan)
    print(
        f"plan[{plan.strategy.value}]: {plan.n} instances to the LLM, "
        f"{len(plan.human_ids)} to humans -> {args.out}"
    )
    return 0


def cmd_sweep(args) -> int:
    config = storage.load_task_config(args.config)
    dataset = storage.load_dataset(args.dataset)
    responses = storage.load_response_sets(args.responses)
    estimator = Estimator.ENTROPY if args.metric == "entropy" else Estimator.SELF_EVALUATION
    if args.scores:
        scores = [s for s in storage.load_scores(args.scores) if s.estimator is estimator]
    else:
        scores = batch_uncertainty(dataset, responses, estimator)
    gold = {i.instance_id: i.gold_label for i in dataset.instances if i.gold_label}
    thresholds = (
        _parse_floats(args.thresholds)
        if args.thresholds
        else default_entropy_thresholds(config.k)
        if args.metric == "entropy"
        else [i / 10 for i in range(11)]
    )
    rows = threshold_sweep(scores, responses, gold, args.metric, thresholds)
    storage.write_jsonl(args.out, [r.to_dict() for r in rows])
    print(f"{'threshold':>10} {'coverage':>9} {'alignment':>10}")
    for r in rows:
        align = f"{r.alignment:.4f}" if r.alignment is not None else "-"
        print(f"{r.threshold:>10.4f} {r.coverage:>9.4f} {align:>10}")
    if args.plot:
        _plot_sweep(rows, args.metric, args.plot)
        print(f"plot -> {args.plot}")
    return 0


def cmd_pareto(args) -> int:
    config = storage.load_task_config(args.config)
    dataset = storage.load_dataset(args.dataset)
    responses = storage.load_response_sets(args.responses)
    cost_model = _cost_model(args)
    strategies = [_parse_strategy(s) for s in args.strategies.split(",") if s.strip()]
    fractions = _parse_floats(args.fractions)
    points = build_points(
        dataset, responses, strategies, fractions, cost_model,
        seed=args.seed, quality_metric=args.quality,
    )
    result = pareto_frontier(points)
    out_dir = Path(args.out_dir)
    storage.save_points(out_dir / "points.jsonl", result.points)
    storage.save_points(out_dir / "frontier.jsonl", result.frontier)
    print(f"{'strategy':>16} {'fraction':>9} {'cost':>12} {'quality':>8}  efficient")
    for p in result.points:
        print(
            f"{p.strategy.value:>16} {p.llm_fraction:>9.2f} {p.total_cost:>12.4f} "
            f"{p.quality:>8.4f}  {'*' if p.efficient else ''}"
        )
    print(f"{len(result.frontier)} efficient point(s) -> {out_dir}")
    if args.plot:
        _plot_pareto(result, args.plot)
        print(f"plot -> {args.plot}")
    return 0


def cmd_merge(args) -> int:
    config = storage.load_task_config(args.config)
    dataset = storage.load_dataset(args.dataset)
    plan = storage.load_plan(args.plan)
    responses = storage.load_response_sets(args.responses)
    votes = {iid: majority_vote(responses[iid]) for iid in plan.llm_ids}
    human_rows = storage.read_jsonl(args.human_labels)
    human = {row["instance_id"]: row["label"] for row in human_rows}
    records = merge_labels(plan, votes, human, dataset, label_set=config.label_set)
    storage.save_labeled(args.out, records)
    n_escalated = sum(1 for r in records if r.escalated)
    print(f"merged {len(records)} labels ({n_escalated} escalated) -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app
    from .service import AnnotationQueue

    config = storage.load_task_config(args.config)
    cost_model = _cost_model(args)
    llm_accrued = None
    escalated: set[str] = set()
    responses = None
    if args.responses:
        responses = storage.load_response_sets(args.responses)
        llm_accrued = float(llm_cost(list(responses.values()), cost_model))
    queue = AnnotationQueue(
        args.data_dir, config, cost_model=cost_model, llm_cost_accrued=llm_accrued
    )
    if args.plan and args.dataset:
        dataset = storage.load_dataset(args.dataset)
        plan = storage.load_plan(args.plan)
        if responses is not None:
            votes = {iid: majority_vote(responses[iid]) for iid in plan.llm_ids}
            escalated = escalated_ids(votes)
        added = queue.enqueue_plan(plan, dataset, escalated)
        print(f"enqueued {added} new item(s); queue total {queue.ledger()['total']}")
    points = frontier = None
    if args.points:
        points = storage.load_points(args.points)
        frontier = [p for p in points if p.efficient] or None
        if frontier:
            frontier = sorted(frontier, key=lambda p: (p.total_cost, p.quality))
    app = create_app(queue, points=points, frontier=frontier)
    print(f"serving task {config.task_id!r} on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_simulate(args) -> int:
    strategies = tuple(_parse_strategy(s) for s in args.strategies.split(",") if s.strip())
    fractions = tuple(_parse_floats(args.fractions))
    cost_model = CostModel(seconds_per_instance=args.seconds_per_instance)
    summary = simulate_run(
        args.out,
        seed=args.seed,
        num_instances=args.num_instances,
        fractions=fractions,
        strategies=strategies,
        k=args.k,
        cost_model=cost_model,
        ambiguous_rate=args.ambiguous_rate,
        quality_metric=args.quality,
    )
    points = storage.load_points(Path(args.out) / "points.jsonl")
    print(f"simulation seed={summary['seed']} m={summary['num_instances']} -> {args.out}")
    print(f"{'strategy':>16} {'fraction':>9} {'cost':>12} {'quality':>8}  efficient")
    for p in points:
        print(
            f"{p.strategy.value:>16} {p.llm_fraction:>9.2f} {p.total_cost:>12.4f} "
            f"{p.quality:>8.4f}  {'*' if p.efficient else ''}"
        )
    return 0


# --- plotting -----------------------------------------------------------------

def _plot_sweep(rows, metric: str, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [r.threshold for r in rows if r.alignment is not None]
    ys = [r.alignment for r in rows if r.alignment is not None]
    cov = [r.coverage for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "o-", label="alignment on selection")
    ax.plot([r.threshold for r in rows], cov, "s--", alpha=0.5, label="coverage")
    ax.set_xlabel(f"{metric} threshold")
    ax.set_ylabel("value")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_pareto(result, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    by_strategy: dict[str, list] = {}
    for p in result.points:
        by_strategy.setdefault(p.strategy.value, []).append(p)
    for name, pts in sorted(by_strategy.items()):
        ax.scatter(
            [p.total_cost for p in pts], [p.quality for p in pts], label=name, alpha=0.8
        )
    if result.frontier:
        ax.plot(
            [p.total_cost for p in result.frontier],
            [p.quality for p in result.frontier],
            "k-",
            lw=1.5,
            label="efficient frontier",
        )
    ax.set_xlabel("total annotation cost ($)")
    ax.set_ylabel("quality")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annosplit",
        description="Split annotation work between an LLM and human annotators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a dataset against its task config")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("annotate-llm", help="render prompt ensembles and query the backend")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--backend", choices=["mock", "live"], default="mock")
    p.add_argument("--model", default="gpt-3.5-turbo")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--templates", default=None, help="JSON template overrides by prompt type")
    p.add_argument("--mock-seed", type=int, default=0)
    p.add_argument("--ambiguous-rate", type=float, default=0.0)
    p.add_argument("--difficulty-low", type=float, default=0.0)
    p.add_argument("--difficulty-high", type=float, default=0.5)
    p.add_argument("--no-confidence", action="store_true",
                   help="do not append the confidence request to prompts")
    p.set_defaults(func=cmd_annotate_llm)

    p = sub.add_parser("score", help="compute per-instance uncertainty scores")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--estimator", choices=["entropy", "self-eval", "both"], default="both")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("allocate", help="split the dataset between LLM and human channels")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--strategy", type=_parse_strategy, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scores", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("sweep", help="alignment against uncertainty threshold (pilot data)")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--scores", default=None)
    p.add_argument("--metric", choices=["entropy", "confidence"], default="entropy")
    p.add_argument("--thresholds", default=None, help="comma-separated cutoffs")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pareto", help="cost-quality grid and efficient frontier (pilot data)")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--strategies", default="random,self-eval,entropy")
    p.add_argument("--fractions", default=",".join(str(f) for f in DEFAULT_FRACTIONS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quality", choices=["alignment", "macro_f1"], default="alignment")
    p.add_argument("--cost-model", default=None, help="JSON cost model file")
    p.add_argument("--seconds-per-instance", type=float, default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("serve", help="start the human annotation work-queue service")
    p.add_argument("--config", required=True)
    p.add_argument("--data-dir", required=True)
    p.add_argument("--plan", default=None)
    p.add_argument("--dataset", default=None)
    p.add_argument("--responses", default=None)
    p.add_argument("--points", default=None, help="points.jsonl for the dashboard")
    p.add_argument("--cost-model", default=None)
    p.add_argument("--seconds-per-instance", type=float, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("merge", help="combine LLM votes and human labels into one dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--human-labels", required=True,
                   help="NDJSON rows with instance_id and label (labels/export format)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("simulate", help="mock-annotator end-to-end run")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-instances", type=int, default=1000)
    p.add_argument("--fractions", default=",".join(str(f) for f in DEFAULT_FRACTIONS))
    p.add_argument("--strategies", default="random,self-eval,entropy")
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--ambiguous-rate", type=float, default=0.03)
    p.add_argument("--quality", choices=["alignment", "macro_f1"], default="alignment")
    p.add_argument("--seconds-per-instance", type=float, default=30.0)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AnnosplitError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error[missing file]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

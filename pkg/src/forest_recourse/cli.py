"""Command-line front end: train, predict, recourse, dump-graph, validate, serve.

Exit codes: 0 success, 2 input error, 3 infeasible query, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .cliques import EnumerationBudget
from .costs import CostError, CostModel
from .forest import Forest, ForestError, ForestParams, cross_validate, train
from .german_credit import (
    GermanCreditParseError,
    default_costs_path,
    default_data_path,
    default_schema_path,
    load_german_credit,
)
from .oracle import run_oracle_equivalence
from .recourse import (
    InternalInvariantError,
    RecourseEngine,
    RecourseQuery,
    explain_plan,
    result_to_doc,
)
from .schema import FeatureSchema, SchemaError, read_structured

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_INVARIANT = 4

INPUT_ERRORS = (
    SchemaError,
    CostError,
    ForestError,
    GermanCreditParseError,
    FileNotFoundError,
    json.JSONDecodeError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forest-recourse",
        description="Train decision forests and compute minimum-cost recourse plans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a forest and report cross-validation accuracy")
    p.add_argument("--data", default=None, help="German-Credit-format data file (default: bundled)")
    p.add_argument("--schema", default=None, help="schema file (default: bundled)")
    p.add_argument("--out", required=True, help="path for the forest document")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument("--features-per-split", type=int, default=None)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("predict", help="predict class and votes for one instance")
    p.add_argument("--model", required=True)
    p.add_argument("--instance", required=True, help="record file (mapping) or {vector: [...]}")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("recourse", help="rank minimum-cost recourse plans for one instance")
    p.add_argument("--model", required=True)
    p.add_argument("--costs", default=None, help="cost file (default: bundled)")
    p.add_argument("--instance", required=True)
    p.add_argument("--target-class", type=int, default=None, help="default: opposite of prediction")
    p.add_argument("--max-results", type=int, default=5)
    p.add_argument("--max-cliques", type=int, default=50000)
    p.add_argument("--time-budget-ms", type=float, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("dump-graph", help="write the leaf compatibility graph")
    p.add_argument("--model", required=True)
    p.add_argument("--target-class", type=int, required=True)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("validate", help="cross-check the engine against the grid oracle")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--costs", default=None, help="cost file (default: bundled)")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--max-cliques", type=int, default=50000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)
    return parser


def _require(path: str | Path, kind: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{kind} file not found: {path}")
    return path


def _load_instance(path: str | Path, schema: FeatureSchema) -> np.ndarray:
    doc = read_structured(_require(path, "instance"))
    if not isinstance(doc, dict):
        raise SchemaError(f"instance file {path} must hold a mapping")
    if "vector" in doc:
        v = np.asarray(doc["vector"], dtype=np.float64)
        schema.validate_vector(v)
        return v
    return schema.encode(doc)


def cmd_train(args) -> int:
    data_path = _require(args.data or default_data_path(), "data")
    schema = FeatureSchema.load(_require(args.schema or default_schema_path(), "schema"))
    X, y, schema = load_german_credit(data_path, schema)
    params = ForestParams(
        k=args.k,
        max_depth=args.max_depth,
        min_leaf_size=args.min_leaf,
        features_per_split=args.features_per_split,
        seed=args.seed,
    )
    print(f"seed: {args.seed}")
    print(f"training on {X.shape[0]} rows, dimension {X.shape[1]}")
    accs = cross_validate(X, y, schema, params, folds=args.folds)
    for i, a in enumerate(accs, start=1):
        print(f"fold {i}: accuracy {a:.4f}")
    print(f"mean accuracy: {float(np.mean(accs)):.4f}")
    forest = train(X, y, schema, params)
    forest.metadata["cv_accuracy"] = accs
    forest.save(args.out)
    print(f"model written to {args.out}")
    if forest.metadata.get("single_class_warning"):
        print("warning: training data held a single class; trees are depth-0")
    return EXIT_OK


def cmd_predict(args) -> int:
    forest = Forest.load(_require(args.model, "model"))
    v = _load_instance(args.instance, forest.schema)
    result = forest.predict(v)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "seed": args.seed,
                    "predicted_class": result.predicted_class,
                    "votes": list(result.votes),
                }
            )
        )
    else:
        print(f"seed: {args.seed}")
        print(f"class: {result.predicted_class}")
        print(f"votes: (class 0: {result.votes[0]}, class 1: {result.votes[1]})")
    return EXIT_OK


def cmd_recourse(args) -> int:
    forest = Forest.load(_require(args.model, "model"))
    schema = forest.schema
    costs = CostModel.load(_require(args.costs or default_costs_path(), "costs"), schema)
    v = _load_instance(args.instance, schema)
    target = args.target_class
    if target is None:
        target = 1 - forest.predict(v).predicted_class
    budget = EnumerationBudget(max_cliques=args.max_cliques, wall_time_ms=args.time_budget_ms)
    engine = RecourseEngine(forest, workers=args.threads)
    query = RecourseQuery(v, target_class=target, max_results=args.max_results, budget=budget)
    result = engine.find(query, costs)
    if args.format == "json":
        doc = result_to_doc(result, schema)
        doc["seed"] = args.seed
        doc["target_class"] = target
        print(json.dumps(doc))
    else:
        print(f"seed: {args.seed}")
        print(f"target class: {target}")
        print(f"status: {result.status}")
        if not result.exhausted:
            print("note: enumeration budget exhausted; results possibly suboptimal")
        for i, plan in enumerate(result.plans, start=1):
            print(f"plan {i}: total cost {plan.total_cost:g}")
            for line in explain_plan(plan, schema).splitlines():
                print(f"  {line}")
    return EXIT_OK if result.plans else EXIT_INFEASIBLE


def cmd_dump_graph(args) -> int:
    forest = Forest.load(_require(args.model, "model"))
    engine = RecourseEngine(forest)
    doc = engine.graph(args.target_class).to_doc()
    payload = json.dumps(doc, indent=1)
    if args.out:
        Path(args.out).write_text(payload + "\n")
        print(f"graph written to {args.out}")
    else:
        print(payload)
    return EXIT_OK


def cmd_validate(args) -> int:
    reports = run_oracle_equivalence(args.instances, args.seed)
    matches = sum(r["match"] for r in reports)
    print(f"seed: {args.seed}")
    for r in reports:
        if not r["match"]:
            print(
                f"mismatch on instance {r['instance']}: "
                f"engine={r['engine_cost']} oracle={r['oracle_cost']}"
            )
    print(f"{matches}/{len(reports)} instances match")
    return EXIT_OK if matches == len(reports) else EXIT_INVARIANT


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import ServiceConfig, create_app

    forest = Forest.load(_require(args.model, "model"))
    costs = CostModel.load(_require(args.costs or default_costs_path(), "costs"), forest.schema)
    config = ServiceConfig(max_cliques=args.max_cliques, workers=args.threads)
    app = create_app(forest, costs, config)
    print(f"seed: {args.seed}")
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "train": cmd_train,
        "predict": cmd_predict,
        "recourse": cmd_recourse,
        "dump-graph": cmd_dump_graph,
        "validate": cmd_validate,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InternalInvariantError as e:
        print(f"internal invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

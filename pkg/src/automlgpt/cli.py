"""Command-line front end.

Thin dispatch over the library: validate cards, compose prompts, run a
transfer recommendation, tune against a backend, run the benchmark, or
serve the HTTP API. Machine output goes to stdout, diagnostics to
stderr. Exit codes: 0 success, 1 validation/domain error, 2 usage error,
3 backend or IO error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from . import transfer, tuner
from .cards import parse_data_card, parse_model_card
from .composer import UserRequest, compose_prompt
from .constraints import looks_like_constraint, parse_constraint
from .encoder import HashEmbedder
from .errors import AutoMlError, BackendError, CorruptRegistry, IoFailure
from .oracle import HttpBackend, MockBackend, parse_response
from .registry import load_registry

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_BACKEND_IO = 3


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _load_cards(args):
    data = parse_data_card(_read(args.data))
    model = parse_model_card(_read(args.model))
    return data, model


def _make_backend(name: str):
    return HttpBackend() if name == "http" else MockBackend()


def _classify_request(text: str) -> UserRequest:
    if looks_like_constraint(text):
        return UserRequest(kind="constraint", payload=parse_constraint(text))
    return UserRequest(kind="free_text", payload=text)


def _recommendation_obj(rec: transfer.Recommendation) -> dict:
    return {
        "config": rec.config,
        "source": rec.source,
        "neighbors": [{"dataset": n, "weight": w} for n, w in rec.neighbor_summary],
        "rationale": rec.rationale,
    }


def cmd_validate(args) -> int:
    document = _read(args.path)
    kind = args.kind
    if kind == "auto":
        try:
            keys = set(json.loads(document))
        except (ValueError, TypeError):
            keys = set()
        kind = "model" if "arch_hparams" in keys else "data"
    if kind == "model":
        parse_model_card(document)
    else:
        parse_data_card(document)
    print("ok", file=sys.stderr)
    return EXIT_OK


def cmd_compose(args) -> int:
    data, model = _load_cards(args)
    requests = [_classify_request(text) for text in args.request]
    prompt = compose_prompt(data, model, requests)
    sys.stdout.write(prompt.text)
    return EXIT_OK


def cmd_recommend(args) -> int:
    data, model = _load_cards(args)
    registry = load_registry(args.registry)
    rec = transfer.recommend(data, model, registry, HashEmbedder(),
                             k=args.k, tau=args.tau)
    print(json.dumps(_recommendation_obj(rec), indent=2))
    return EXIT_OK


def cmd_tune(args) -> int:
    data, model = _load_cards(args)
    backend = _make_backend(args.backend)
    if args.registry:
        registry = load_registry(args.registry)
        seed = transfer.recommend(data, model, registry, HashEmbedder(),
                                  k=args.k, tau=args.tau)
    else:
        seed = transfer.Recommendation(
            config=model.defaults(), source="default", neighbor_summary=(),
            rationale="no registry given; seeding from model card defaults")
    requests = [_classify_request(text) for text in args.request]
    constraints = [r.payload for r in requests if r.kind == "constraint"]
    result = tuner.tune(seed, data, model, backend, constraints, args.budget)
    prompt = compose_prompt(data, model.with_defaults(result.best_config), ())
    log = parse_response(backend.complete(prompt)).predicted_log
    print(json.dumps({
        "seed": _recommendation_obj(seed),
        "best_config": result.best_config,
        "best_final_metric": result.best_final_metric,
        "queries_used": result.queries_used,
        "stop_reason": result.stop_reason,
        "predicted_log": [
            {"epoch": e.epoch, "train_loss": e.train_loss,
             "val_loss": e.val_loss, "val_metric": e.val_metric}
            for e in log.entries
        ],
    }, indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    report = bench_mod.run_unseen_benchmark(n_known=args.known,
                                            n_trials=args.seeds)
    print(report.format_table())
    out = Path(args.out)
    try:
        out.write_text(json.dumps(report.to_obj(), indent=2) + "\n",
                       encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc
    print(f"results written to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(registry_path=args.registry,
                     default_backend=args.backend,
                     static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="automlgpt",
        description="Card-driven AutoML: compose prompts, transfer and tune "
                    "hyperparameters, benchmark, serve.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a card document")
    p.add_argument("path")
    p.add_argument("--kind", choices=["auto", "data", "model"], default="auto")
    p.set_defaults(handler=cmd_validate)

    def card_flags(p):
        p.add_argument("--data", required=True, help="data card JSON path")
        p.add_argument("--model", required=True, help="model card JSON path")

    p = sub.add_parser("compose", help="render the prompt paragraph")
    card_flags(p)
    p.add_argument("--request", action="append", default=[],
                   help="additional request line (repeatable)")
    p.set_defaults(handler=cmd_compose)

    p = sub.add_parser("recommend",
                       help="similarity-weighted transfer recommendation")
    card_flags(p)
    p.add_argument("--registry", required=True, help="registry directory")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--tau", type=float, default=0.05)
    p.set_defaults(handler=cmd_recommend)

    p = sub.add_parser("tune", help="tune against a backend's predicted logs")
    card_flags(p)
    p.add_argument("--registry", default=None)
    p.add_argument("--backend", choices=["mock", "http"], default="mock")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("--budget", type=int, default=40)
    p.add_argument("--request", action="append", default=[])
    p.set_defaults(handler=cmd_tune)

    p = sub.add_parser("bench", help="run the unseen-dataset benchmark")
    p.add_argument("--seeds", type=int, default=10, help="number of trials")
    p.add_argument("--known", type=int, default=6,
                   help="tuned datasets per trial registry")
    p.add_argument("--out", default="bench_results.json")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--registry", default=None)
    p.add_argument("--backend", choices=["mock", "http"], default="mock")
    p.add_argument("--static", default=None, help="console assets directory")
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (BackendError, IoFailure, CorruptRegistry) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BACKEND_IO
    except AutoMlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

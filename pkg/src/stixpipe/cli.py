"""Command-line entry point.

Thin adapters over the library: identical inputs give identical outputs to
direct API calls. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from pathlib import Path

from . import evaluate as ev
from . import ttp as ttp_mod
from .kb import AlreadyDecided, IngestError, KnowledgeBase, UnknownCandidate
from .normalize import DecodeError, DocFormat, RawDocument
from .pipeline import PipelineConfig, bundle_json, run, to_stix_bundle

USAGE_ERROR = 1
DATA_ERROR = 2


class DataError(RuntimeError):
    pass


def _kb(args) -> KnowledgeBase:
    return KnowledgeBase(args.kb) if args.kb else KnowledgeBase()


def _table(rows: list[list[str]], header: list[str]) -> str:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    def fmt(row):
        return "  ".join(str(v).ljust(w) for v, w in zip(row, widths)).rstrip()
    lines = [fmt(header), fmt(["-" * w for w in widths])]
    lines += [fmt(r) for r in rows]
    return "\n".join(lines)


# ------------------------------------------------------------- commands


def cmd_extract(args) -> int:
    path = Path(args.file)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    fmt = DocFormat.HTML if args.format == "html" else DocFormat.PLAIN_TEXT
    config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    if args.ttp_model:
        config.ttp = True
        config.ttp_model = ttp_mod.TfidfModel.load(args.ttp_model)
    kb = _kb(args)
    snap = kb.snapshot()
    doc = RawDocument(id=path.name, content=path.read_bytes(), format=fmt)
    try:
        result = run(doc, snap, config)
    except DecodeError as exc:
        raise DataError(str(exc)) from exc
    for cand in result.candidates:
        kb.add_candidate(cand)

    if args.stix_out:
        bundle = to_stix_bundle(result, snap=snap, bundle_uuid=args.bundle_uuid)
        Path(args.stix_out).write_text(bundle_json(bundle) + "\n", encoding="utf-8")

    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
        return 0
    mention_rows = [
        [m.surface, m.stix_type, m.provenance, f"{m.confidence:.2f}",
         f"{m.span[0]}:{m.span[1]}" if m.span else "-"]
        for m in result.mentions
    ]
    print(_table(mention_rows, ["surface", "stix_type", "provenance", "conf", "span"])
          if mention_rows else "no mentions")
    if result.relations:
        print()
        rel_rows = [
            [r.source.surface, r.relationship_type, r.target.surface,
             f"{r.confidence:.2f}", r.method]
            for r in result.relations
        ]
        print(_table(rel_rows, ["source", "relationship", "target", "conf", "method"]))
    if result.candidates:
        print(f"\n{len(result.candidates)} candidate(s) queued for review")
    return 0


def cmd_kb(args) -> int:
    kb = _kb(args)
    if args.kb_command == "import-attack":
        print(kb.ingest_attack_bundle(args.bundle), "entities imported")
    elif args.kb_command == "import-locations":
        print(kb.ingest_locations_csv(args.csv), "locations imported")
    elif args.kb_command == "add":
        ent = kb.add_entity(args.type, args.name, aliases=args.alias)
        print(f"added {ent.stix_type} {ent.name!r} ({ent.id})")
    elif args.kb_command == "list":
        entities = kb.entities()
        if args.type:
            entities = [e for e in entities if e.stix_type == args.type]
        if args.json:
            print(json.dumps([
                {"id": e.id, "stix_type": e.stix_type, "name": e.name,
                 "aliases": list(e.aliases), "source": e.source}
                for e in entities
            ], indent=2))
        else:
            rows = [[e.name, e.stix_type, ", ".join(e.aliases), e.source]
                    for e in entities]
            print(_table(rows, ["name", "stix_type", "aliases", "source"])
                  if rows else "knowledge base is empty")
    return 0


def cmd_review(args) -> int:
    kb = _kb(args)
    if args.accept:
        ent = kb.review_candidate(args.accept, "accept", editor_type=args.type)
        print(f"accepted -> {ent.stix_type} {ent.name!r}")
    elif args.reject:
        kb.review_candidate(args.reject, "reject")
        print("rejected (surface stoplisted)")
    else:
        rows = [[c.id, c.surface, c.proposed_type, c.report_id, c.status]
                for c in kb.candidates(status=None if args.all else "pending")]
        print(_table(rows, ["id", "surface", "type", "report", "status"])
              if rows else "no candidates")
    return 0


def cmd_train_ttp(args) -> int:
    corpus = ttp_mod.load_corpus(args.corpus)
    try:
        model = ttp_mod.train(corpus)
    except ttp_mod.TrainError as exc:
        raise DataError(str(exc)) from exc
    model.save(args.out)
    print(f"trained on {len(corpus)} documents, "
          f"{len(model.vocabulary)} terms -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    gold_dir = Path(args.gold)
    files = sorted(gold_dir.glob("*.json"))
    if not files:
        raise DataError(f"no .json annotation files in {gold_dir}")
    kb = _kb(args)
    snap = kb.snapshot()
    entity_total = ev.Scores.from_counts(0, 0, 0)
    relation_total = ev.Scores.from_counts(0, 0, 0)
    for path in files:
        try:
            report = ev.AnnotatedReport.load(str(path))
        except (ev.EvalError, json.JSONDecodeError, KeyError) as exc:
            raise DataError(f"{path}: {exc}") from exc
        doc = RawDocument(id=path.name, content=report.document.encode("utf-8"),
                          format=DocFormat.PLAIN_TEXT)
        result = run(doc, snap)
        scored = ev.evaluate_report(report, result, mode=args.mode)
        entity_total = entity_total + scored.entity_scores
        relation_total = relation_total + scored.relation_scores
    payload = {
        "mode": args.mode,
        "reports": len(files),
        "entities": {"precision": entity_total.precision,
                     "recall": entity_total.recall, "f1": entity_total.f1},
        "relations": {"precision": relation_total.precision,
                      "recall": relation_total.recall, "f1": relation_total.f1},
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for kind in ("entities", "relations"):
            s = payload[kind]
            print(f"{kind:9s} P={s['precision']:.3f} R={s['recall']:.3f} F1={s['f1']:.3f}")
    return 0


def cmd_eval_temporal(args) -> int:
    specs, reports = ev.load_temporal_corpus(args.corpus)
    scores = ev.temporal_experiment(
        reports, ev.seed_kb_from_specs(specs), batch_size=args.batch_size,
        augment=args.augment, auto_accept=not args.accept_all)
    payload = {
        "augment": args.augment,
        "batch_size": args.batch_size,
        "batches": [
            {"precision": s.precision, "recall": s.recall, "f1": s.f1}
            for s in scores
        ],
    }
    if args.shuffles:
        means = ev.shuffled_experiment_means(
            reports, lambda: ev.seed_kb_from_specs(specs),
            n_shuffles=args.shuffles, seed=args.seed,
            batch_size=args.batch_size, augment=args.augment)
        payload["shuffle_mean_f1"] = means
        payload["shuffle_f1_std"] = statistics.pstdev(means)
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        rows = [[i + 1, f"{s.precision:.3f}", f"{s.recall:.3f}", f"{s.f1:.3f}"]
                for i, s in enumerate(scores)]
        print(_table(rows, ["batch", "precision", "recall", "f1"]))
        if "shuffle_f1_std" in payload:
            print(f"\nshuffle mean-F1 std over {args.shuffles} orders: "
                  f"{payload['shuffle_f1_std']:.4f}")
    return 0


def cmd_serve(args) -> int:
    from .service import make_server
    kb = KnowledgeBase(args.kb_path) if args.kb_path else KnowledgeBase()
    config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    ui_dir = args.ui_dir
    if ui_dir is None:
        bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        ui_dir = str(bundled) if bundled.is_dir() else None
    server = make_server(kb, config, bind=args.bind, port=args.port, ui_dir=ui_dir,
                         max_body=args.max_body)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port} "
          f"(kb={'persistent:' + args.kb_path if args.kb_path else 'in-memory'})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# ------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stixpipe",
        description="Extract STIX 2.1 entities and relationships from CTI report text.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the pipeline on one report file")
    p.add_argument("file")
    p.add_argument("--format", choices=["text", "html"], default="text")
    p.add_argument("--stix-out", help="write a STIX 2.1 bundle to this path")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--kb", help="knowledge base directory")
    p.add_argument("--ttp-model", help="trained TTP model JSON (enables the ttp module)")
    p.add_argument("--bundle-uuid", help="fixed bundle uuid (reproducible output)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("kb", help="knowledge base management")
    kb_sub = p.add_subparsers(dest="kb_command", required=True)
    q = kb_sub.add_parser("import-attack")
    q.add_argument("bundle")
    q.add_argument("--kb")
    q = kb_sub.add_parser("import-locations")
    q.add_argument("csv")
    q.add_argument("--kb")
    q = kb_sub.add_parser("add")
    q.add_argument("--type", required=True)
    q.add_argument("--name", required=True)
    q.add_argument("--alias", action="append", default=[])
    q.add_argument("--kb")
    q = kb_sub.add_parser("list")
    q.add_argument("--type")
    q.add_argument("--json", action="store_true")
    q.add_argument("--kb")
    p.set_defaults(func=cmd_kb)

    p = sub.add_parser("review", help="review novel-entity candidates")
    p.add_argument("--accept", metavar="ID")
    p.add_argument("--reject", metavar="ID")
    p.add_argument("--list", action="store_true", dest="list_only",
                   help="list pending candidates (the default action)")
    p.add_argument("--type", help="override STIX type when accepting")
    p.add_argument("--all", action="store_true", help="list decided candidates too")
    p.add_argument("--kb")
    p.set_defaults(func=cmd_review)

    p = sub.add_parser("train-ttp", help="train the TTP classifier")
    p.add_argument("--corpus", help="JSONL corpus (bundled toy corpus if omitted)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_ttp)

    p = sub.add_parser("eval", help="score extractions against gold annotations")
    p.add_argument("--gold", required=True, help="directory of annotation JSON files")
    p.add_argument("--mode", choices=["standard", "no-error-prop"], default="standard")
    p.add_argument("--kb")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("eval-temporal", help="run the KB-growth experiment")
    p.add_argument("--batch-size", type=int, default=5)
    p.add_argument("--augment", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--accept-all", action="store_true",
                   help="skip the gold check when accepting candidates")
    p.add_argument("--corpus", help="corpus JSON (bundled synthetic corpus if omitted)")
    p.add_argument("--shuffles", type=int, default=0,
                   help="also report mean-F1 stability over N shuffled orders")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval_temporal)

    p = sub.add_parser("serve", help="run the HTTP API (and UI when built)")
    p.add_argument("--port", type=int, default=8675)
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--kb-path", help="knowledge base directory (persistent)")
    p.add_argument("--config")
    p.add_argument("--ui-dir", help="static UI bundle directory")
    p.add_argument("--max-body", type=int, default=1_000_000,
                   help="request body size limit in bytes")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else USAGE_ERROR
    try:
        return args.func(args)
    except (DataError, IngestError, UnknownCandidate, AlreadyDecided,
            ev.EvalError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())

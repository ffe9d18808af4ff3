"""fixloc command line: corpus generation, training, prediction, evaluation and repair."""
from __future__ import annotations

import argparse
import json
import statistics
import sys
from pathlib import Path

from . import __version__
from .diff import PatchRecord, extract_oracle, read_records, write_records
from .errors import FixlocError, UnsupportedPatch
from .lang import MiniSyntaxError
from .seeding import derive_seed

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

HP_FLAGS = ("d_t", "d_p", "d_o", "d_hidden", "max_l", "max_k", "lr", "epochs", "batch_size")
ABLATION_FLAGS = ("no_token_split", "whole_path_embedding", "no_fc_layer")


class UsageError(Exception):
    pass


class ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _write_manifest(out_path, args, extra: dict | None = None) -> None:
    if out_path is None:
        return
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
    manifest = {"tool": "fixloc", "version": __version__, "command": args.command, "seed": getattr(args, "seed", None),
                "config": config}
    if extra:
        manifest.update(extra)
    path = Path(out_path)
    path.with_name(path.name + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _hparams(args):
    from .model import HyperParams

    base = HyperParams()
    changes = {}
    if getattr(args, "dims", None):
        changes.update(d_t=args.dims, d_p=args.dims, d_o=args.dims, d_hidden=args.dims)
    for name in HP_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    for name in ABLATION_FLAGS:
        if getattr(args, name, False):
            changes[name] = True
    return base.replace(**changes)


def _add_hparam_flags(p):
    g = p.add_argument_group("model hyper-parameters")
    g.add_argument("--dims", type=int, help="set d_t, d_p, d_o and d_hidden at once")
    for name in HP_FLAGS:
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=float if name == "lr" else int)
    for name in ABLATION_FLAGS:
        g.add_argument("--" + name.replace("_", "-"), dest=name, action="store_true")


# subcommands


def cmd_extract(args) -> int:
    """Read (buggy, fixed) pairs and write PatchRecord JSONL; pairs the extractor rejects are skipped."""
    pairs = []
    if args.pairs:
        with open(args.pairs, encoding="utf-8") as fh:
            for n, line in enumerate(fh):
                if line.strip():
                    obj = json.loads(line)
                    pairs.append((obj.get("id", f"pair-{n:05d}"), obj["buggy_src"], obj["fixed_src"]))
    if args.buggy and args.fixed:
        pairs.append((args.id, Path(args.buggy).read_text(), Path(args.fixed).read_text()))
    if not pairs:
        raise UsageError("extract needs --pairs or both --buggy and --fixed")
    records, skipped = [], []
    for pid, buggy, fixed in pairs:
        try:
            records.append(PatchRecord(pid, buggy, fixed, extract_oracle(buggy, fixed)))
        except (UnsupportedPatch, MiniSyntaxError) as exc:
            skipped.append({"id": pid, "reason": f"{type(exc).__name__}: {exc}"})
    if len(pairs) == 1 and skipped:
        raise UnsupportedPatch(skipped[0]["reason"])
    write_records(args.out, records)
    _write_manifest(args.out, args, {"n_records": len(records), "skipped": skipped})
    print(f"wrote {len(records)} records to {args.out} ({len(skipped)} skipped)")
    return EXIT_OK


def _parse_mix(text: str | None):
    from .mutation import ALL_KINDS, MutationKind

    if not text:
        return {k: 1.0 for k in ALL_KINDS}
    mix = {}
    for part in text.split(","):
        name, _, weight = part.partition("=")
        try:
            mix[MutationKind(name.strip())] = float(weight) if weight else 1.0
        except ValueError:
            raise UsageError(f"bad mix entry {part!r}") from None
    return mix


def cmd_gen_corpus(args) -> int:
    from .mutation import generate_corpus, write_corpus
    from .seeds import generate_seed_methods

    if args.seed_methods:
        text = Path(args.seed_methods).read_text(encoding="utf-8")
        seeds = [block.strip() + "\n" for block in text.split("\n\n") if block.strip()]
    else:
        seeds = generate_seed_methods(args.n_seeds, derive_seed(args.seed, "seed-methods"))
    mix = _parse_mix(args.mix)
    records = generate_corpus(seeds, args.n, mix, args.seed, paired=args.paired)
    write_corpus(args.out, records, args.seed, mix, len(seeds))
    print(f"wrote {len(records)} mutants from {len(seeds)} seed methods to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    from .model import save_model, train

    hp = _hparams(args)
    records = read_records(args.data)

    def show(stats):
        if not args.quiet:
            print(f"epoch {stats.epoch:3d}  loss {stats.mean_loss:.4f}  recall@1 {stats.train_recall1:.3f}", flush=True)

    params, vocab, log = train(records, hp, args.seed, log_fn=show)
    save_model(args.out, params, vocab, {"seed": args.seed, "n_records": len(records)})
    log_path = args.log or str(args.out) + ".log.csv"
    log.write_csv(log_path)
    _write_manifest(args.out, args, {"hparams": hp.to_dict(), "training_log": log_path})
    return EXIT_OK


def _format_entry(rank, entry, ast) -> str:
    leaf = ast.leaves[entry.op.leaf_index]
    return (f"{rank} {entry.probability:.6f} {entry.op.operator.value} {entry.op.token} "
            f"@{leaf.line}:{leaf.col} {entry.op.path}")


def cmd_predict(args) -> int:
    from .lang import parse
    from .model import load_model, predict_ranked

    params, vocab = load_model(args.model)
    src = Path(args.method).read_text(encoding="utf-8")
    ast = parse(src)
    pred = predict_ranked(src, params, vocab, args.line if args.line else "method")
    lines = [_format_entry(r, e, ast) for r, e in enumerate(pred.entries[:args.top], start=1)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        _write_manifest(args.out, args)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .evaluation import EvalReport, dedup, format_table, reports_to_json

    records = read_records(args.data)
    if args.dedup:
        records = dedup(records)
    scenarios = ("method", "line") if args.scenario == "both" else (args.scenario,)
    if args.model:
        from .experiments import evaluate_model
        from .model import load_model

        params, vocab = load_model(args.model)
        reports = [EvalReport.from_ranks(evaluate_model(params, vocab, records, s, args.match_mode), s, "beep",
                                         args.match_mode) for s in scenarios]
    else:
        from .experiments import SYSTEMS, cross_validate

        systems = tuple(args.systems.split(",")) if args.systems else SYSTEMS
        unknown = [s for s in systems if s not in SYSTEMS]
        if unknown:
            raise UsageError(f"unknown systems {unknown}")
        reports = cross_validate(records, _hparams(args), args.folds, args.seed, scenarios, systems,
                                 args.match_mode, args.forest_trees, args.forest_depth,
                                 log_fn=(None if args.quiet else
                                         lambda f, _: print(f"fold {f} done", file=sys.stderr, flush=True)))
    payload = reports_to_json(reports)
    if args.out:
        Path(args.out).write_text(payload)
        Path(str(args.out) + ".txt").write_text(format_table(reports))
        _write_manifest(args.out, args)
    sys.stdout.write(payload if args.format == "json" else format_table(reports))
    return EXIT_OK


def cmd_repair(args) -> int:
    from .repair import (CommandValidator, OracleValidator, correctness_ratio, generate_and_validate,
                         oracle_ranking, write_outcomes)

    def ranking(src, rec=None):
        if args.perfect_ranking:
            if rec is None:
                raise UsageError("--perfect-ranking needs records with oracles (--data)")
            return oracle_ranking(src, rec.oracle)
        if not args.model:
            raise UsageError("repair needs --model or --perfect-ranking")
        from .model import predict_ranked
        return predict_ranked(src, params, vocab)

    params = vocab = None
    if args.model:
        from .model import load_model
        params, vocab = load_model(args.model)
    outcomes = []
    if args.data:
        for rec in read_records(args.data):
            validator = CommandValidator(args.test_cmd) if args.test_cmd else OracleValidator(rec.fixed_src)
            out = generate_and_validate(rec.buggy_src, ranking(rec.buggy_src, rec), validator, args.width)
            out.record_id = rec.id
            outcomes.append(out)
    elif args.method:
        if not args.test_cmd:
            raise UsageError("--method needs --test-cmd")
        src = Path(args.method).read_text(encoding="utf-8")
        out = generate_and_validate(src, ranking(src), CommandValidator(args.test_cmd), args.width)
        out.record_id = Path(args.method).name
        outcomes.append(out)
    else:
        raise UsageError("repair needs --data or --method")
    if args.out:
        write_outcomes(args.out, outcomes)
        _write_manifest(args.out, args)
    plausible = [o for o in outcomes if o.status.value == "Plausible"]
    summary = {"n": len(outcomes), "plausible": len(plausible),
               "median_npc": statistics.median(o.npc for o in plausible) if plausible else None}
    try:
        summary["correctness_ratio"] = correctness_ratio(outcomes)
    except FixlocError:
        summary["correctness_ratio"] = "unassessed"
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    from .model.gradcheck import model_gradcheck

    flags = {name: True for name in ABLATION_FLAGS if getattr(args, name, False)}
    errors = model_gradcheck(args.dims, args.seed, args.k, args.max_l, **flags)
    worst = max(errors.values())
    if args.verbose:
        for name, err in errors.items():
            print(f"{name:12s} {err:.3e}")
    print(f"max relative error {worst:.3e}")
    return EXIT_OK if worst < args.tolerance else EXIT_DOMAIN


def cmd_effort_stats(args) -> int:
    from .evaluation import effort_stats

    stats = effort_stats(read_records(args.data))
    text = json.dumps(stats, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        _write_manifest(args.out, args)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> ArgParser:
    parser = ArgParser(prog="fixloc", description="Fix localization over operation paths.")
    parser.add_argument("--version", action="version", version=f"fixloc {__version__}")
    parser.add_argument("--config", help="flat key=value file; command-line flags override it")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgParser)

    p = sub.add_parser("extract", help="turn (buggy, fixed) pairs into PatchRecord JSONL")
    p.add_argument("--pairs", help="JSONL with buggy_src and fixed_src (and optional id)")
    p.add_argument("--buggy")
    p.add_argument("--fixed")
    p.add_argument("--id", default="pair-00000")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("gen-corpus", help="generate a mutant corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-seeds", dest="n_seeds", type=int, default=1000)
    p.add_argument("--seed-methods", dest="seed_methods", help="file of methods separated by blank lines")
    p.add_argument("--mix", help="e.g. OperatorSwap=2,BooleanFlip=1 (default: all kinds equally)")
    p.add_argument("--paired", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true")
    _add_hparam_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="rank operation paths of one method")
    p.add_argument("--model", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--line", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="evaluate a model, or cross-validate all systems")
    p.add_argument("--data", required=True)
    p.add_argument("--model")
    p.add_argument("--scenario", choices=("method", "line", "both"), default="method")
    p.add_argument("--match-mode", dest="match_mode", choices=("token_only", "token_and_operator"),
                   default="token_only")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--systems", help="comma list of beep,statistical,forest")
    p.add_argument("--forest-trees", dest="forest_trees", type=int, default=100)
    p.add_argument("--forest-depth", dest="forest_depth", type=int, default=8)
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--out")
    _add_hparam_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("repair", help="generate-and-validate repair")
    p.add_argument("--data", help="PatchRecord JSONL; validated against each record's fixed_src")
    p.add_argument("--method", help="single method file, validated with --test-cmd")
    p.add_argument("--model")
    p.add_argument("--perfect-ranking", dest="perfect_ranking", action="store_true")
    p.add_argument("--test-cmd", dest="test_cmd", help="command with a {patched} placeholder; exit 0 passes")
    p.add_argument("--width", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("gradcheck", help="finite-difference check of the full model")
    p.add_argument("--dims", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--max-l", dest="max_l", type=int, default=6)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--verbose", action="store_true")
    for name in ABLATION_FLAGS:
        p.add_argument("--" + name.replace("_", "-"), dest=name, action="store_true")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("effort-stats", help="token counts per buggy method and line")
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_effort_stats)
    return parser


def read_config(path) -> dict[str, str]:
    values = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: ArgParser, argv: list[str]) -> None:
    """Turn config-file entries into defaults of the chosen subcommand, so flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    config = read_config(known.config)
    command = next((a for a in argv if not a.startswith("-") and a in _subparsers(parser)), None)
    if command is None:
        return
    sub = _subparsers(parser)[command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        action = actions.get(key)
        if action is None or key == "help":
            raise UsageError(f"unknown config key {key!r} for {command}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = action.type(value) if action.type else value
        action.required = False
    sub.set_defaults(**defaults)


def _subparsers(parser) -> dict:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (FixlocError, MiniSyntaxError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


run = main

if __name__ == "__main__":
    sys.exit(main())

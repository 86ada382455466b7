"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .annotate import Annotator
from .demo import WINDOW as DEMO_WINDOW
from .demo import demo_dir
from .errors import DataError
from .evaluation import evaluate_lexicon
from .lexicon import demo_paths, load_lexicon
from .pipeline import STAGES, RunConfig, run_pipeline, verify_manifest
from .segment import SegmentationDict
from .stats import DEFAULT_SEED

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

_DEFAULTS = {"min_abusive": 3, "min_topic_abusive": 50, "k": 8, "seed": DEFAULT_SEED,
             "exclude_handles": "", "out": "out", "workers": 1}
_PATH_KEYS = ("tweets", "roster", "accounts", "abuse_lexicon", "topic_lexicon", "wordlist")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _data_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("inputs")
    g.add_argument("--config", help="JSON file of option values; flags override it")
    g.add_argument("--demo", action="store_true",
                   help="fill unset inputs from the bundled synthetic corpus and lexicon")
    g.add_argument("--tweets", help="line-delimited JSON tweet archive")
    g.add_argument("--accounts", help="account statistics CSV")
    g.add_argument("--roster", help="politician roster CSV")
    g.add_argument("--abuse-lexicon", help="abuse terms: surface,category")
    g.add_argument("--topic-lexicon", help="topic terms: surface,topic[,subtopic]")
    g.add_argument("--wordlist", help="hashtag segmentation word list (default: bundled)")
    g.add_argument("--from", dest="window_start", help="collection window start (ISO-8601)")
    g.add_argument("--to", dest="window_end", help="collection window end (ISO-8601)")
    o = p.add_argument_group("analysis")
    o.add_argument("--min-abusive", type=int, help="abusive replies needed to profile an account (3)")
    o.add_argument("--min-topic-abusive", type=int, help="abusive replies for an unflagged topic rate (50)")
    o.add_argument("--k", type=int, help="number of k-means clusters (8)")
    o.add_argument("--seed", type=int, help=f"random seed ({DEFAULT_SEED})")
    o.add_argument("--exclude-handles",
                   help="comma-separated handles or names left out of the outlier-trimmed tests")
    o.add_argument("--year", help="period label for the rise report (default: window start year)")
    o.add_argument("--workers", type=int, help="annotation worker processes (1)")
    o.add_argument("--out", help="output directory (out)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpabuse", description="Abusive replies to politicians: corpus analytics.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "ingest": "load and validate the corpus",
        "annotate": "flag abusive tweets and tag topics",
        "profile": "per-politician abuse profiles and group tests",
        "abusers": "targetedness groups and account comparisons",
        "topics": "abusive replies per topic mention",
        "cluster": "k-means over abusive accounts' topic vectors",
        "run": "every stage",
    }
    for name, text in helps.items():
        _data_flags(sub.add_parser(name, help=text, description=text))
    ev = sub.add_parser("eval", help="score the lexicon on a labelled corpus")
    ev.add_argument("labeled", help="CSV with label/Insult and text/Comment columns")
    ev.add_argument("--abuse-lexicon")
    ev.add_argument("--wordlist")
    ev.add_argument("--demo", action="store_true", help="use the bundled demo lexicon")
    ev.add_argument("--out", help="also write eval.json here")
    rep = sub.add_parser("report", help="check an output directory against its manifest")
    rep.add_argument("--out", default="out")
    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise DataError(f"config {path} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_cfg = _load_config(args.config)
    merged: dict = {}
    keys = set(_PATH_KEYS) | set(_DEFAULTS) | {"window_start", "window_end", "year"}
    for key in keys:
        value = getattr(args, key, None)
        if value is None:
            value = file_cfg.get(key)
        merged[key] = value
    if args.demo or file_cfg.get("demo"):
        d = demo_dir()
        abuse, topics = demo_paths()
        for key, path in (("tweets", d / "tweets.jsonl"), ("roster", d / "roster.csv"),
                          ("accounts", d / "accounts.csv"), ("abuse_lexicon", abuse),
                          ("topic_lexicon", topics)):
            merged[key] = merged[key] or str(path)
        merged["window_start"] = merged["window_start"] or DEMO_WINDOW[0]
        merged["window_end"] = merged["window_end"] or DEMO_WINDOW[1]
    for key, default in _DEFAULTS.items():
        if merged[key] is None:
            merged[key] = default
    missing = [f"--{k.replace('_', '-')}" for k in ("tweets", "roster") if not merged[k]]
    if not merged["window_start"] or not merged["window_end"]:
        missing.append("--from/--to")
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")
    excl = merged["exclude_handles"]
    if isinstance(excl, str):
        excl = [h for h in excl.split(",") if h.strip()]
    return RunConfig(
        tweets=Path(merged["tweets"]),
        roster=Path(merged["roster"]),
        accounts=Path(merged["accounts"]) if merged["accounts"] else None,
        abuse_lexicon=Path(merged["abuse_lexicon"]) if merged["abuse_lexicon"] else None,
        topic_lexicon=Path(merged["topic_lexicon"]) if merged["topic_lexicon"] else None,
        wordlist=Path(merged["wordlist"]) if merged["wordlist"] else None,
        window_start=str(merged["window_start"]),
        window_end=str(merged["window_end"]),
        min_abusive=int(merged["min_abusive"]),
        min_topic_abusive=int(merged["min_topic_abusive"]),
        k=int(merged["k"]),
        seed=int(merged["seed"]),
        exclude_handles=tuple(h.strip() for h in excl),
        out=Path(merged["out"]),
        year=merged["year"],
        workers=int(merged["workers"]),
    )


def cmd_eval(args: argparse.Namespace) -> int:
    abuse = args.abuse_lexicon or (str(demo_paths()[0]) if args.demo else None)
    if not abuse:
        raise UsageError("eval needs --abuse-lexicon (or --demo)")
    wordlist = SegmentationDict.from_file(args.wordlist) if args.wordlist else None
    result = evaluate_lexicon(Annotator(load_lexicon(abuse), wordlist), args.labeled)
    text = json.dumps(result.as_dict(), indent=2, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "eval.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    bad = verify_manifest(Path(args.out))
    manifest = json.loads((Path(args.out) / "manifest.json").read_text(encoding="utf-8"))
    for name in sorted(manifest["files"]):
        print(f"{'MISMATCH' if name in bad else 'ok':8s} {name}")
    if bad:
        raise DataError(f"{len(bad)} report file(s) do not match the manifest")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "report":
            return cmd_report(args)
        config = config_from_args(args)
        stages = STAGES if args.command == "run" else (args.command,)
        manifest = run_pipeline(config, stages)
        for name in manifest["files"]:
            print(config.out / name)
        return EXIT_OK
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mpabuse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"mpabuse: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Commands: ``validate`` (parse + consistency check), ``enumerate`` (world
count at one step), ``analyze`` (full pipeline, JSON or CSV report).

Exit codes: 0 success, 1 parse/usage error (including refused enumeration
bounds), 2 inconsistent story, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    BoundExceededError,
    ChannelError,
    InconsistentStepError,
    ParseError,
    StoryworldsError,
)
from .report import config_from_file, merge_config, render_report, run_analysis
from .story import formula_to_str, parse_story
from .worlds import enumerate_models

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INCONSISTENT = 2
EXIT_IO = 3


def _read_story(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def cmd_validate(args: argparse.Namespace) -> int:
    text = _read_story(args.story)
    timeline = parse_story(text, bound=args.bound)
    print(
        f"OK: {len(timeline.steps)} step(s), "
        f"{timeline.universe.atom_count} ground atom(s), "
        f"{len(timeline.steps[-1])} proposition(s) at the final step"
    )
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    text = _read_story(args.story)
    timeline = parse_story(text, bound=args.bound)
    if not 0 <= args.t < len(timeline.steps):
        print(
            f"error: step t={args.t} out of range 0..{len(timeline.steps) - 1}",
            file=sys.stderr,
        )
        return EXIT_PARSE
    models = enumerate_models(timeline.steps[args.t], bound=args.bound)
    print(len(models))
    if args.list:
        for world in models:
            print("  " + " ".join(formula_to_str(l) for l in world.literals()))
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    base = config_from_file(args.config) if args.config else None
    overrides = {
        "story": args.story,
        "channel": args.channel,
        "truth": args.truth,
        "sample_k": args.sample_k,
        "seed": args.seed,
        "theta": args.theta,
        "epsilon": args.epsilon,
        "bound": args.bound,
        "format": args.format,
        "out": args.out,
    }
    config = merge_config(base, overrides)
    story_text = _read_story(config.story)
    report = run_analysis(config, story_text)
    payload = render_report(report, config.format)
    if config.out:
        Path(config.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storyworlds",
        description="Possible-worlds analysis of story timelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="parse and consistency-check a story file")
    p_validate.add_argument("story")
    p_validate.add_argument("--bound", type=int, default=None)
    p_validate.set_defaults(fn=cmd_validate)

    p_enum = sub.add_parser("enumerate", help="count the worlds consistent with one step")
    p_enum.add_argument("story")
    p_enum.add_argument("-t", type=int, default=0, help="time step (default 0)")
    p_enum.add_argument("--list", action="store_true", help="also print each world")
    p_enum.add_argument("--bound", type=int, default=None)
    p_enum.set_defaults(fn=cmd_enumerate)

    p_an = sub.add_parser("analyze", help="run the full pipeline and write a report")
    p_an.add_argument("story", nargs="?", default=None)
    p_an.add_argument("--config", help="JSON config file with the same keys as the flags")
    p_an.add_argument("--channel", default=None, help="identity | drop(f;...) | corrupt(f;...) | rename(a->b,...)")
    p_an.add_argument("--truth", default=None, help="'first-canonical' or 'lit; !lit; ...'")
    p_an.add_argument("--sample-k", dest="sample_k", type=int, default=None)
    p_an.add_argument("--seed", type=int, default=None)
    p_an.add_argument("--theta", default=None, help="kernel threshold (number or p/q)")
    p_an.add_argument("--epsilon", type=float, default=None, help="satellite relevance threshold")
    p_an.add_argument("--bound", type=int, default=None)
    p_an.add_argument("--format", choices=("json", "csv"), default=None)
    p_an.add_argument("--out", default=None, help="report path (default: stdout)")
    p_an.set_defaults(fn=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except InconsistentStepError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (ParseError, BoundExceededError, ChannelError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except StoryworldsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())

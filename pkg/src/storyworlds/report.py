"""Run configuration and the end-to-end analysis report.

A report is a plain JSON-ready dict assembled deterministically: identical
configurations (including the seed) produce byte-identical output. Exact
rationals are carried as num/den pairs alongside a float rendering so nothing
downstream depends on float formatting.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .conveyance import (
    accuracy_report,
    compress,
    evolve,
    parse_channel_spec,
    reconstruct,
    transmit,
)
from .errors import MetricError
from .filters import extend_to_ultrafilter, ultraproduct
from .logic import DEFAULT_ATOM_BOUND, Atom, Not, Universe, World
from .metrics import (
    Question,
    classify_satellites,
    derive_world_questions,
    detect_kernels,
    mean_question_entropy,
    transitional_coherence,
    world_coherence,
)
from .story import Timeline, delta, formula_to_str, parse_formula, parse_story
from .worlds import agreement_check, enumerate_models, intersect, sample_worlds

#: Final world sets larger than this skip the ultrafilter-extension
#: reconciliation check (extension is exponential in the base size).
RECONCILIATION_LIMIT = 10

CSV_COLUMNS = (
    "step",
    "world_count",
    "belief_count",
    "changed_fraction_num",
    "changed_fraction_den",
    "changed_fraction",
    "is_kernel",
    "world_coherence_num",
    "world_coherence_den",
    "world_coherence",
)


@dataclass(frozen=True)
class RunConfig:
    """Everything an analysis run depends on."""

    story: str
    channel: str = "identity"
    truth: str = "first-canonical"
    sample_k: int = 16
    seed: int = 0
    theta: Fraction = Fraction(1, 2)
    epsilon: float = 0.0
    bound: int = DEFAULT_ATOM_BOUND
    format: str = "json"
    out: str | None = None
    questions: tuple[Mapping[str, Any], ...] = ()

    def __post_init__(self):
        if self.sample_k < 1:
            raise ValueError("sample_k must be positive")
        if self.bound < 1:
            raise ValueError("bound must be positive")
        if not 0 <= self.theta <= 1:
            raise ValueError("theta must lie in [0, 1]")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be 'json' or 'csv'")


def config_from_file(path: str | Path) -> RunConfig:
    """Load a RunConfig from a JSON file with the same keys as the flags."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a JSON object")
    return merge_config(None, raw)


def merge_config(base: RunConfig | None, overrides: Mapping[str, Any]) -> RunConfig:
    """Apply overrides (flag values or config-file keys) over a base config."""
    known = {
        "story",
        "channel",
        "truth",
        "sample_k",
        "seed",
        "theta",
        "epsilon",
        "bound",
        "format",
        "out",
        "questions",
    }
    unknown = set(overrides) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    values: dict[str, Any] = {}
    if base is not None:
        values.update(
            story=base.story,
            channel=base.channel,
            truth=base.truth,
            sample_k=base.sample_k,
            seed=base.seed,
            theta=base.theta,
            epsilon=base.epsilon,
            bound=base.bound,
            format=base.format,
            out=base.out,
            questions=base.questions,
        )
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "theta":
            value = parse_ratio(value)
        elif key == "epsilon":
            value = float(value)
        elif key in ("sample_k", "seed", "bound"):
            value = int(value)
        elif key == "questions":
            value = tuple(value)
        values[key] = value
    if "story" not in values:
        raise ValueError("no story file given (positional argument or config key)")
    return RunConfig(**values)


def parse_ratio(value: Any) -> Fraction:
    """Parse a threshold: a number, a decimal string, or a 'p/q' string."""
    if isinstance(value, str) and "/" in value:
        num, den = value.split("/", 1)
        return Fraction(int(num), int(den))
    if isinstance(value, float):
        # read floats decimally (0.3 -> 3/10), not as binary expansions
        return Fraction(str(value))
    return Fraction(value)


def rational(fr: Fraction) -> dict[str, Any]:
    return {"num": fr.numerator, "den": fr.denominator, "value": float(fr)}


def resolve_truth_world(spec: str, timeline: Timeline, bound: int) -> World:
    """Pick the designated ground-truth world.

    ``first-canonical`` takes the lowest-mask model of the final fabula.
    Otherwise the spec is a semicolon-separated list of ground literals;
    listed atoms get the stated truth value, unlisted atoms default to false,
    and contradictory listings are rejected.
    """
    universe = timeline.universe
    if spec.strip() == "first-canonical":
        models = enumerate_models(timeline.steps[-1], bound=bound)
        return World(universe, models.masks[0])
    assignment: dict[int, bool] = {}
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        f = parse_formula(part, universe)
        if isinstance(f, Not) and isinstance(f.operand, Atom):
            atom, value = f.operand, False
        elif isinstance(f, Atom):
            atom, value = f, True
        else:
            raise ValueError(f"truth spec entry '{part}' is not a ground literal")
        idx = universe.atom_index(atom)
        if assignment.get(idx, value) != value:
            raise ValueError(f"truth spec contradicts itself on {formula_to_str(atom)}")
        assignment[idx] = value
    mask = 0
    for idx, value in assignment.items():
        if value:
            mask |= 1 << idx
    return World(universe, mask)


def _config_questions(
    specs: Sequence[Mapping[str, Any]], universe: Universe
) -> tuple[Question, ...]:
    out = []
    for spec in specs:
        if "if" not in spec or "then" not in spec:
            raise ValueError("each question needs 'if' and 'then' formulas")
        answers = spec.get("answers")
        if answers is not None:
            answers = (bool(answers[0]), bool(answers[1]))
        out.append(
            Question(
                parse_formula(str(spec["if"]), universe),
                parse_formula(str(spec["then"]), universe),
                answers,
            )
        )
    return tuple(out)


def run_analysis(config: RunConfig, story_text: str | None = None) -> dict[str, Any]:
    """Execute the full pipeline and return the JSON-ready report dict.

    ``story_text`` sidesteps file I/O when the caller already read the story.
    Raises instead of writing partial output; warnings (agreement violations
    on contraction steps, skipped checks, absent channel targets) are report
    fields, not failures.
    """
    if story_text is None:
        story_text = Path(config.story).read_text(encoding="utf-8")
    timeline = parse_story(story_text, bound=config.bound)
    universe = timeline.universe
    channel = parse_channel_spec(config.channel, universe)
    warnings: list[str] = []

    states = evolve(timeline, channel, bound=config.bound, warnings=warnings)
    truth = resolve_truth_world(config.truth, timeline, config.bound)

    config_questions = _config_questions(config.questions, universe)

    steps_out = []
    for t, state in enumerate(states):
        sample = sample_worlds(state.worlds, config.sample_k, config.seed)
        questions = config_questions or derive_world_questions(sample)
        if questions:
            coherence = rational(world_coherence(sample, questions))
            entropy = mean_question_entropy(sample, questions)
        else:
            coherence = None
            entropy = None
        steps_out.append(
            {
                "t": t,
                "world_count": len(state.worlds),
                "belief_count": len(state.beliefs),
                "sample_size": len(sample),
                "world_coherence": coherence,
                "world_coherence_mean_entropy": entropy,
                "world_coherence_questions": len(questions),
            }
        )
        if t >= 1:
            edit = delta(states[t - 1].fabula, state.fabula)
            shared = intersect(states[t - 1].worlds, state.worlds)
            if len(shared) and not agreement_check(shared, edit.additions):
                warnings.append(
                    f"step t={t}: shared worlds disagree with the step's additions "
                    "(contraction broke the expansion property)"
                )

    if len(states) >= 2:
        kernels = detect_kernels(states, config.theta)
        kernels = classify_satellites(states, kernels, config.epsilon)
    else:
        kernels = None
        warnings.append("kernel detection skipped: timeline has a single step")

    for t, step_row in enumerate(steps_out):
        if kernels is not None:
            ks = kernels.steps[t]
            step_row["changed_fraction"] = rational(ks.changed_fraction)
            step_row["is_kernel"] = ks.is_kernel
        else:
            step_row["changed_fraction"] = rational(Fraction(0))
            step_row["is_kernel"] = False

    # The narrator compresses their own vocabulary; rename targets are the
    # reader-side wire names and would collide with their renamed sources.
    rename_targets = set(channel.rename_map().values())
    narrator_vocab = (
        (lambda a: a.relation not in rename_targets) if rename_targets else None
    )
    reader_rt = reconstruct(
        transmit(compress(truth, narrator_vocab), channel, warnings), config.bound
    )
    correspondence = channel.rename_map() or None
    conv = accuracy_report(truth, reader_rt, correspondence)

    etc_rows = []
    if kernels is not None:
        for k in kernels.kernels:
            sample_then = sample_worlds(
                states[k - 1].worlds, config.sample_k, config.seed
            )
            row: dict[str, Any] = {"kernel_step": k, "t_then": k - 1, "t_now": k}
            try:
                value = transitional_coherence(
                    sample_then,
                    truth,
                    kernels,
                    t_then=k - 1,
                    t_now=k,
                    states=states,
                )
                row["value"] = rational(value)
            except MetricError as e:
                row["value"] = None
                warnings.append(f"transitional coherence at kernel t={k} skipped: {e}")
            etc_rows.append(row)

    satellites = [
        {
            "kernel_step": link.kernel_step,
            "satellite_step": link.satellite_step,
            "mean_relevance": link.mean_relevance,
            "question_count": link.question_count,
        }
        for link in (kernels.satellites if kernels else ())
    ]

    final = states[-1]
    if len(final.worlds) <= RECONCILIATION_LIMIT:
        up = ultraproduct(extend_to_ultrafilter(final.filter))
        inside = up in final.worlds
        reconciliation = {
            "checked": True,
            "in_final_worlds": inside,
            "world": [formula_to_str(l) for l in up.literals()],
        }
        if not inside:
            warnings.append("reconciled (ultraproduct) world falls outside the final world set")
    else:
        reconciliation = {
            "checked": False,
            "in_final_worlds": None,
            "world": None,
        }
        warnings.append(
            f"reconciliation check skipped: {len(final.worlds)} worlds exceed "
            f"the {RECONCILIATION_LIMIT}-world extension limit"
        )

    return {
        "config": {
            "story": str(config.story),
            "channel": config.channel,
            "truth": config.truth,
            "sample_k": config.sample_k,
            "seed": config.seed,
            "theta": rational(config.theta),
            "epsilon": config.epsilon,
            "bound": config.bound,
            "format": config.format,
        },
        "universe": {
            "sorts": {k: list(v) for k, v in universe.sorts.items()},
            "relations": {k: list(v) for k, v in universe.relations.items()},
            "atom_count": universe.atom_count,
        },
        "truth_world": [formula_to_str(l) for l in truth.literals()],
        "steps": steps_out,
        "conveyance": {
            "matched": conv.matched,
            "mismatched": conv.mismatched,
            "undetermined": conv.undetermined,
            "accuracy": rational(conv.accuracy),
            "commutes": conv.commutes,
            "mismatching_atoms": [formula_to_str(a) for a in conv.mismatching_atoms],
        },
        "transitional_coherence": etc_rows,
        "satellites": satellites,
        "reconciliation": reconciliation,
        "warnings": warnings,
    }


def render_json(report: Mapping[str, Any]) -> bytes:
    return (
        json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    ).encode("utf-8")


def render_csv(report: Mapping[str, Any]) -> bytes:
    """Per-step table with a fixed, documented column set.

    Global metrics (conveyance, transitional coherence, satellites) are only
    available in the JSON format.
    """
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report["steps"]:
        cf = row["changed_fraction"]
        wc = row["world_coherence"]
        writer.writerow(
            [
                row["t"],
                row["world_count"],
                row["belief_count"],
                cf["num"],
                cf["den"],
                cf["value"],
                str(row["is_kernel"]).lower(),
                wc["num"] if wc else "",
                wc["den"] if wc else "",
                wc["value"] if wc else "",
            ]
        )
    return buf.getvalue().encode("utf-8")


def render_report(report: Mapping[str, Any], fmt: str) -> bytes:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown report format '{fmt}'")

"""Command-line surface: ingest, gen-candidates, render, eval, loss-check.

Exit codes: 0 success, 1 validation failures present, 2 I/O or config error.
All randomness flows from one recorded seed, so every subcommand is
byte-reproducible for identical inputs and configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import confuse, corpus, evaluation, prefloss, semantics, syntax, template

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2

FD_TOLERANCE = 1e-6


class ConfigError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    negatives_per_sample: int = 6
    k_aspect: int = 3
    k_opinion: int = 3
    k_category: int = 3
    k_polarity_pair: int = 1
    seed: int = 0
    beta: float = 0.05
    lam: float = 0.5
    polarity_words: dict = field(default_factory=dict)
    implicit_word: str | None = None

    def __post_init__(self):
        if self.negatives_per_sample < 4:
            raise ConfigError("negatives_per_sample must be >= 4")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError("lambda must lie in [0, 1]")

    def generation_config(self) -> confuse.GenerationConfig:
        return confuse.GenerationConfig(
            k_aspect=self.k_aspect,
            k_opinion=self.k_opinion,
            k_category=self.k_category,
            k_polarity_pair=self.k_polarity_pair,
            negatives_per_sample=self.negatives_per_sample,
            seed=self.seed,
        )

    def mapping(self) -> template.ElementMapping:
        base = dict(template.DEFAULT_MAPPING.polarity_words)
        base.update(self.polarity_words)
        return template.ElementMapping(
            polarity_words=tuple(base.items()),
            implicit_word=self.implicit_word
            or template.DEFAULT_MAPPING.implicit_word,
        )


def load_config(path: str | None, overrides: dict) -> PipelineConfig:
    values: dict = {}
    if path is not None:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        mapping_table = raw.pop("mapping", {})
        values.update(raw)
        if "lambda" in values:
            values["lam"] = values.pop("lambda")
        if mapping_table:
            values["implicit_word"] = mapping_table.pop("implicit", None)
            values["polarity_words"] = mapping_table
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    known = set(PipelineConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return PipelineConfig(**values)


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"file not found: {path}")
    return p


def cmd_ingest(args: argparse.Namespace) -> int:
    path = _require_file(args.input)
    examples, issues = corpus.scan_dataset(path, format=args.format)
    for issue in issues:
        print(
            json.dumps({"line": issue.line_no, "error": issue.reason}),
            file=sys.stderr,
        )
    if issues and not args.lenient:
        print(
            f"error: {len(issues)} malformed records (use --lenient to skip them)",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    if args.output:
        corpus.write_dataset(args.output, examples)
    n_sentences, n_quads = corpus.stats(examples)
    print(
        json.dumps(
            {
                "sentences": n_sentences,
                "quads": n_quads,
                "skipped": len(issues),
            }
        )
    )
    return EXIT_OK


def cmd_gen_candidates(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    dataset_path = _require_file(args.input)
    parse_path = _require_file(args.parses)
    emb_path = _require_file(args.embeddings)
    examples = corpus.load_dataset(dataset_path, format=args.format)
    trees = syntax.load_parse_file(parse_path)
    if len(trees) != len(examples):
        raise ConfigError(
            f"parse file has {len(trees)} trees for {len(examples)} sentences"
        )
    emb = semantics.load_embeddings(emb_path)
    if args.categories:
        lines = Path(args.categories).read_text(encoding="utf-8").splitlines()
        categories = corpus.CategoryList(
            tuple(l.strip() for l in lines if l.strip())
        )
        _, polarities = corpus.vocab_from_examples(examples)
    else:
        categories, polarities = corpus.vocab_from_examples(examples)

    gen_cfg = cfg.generation_config()
    mapping = cfg.mapping()
    skipped = 0
    written = 0
    with open(args.output, "w", encoding="utf-8") as out:
        for example, result in confuse.generate_samples(
            examples, trees, emb, categories, polarities, gen_cfg, mapping
        ):
            if isinstance(result, confuse.ComposeError):
                skipped += 1
                print(
                    json.dumps(
                        {"id": example.sentence.id, "error": str(result)}
                    ),
                    file=sys.stderr,
                )
                if args.strict:
                    return EXIT_VALIDATION
                continue
            record = result.to_dict()
            record["seed"] = gen_cfg.seed
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
            written += 1
    print(json.dumps({"samples": written, "skipped": skipped, "seed": gen_cfg.seed}))
    return EXIT_VALIDATION if skipped else EXIT_OK


def cmd_render(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    path = _require_file(args.input)
    examples = corpus.load_dataset(path, format=args.format)
    mapping = cfg.mapping()
    with open(args.output, "w", encoding="utf-8") as out:
        for ex in examples:
            quads = ex.surface_quads()
            if args.style == "marker":
                out.write(template.render_marker_style(quads) + "\n")
            else:
                out.write(template.render(quads, mapping) + "\n")
    if args.prompts:
        with open(args.prompts, "w", encoding="utf-8") as out:
            for ex in examples:
                out.write(json.dumps(template.build_prompt(ex.sentence)) + "\n")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    gold_path = _require_file(args.gold)
    pred_path = _require_file(args.predictions)
    examples = corpus.load_dataset(gold_path, format=args.format)
    pred_lines = pred_path.read_text(encoding="utf-8").splitlines()
    if len(pred_lines) != len(examples):
        raise ConfigError(
            f"predictions have {len(pred_lines)} lines but gold has "
            f"{len(examples)} sentences"
        )
    mapping = cfg.mapping()
    pred_map: dict[str, list[corpus.SurfaceQuad]] = {}
    gold_map: dict[str, list[corpus.SurfaceQuad]] = {}
    flags: list[bool] = []
    records: list[evaluation.ErrorRecord] = []
    malformed = 0
    for ex, line in zip(examples, pred_lines):
        report = template.parse_output(line, mapping)
        malformed += len(report.malformed)
        flags.extend(report.flags())
        key = ex.sentence.id
        pred_map[key] = report.quads()
        gold_map[key] = list(ex.surface_quads())
        records.extend(
            evaluation.classify_errors(
                pred_map[key], gold_map[key], normalize=not args.strict_match
            )
        )
    match = evaluation.score(pred_map, gold_map, normalize=not args.strict_match)
    result = {
        "precision": match.precision,
        "recall": match.recall,
        "f1": match.f1,
        "tp": match.tp,
        "pred_count": match.pred_count,
        "gold_count": match.gold_count,
        "coherence_rate": evaluation.coherence_rate(flags),
        "error_histogram": evaluation.error_histogram(records),
        "malformed_groups": malformed,
    }
    text = json.dumps(result, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def _loss_check_row(row: dict, index: int, cfg: PipelineConfig) -> list[dict]:
    out = []
    kernel_names = (
        list(prefloss.KERNELS)
        if row.get("kernel", "all") == "all"
        else [row["kernel"]]
    )
    for name in kernel_names:
        if name not in prefloss.KERNELS:
            out.append(
                {
                    "row": index,
                    "kernel": name,
                    "verdict": "FAIL",
                    "reason": f"unknown kernel {name!r}",
                }
            )
            continue
        try:
            batch = prefloss.LossBatch(
                policy_logp=row["policy_logp"],
                ref_logp=row["ref_logp"],
                beta=row.get("beta", cfg.beta),
                lam=row.get("lambda", cfg.lam),
            )
            if name == "pairwise" and batch.size != 2:
                continue
            kernel = prefloss.KERNELS[name]
            result = kernel(batch)
            err = prefloss.gradient_max_rel_error(kernel, batch)
            out.append(
                {
                    "row": index,
                    "kernel": name,
                    "value": result.value,
                    "gradient": result.gradient.tolist(),
                    "fd_max_rel_err": err,
                    "verdict": "PASS" if err < FD_TOLERANCE else "FAIL",
                }
            )
        except (prefloss.BatchError, KeyError, TypeError, ValueError) as exc:
            out.append(
                {
                    "row": index,
                    "kernel": name,
                    "verdict": "FAIL",
                    "reason": str(exc) or exc.__class__.__name__,
                }
            )
    return out


def cmd_loss_check(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    path = _require_file(args.input)
    failures = 0
    sink = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        with open(path, encoding="utf-8") as fh:
            for index, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    verdicts = [
                        {"row": index, "verdict": "FAIL", "reason": f"bad JSON: {exc}"}
                    ]
                else:
                    verdicts = _loss_check_row(row, index, cfg)
                for v in verdicts:
                    if v["verdict"] == "FAIL":
                        failures += 1
                    sink.write(json.dumps(v) + "\n")
    finally:
        if sink is not sys.stdout:
            sink.close()
    return EXIT_VALIDATION if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadpref",
        description="Aspect sentiment quad data, loss, and evaluation pipeline",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file", default=None)
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument(
        "--n",
        dest="negatives_per_sample",
        type=int,
        default=None,
        help="negatives per listwise sample",
    )
    common.add_argument("--beta", type=float, default=None)
    common.add_argument("--lambda", dest="lam", type=float, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = add_parser("ingest", help="validate a dataset and emit canonical JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["jsonl", "legacy"], default="jsonl")
    p.add_argument("--output", default=None)
    p.add_argument("--lenient", action="store_true", help="skip malformed records")

    p = add_parser("gen-candidates", help="build the listwise preference dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["jsonl", "legacy"], default="jsonl")
    p.add_argument("--parses", required=True, help="bracketed trees, line-aligned")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--categories", default=None, help="category list, one per line")
    p.add_argument("--output", required=True)
    p.add_argument(
        "--strict", action="store_true", help="abort on the first composition failure"
    )

    p = add_parser("render", help="render gold outputs for a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["jsonl", "legacy"], default="jsonl")
    p.add_argument("--style", choices=["reasoning", "marker"], default="reasoning")
    p.add_argument("--output", required=True)
    p.add_argument("--prompts", default=None, help="also write prompts (JSON lines)")

    p = add_parser("eval", help="score predictions against gold quads")
    p.add_argument("--gold", required=True)
    p.add_argument("--format", choices=["jsonl", "legacy"], default="jsonl")
    p.add_argument("--predictions", required=True)
    p.add_argument("--output", default=None)
    p.add_argument(
        "--strict-match",
        action="store_true",
        help="byte-exact matching instead of case/whitespace-normalized",
    )

    p = add_parser("loss-check", help="verify loss kernels on batch rows")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(
            args.config,
            {
                "seed": args.seed,
                "negatives_per_sample": args.negatives_per_sample,
                "beta": args.beta,
                "lam": args.lam,
            },
        )
        if args.command == "ingest":
            return cmd_ingest(args)
        if args.command == "gen-candidates":
            return cmd_gen_candidates(args, cfg)
        if args.command == "render":
            return cmd_render(args, cfg)
        if args.command == "eval":
            return cmd_eval(args, cfg)
        if args.command == "loss-check":
            return cmd_loss_check(args, cfg)
        parser.error(f"unknown command {args.command!r}")
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        corpus.LoadError,
        syntax.TreeParseError,
        semantics.EmbeddingFormatError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

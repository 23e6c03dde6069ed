"""Command-line verification pipeline, corpus generation, and reporting.

Commands:
    verify --input spec.json [--stages ...] [--out report.json] [--seed N]
    corpus --max-n N --out DIR
    report FILES... [--csv out.csv]

Exit status: 0 all requested stages pass, 1 verification failure,
2 invalid input.  Report JSON files are deterministic for a fixed config,
seed and backend; per-stage wall times go to stderr only.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .berger import berger_certificate
from .canonical import (
    CanonicalPair,
    InvalidSpecError,
    build_canonical,
    pencil_from_json,
    pencil_to_json,
    validate_pair,
)
from .realize import verify_realization
from . import realize as realize_mod

ALL_STAGES = ("canonical", "berger", "realize", "probe")


@dataclass
class RunConfig:
    input: str
    stages: tuple = ALL_STAGES
    membership_tol: float = 1e-6
    rank_threshold: float = 1e-8
    out: str = ""
    seed: int = 0
    loop_side: float = 1e-2

    def __post_init__(self) -> None:
        if not self.stages:
            raise ValueError("stages must be nonempty")
        if self.membership_tol <= 0 or self.rank_threshold <= 0:
            raise ValueError("tolerances must be positive")


# -- verify ------------------------------------------------------------------

def _stage_canonical(pair: CanonicalPair) -> dict:
    rep = validate_pair(pair.g, pair.L)
    return {
        "n": pair.n,
        "layout": [
            {
                "lambda": str(eig.lam),
                "blocks": [[b.offset, b.size, b.sign] for b in eig.blocks],
            }
            for eig in pair.layout
        ],
        "failures": list(rep.failures),
        "passed": rep.ok,
    }


def _stage_probe(pair: CanonicalPair, qm, config: RunConfig) -> dict:
    from .probe import holonomy_span, standard_loops

    loops = standard_loops(pair.n, seed=config.seed, side=config.loop_side)
    report = holonomy_span(qm, pair, loops,
                           membership_tol=config.membership_tol,
                           rank_threshold=config.rank_threshold)
    doc = report.to_json()
    doc["seed"] = config.seed
    return doc


def cmd_verify(config: RunConfig) -> tuple:
    """Run the requested stages; returns (report dict, exit code)."""
    try:
        text = Path(config.input).read_text(encoding="utf-8")
        spec = pencil_from_json(text)
    except (OSError, InvalidSpecError) as exc:
        return {"error": str(exc)}, 2

    pair = build_canonical(spec)
    report = {
        "spec": pencil_to_json(spec),
        "config": {
            "stages": list(config.stages),
            "membership_tol": config.membership_tol,
            "rank_threshold": config.rank_threshold,
            "seed": config.seed,
        },
        "stages": {},
    }
    timings = []
    qm = None

    for stage in ALL_STAGES:
        if stage not in config.stages:
            continue
        started = time.perf_counter()
        if stage == "canonical":
            report["stages"]["canonical"] = _stage_canonical(pair)
        elif stage == "berger":
            report["stages"]["berger"] = berger_certificate(pair).to_json()
        elif stage == "realize":
            stage_report, qm, _ = verify_realization(pair)
            report["stages"]["realize"] = stage_report.to_json()
        elif stage == "probe":
            if qm is None:
                qm = realize_mod.lower_B(realize_mod.build_B(pair), pair.g)
            report["stages"]["probe"] = _stage_probe(pair, qm, config)
        timings.append((stage, time.perf_counter() - started))

    passed = all(s.get("passed", False) for s in report["stages"].values())
    report["verdict"] = "pass" if passed else "fail"
    for stage, dt in timings:
        print(f"[timing] {stage}: {dt:.3f}s", file=sys.stderr)
    return report, 0 if passed else 1


def _write_json_atomic(path: str, doc: dict) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


# -- corpus ------------------------------------------------------------------

def _partitions(n: int, smallest: int = 1):
    """Ascending integer partitions of n, deterministic order."""
    if n == 0:
        yield ()
        return
    for first in range(smallest, n + 1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def _sign_classes(partition: tuple) -> list:
    """Canonical sign vectors up to a simultaneous global flip.

    Within every run of equal sizes the signs are sorted + before -, so a
    class is described by the minus count per run; the global flip maps
    counts c to (run length - c) and the lexicographically smaller tuple
    is kept.
    """
    runs = [(size, len(list(group))) for size, group in itertools.groupby(partition)]
    classes = set()
    for counts in itertools.product(*[range(m + 1) for _, m in runs]):
        flipped = tuple(m - c for (_, m), c in zip(runs, counts))
        classes.add(min(counts, flipped))
    out = []
    for counts in sorted(classes):
        signs = []
        for (_, m), c in zip(runs, counts):
            signs.extend([1] * (m - c) + [-1] * c)
        out.append(tuple(signs))
    return out


def iter_corpus_specs(max_n: int) -> list:
    """Every nilpotent single-eigenvalue spec with 2 <= n <= max_n.

    Yields (name, spec document dict) pairs with deterministic names
    ``n{n}_p{sizes}_s{signs}``.
    """
    if not (2 <= max_n <= 8):
        raise ValueError("max_n must be between 2 and 8")
    out = []
    for n in range(2, max_n + 1):
        for partition in _partitions(n):
            for signs in _sign_classes(partition):
                name = "n{}_p{}_s{}".format(
                    n,
                    "-".join(str(s) for s in partition),
                    "".join("+" if s > 0 else "-" for s in signs),
                )
                doc = {
                    "eigenvalues": [{
                        "lambda": "0",
                        "blocks": [
                            {"size": size, "sign": sign}
                            for size, sign in zip(partition, signs)
                        ],
                    }]
                }
                out.append((name, doc))
    return out


def cmd_corpus(max_n: int, out_dir: str) -> list:
    outp = Path(out_dir)
    outp.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, doc in iter_corpus_specs(max_n):
        path = outp / f"{name}.json"
        _write_json_atomic(str(path), doc)
        paths.append(path)
    return paths


# -- report ------------------------------------------------------------------

def _spec_pattern(doc: dict) -> tuple:
    """(n, partition string, signs string) from a spec echo."""
    sizes = []
    signs = []
    for eig in doc.get("eigenvalues", []):
        for b in eig.get("blocks", []):
            sizes.append(str(b["size"]))
            signs.append("+" if b["sign"] > 0 else "-")
    n = sum(int(s) for s in sizes)
    return n, "-".join(sizes), "".join(signs)


def _report_row(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        n, partition, signs = _spec_pattern(doc.get("spec", {}))
        stages = doc.get("stages", {})
        berger = stages.get("berger", {})
        probe = stages.get("probe", {})
        return {
            "file": Path(path).name,
            "n": n,
            "partition": partition,
            "signs": signs,
            "dim_gL": berger.get("dim_gL", ""),
            "berger": _flag(berger),
            "realize": _flag(stages.get("realize", {})),
            "probe_rank": probe.get("span_rank", ""),
            "probe_residual": probe.get("max_membership_residual", ""),
            "verdict": doc.get("verdict", "fail"),
            "error": "",
        }
    except (OSError, json.JSONDecodeError) as exc:
        return {
            "file": Path(path).name, "n": "", "partition": "", "signs": "",
            "dim_gL": "", "berger": "", "realize": "", "probe_rank": "",
            "probe_residual": "", "verdict": "error", "error": str(exc),
        }


def _flag(stage: dict) -> str:
    if not stage:
        return "-"
    return "pass" if stage.get("passed") else "FAIL"


_COLUMNS = ("file", "n", "partition", "signs", "dim_gL", "berger",
            "realize", "probe_rank", "probe_residual", "verdict")


def cmd_report(paths, csv_out: str = "") -> tuple:
    rows = [_report_row(p) for p in paths]
    # failing and unreadable rows first, then stable ordering
    rows.sort(key=lambda r: (r["verdict"] == "pass", str(r["n"]),
                             r["partition"], r["signs"], r["file"]))
    lines = ["\t".join(_COLUMNS)]
    for r in rows:
        lines.append("\t".join(str(r[c]) for c in _COLUMNS))
    table = "\n".join(lines)
    if csv_out:
        with open(csv_out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_COLUMNS, extrasaction="ignore")
            writer.writeheader()
            writer.writerows(rows)
    bad = any(r["verdict"] != "pass" for r in rows)
    return table, 1 if bad else 0


# -- entry point ---------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holonomy",
        description="Verify centralizer holonomy algebras from Jordan block data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the verification pipeline on one spec")
    p_verify.add_argument("--input", required=True, help="pencil spec JSON file")
    p_verify.add_argument("--stages", default=",".join(ALL_STAGES),
                          help="comma list from: canonical,berger,realize,probe")
    p_verify.add_argument("--out", default="", help="write the report JSON here")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--membership-tol", type=float, default=1e-6)
    p_verify.add_argument("--rank-threshold", type=float, default=1e-8)

    p_corpus = sub.add_parser("corpus", help="emit the nilpotent spec corpus")
    p_corpus.add_argument("--max-n", type=int, required=True)
    p_corpus.add_argument("--out", required=True, help="output directory")

    p_report = sub.add_parser("report", help="summarize verify reports")
    p_report.add_argument("files", nargs="*")
    p_report.add_argument("--csv", default="")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "verify":
        stages = tuple(s.strip() for s in args.stages.split(",") if s.strip())
        unknown = [s for s in stages if s not in ALL_STAGES]
        if unknown or not stages:
            print(f"unknown stages: {','.join(unknown) or '(none)'}", file=sys.stderr)
            return 2
        config = RunConfig(input=args.input, stages=stages, out=args.out,
                           seed=args.seed, membership_tol=args.membership_tol,
                           rank_threshold=args.rank_threshold)
        report, code = cmd_verify(config)
        if args.out and "error" not in report:
            _write_json_atomic(args.out, report)
        print(json.dumps(report, indent=2, sort_keys=True))
        return code

    if args.command == "corpus":
        try:
            paths = cmd_corpus(args.max_n, args.out)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return 2
        for p in paths:
            print(p)
        return 0

    if args.command == "report":
        table, code = cmd_report(args.files, csv_out=args.csv)
        print(table)
        return code

    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: preprocess -> train/sweep -> analogy/neighbor analysis.

Commands: preprocess, train, sweep, eval-analogy, neighbors, export.
Training options come from a ``key = value`` config file, overridden by
flags; every command snapshots its effective configuration into a run
manifest next to its outputs. SCALEVEC_OUTPUT_ROOT sets the default
output root.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import fields as dc_fields
from pathlib import Path

import numpy as np

from . import __version__, analogy, corpus, embio, neighbors, sweep as sweep_mod
from .cbow.config import TrainConfig
from .cbow.train import train_embedding

VOCAB_FILE = "vocab.tsv"
TOKENS_FILE = "tokens.stv"


class CliError(Exception):
    pass


def _output_root() -> Path:
    return Path(os.environ.get("SCALEVEC_OUTPUT_ROOT", "."))


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_run_manifest(out_dir: Path, command: str, config: dict, inputs: dict, outputs: list[str]) -> None:
    doc = {
        "command": command,
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
    }
    (out_dir / "run_manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


# --- config handling ------------------------------------------------------

_CONFIG_TYPES = {f.name: f.type for f in dc_fields(TrainConfig)}


def read_config_file(path: Path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values: dict = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise CliError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, raw.strip(), f"{path}:{lineno}")
    return values


def _coerce(key: str, raw: str, where: str):
    kind = _CONFIG_TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError as e:
        raise CliError(f"{where}: bad value for {key!r}: {raw!r}") from e


def build_config(args: argparse.Namespace) -> TrainConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config_file(Path(args.config)))
    for name in _CONFIG_TYPES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if "beta" not in values:
        raise CliError("beta is required: set it in the config file or with --beta")
    try:
        return TrainConfig(**values)
    except (TypeError, ValueError) as e:
        raise CliError(f"invalid configuration: {e}") from e


def add_config_flags(p: argparse.ArgumentParser, with_beta: bool = True) -> None:
    p.add_argument("--config", help="key = value config file")
    if with_beta:
        p.add_argument("--beta", type=int, help="maximal window half-width (required)")
    p.add_argument("--dim", type=int)
    p.add_argument("--negative", type=int)
    p.add_argument("--subsample-t", dest="subsample_t", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--alpha0", type=float)
    p.add_argument("--min-alpha-fraction", dest="min_alpha_fraction", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--context-mode", dest="context_mode", choices=["averaged", "pairwise"])
    p.add_argument("--backend", choices=["auto", "cython", "python"], default=None)


def parse_scales(spec: str) -> list[int]:
    """Parse a scale spec like '5', '1..100', or '1..3,10,20'."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = part.split("..")
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise CliError(f"malformed scale spec {part!r} (expected e.g. '1..100' or '5')")
    if not out:
        raise CliError("empty scale spec")
    if sorted(set(out)) != out:
        raise CliError(f"scales must be strictly increasing, got {out}")
    return out


def _load_corpus_dir(corpus_dir: Path):
    vpath = corpus_dir / VOCAB_FILE
    tpath = corpus_dir / TOKENS_FILE
    if not vpath.exists() or not tpath.exists():
        raise CliError(f"{corpus_dir} does not contain {VOCAB_FILE} and {TOKENS_FILE}")
    vocab = corpus.read_vocab(vpath)
    ids = corpus.read_token_ids(tpath)
    return vocab, ids, _sha256_file(tpath)


# --- commands -------------------------------------------------------------


def cmd_preprocess(args) -> int:
    inp = Path(args.input)
    if not inp.exists():
        raise CliError(f"input file {inp} does not exist")
    out = _output_root() / args.out
    out.mkdir(parents=True, exist_ok=True)
    stats = corpus.CleanStats()
    with open(inp, "rb") as f:
        vocab = corpus.build_vocab(corpus.stream_tokens(f, stats), min_count=args.min_count)
    with open(inp, "rb") as f:
        ids = corpus.encode(corpus.stream_tokens(f), vocab)
    corpus.write_vocab(vocab, out / VOCAB_FILE)
    corpus.write_token_ids(ids, out / TOKENS_FILE)
    _write_run_manifest(
        out,
        "preprocess",
        {"min_count": args.min_count},
        {"input": str(inp), "input_sha256": _sha256_file(inp), "bad_bytes": stats.bad_bytes},
        [VOCAB_FILE, TOKENS_FILE],
    )
    print(f"tokens retained: {len(ids)}")
    print(f"distinct words:  {len(vocab)}")
    if stats.bad_bytes:
        print(f"undecodable byte warnings: {stats.bad_bytes}", file=sys.stderr)
    return 0


def _progress_printer(every: int = 20):
    state = {"n": 0}

    def cb(info: dict) -> None:
        state["n"] += 1
        if state["n"] % every == 0:
            frac = info["position"] / info["total_positions"]
            print(
                f"\riter {info['iteration']} {100 * frac:5.1f}%  alpha={info['alpha']:.5f}"
                f"  loss={info['mean_loss']:.4f}",
                end="",
                file=sys.stderr,
            )

    return cb


def cmd_train(args) -> int:
    config = build_config(args)
    vocab, ids, fingerprint = _load_corpus_dir(Path(args.corpus))
    emb = train_embedding(
        ids,
        vocab,
        config,
        callback=_progress_printer() if args.progress else None,
        backend=args.backend,
        corpus_fingerprint=fingerprint,
    )
    if args.progress:
        print(file=sys.stderr)
    out = _output_root() / args.out
    out.parent.mkdir(parents=True, exist_ok=True)
    embio.save_embedding(emb, out)
    _write_run_manifest(
        out.parent,
        "train",
        config.to_dict(),
        {"corpus": str(args.corpus), "corpus_fingerprint": fingerprint},
        [out.name],
    )
    print(f"embedding written to {out} (final mean loss {emb.meta.get('final_loss')})")
    return 0


def cmd_sweep(args) -> int:
    config = build_config(args)
    scales = parse_scales(args.scales)
    vocab, ids, fingerprint = _load_corpus_dir(Path(args.corpus))
    out = _output_root() / args.out
    plan = sweep_mod.SweepPlan(
        scales=scales, replicas=args.replicas, base_config=config, out_dir=out
    )

    def cb(info: dict) -> None:
        print(f"cell beta={info['beta']} replica={info['replica']}: {info['status']}", file=sys.stderr)

    result = sweep_mod.run_sweep(
        plan, ids, vocab, callback=cb, backend=args.backend, corpus_fingerprint=fingerprint
    )
    _write_run_manifest(
        out,
        "sweep",
        {**config.to_dict(), "scales": scales, "replicas": args.replicas},
        {"corpus": str(args.corpus), "corpus_fingerprint": fingerprint},
        [sweep_mod.MANIFEST_NAME] + [c.path for c in result.completed_cells()],
    )
    failed = [c for c in result.cells.values() if c.status == "failed"]
    print(f"sweep complete: {len(result.completed_cells())} cells done, {len(failed)} failed")
    return 1 if failed else 0


def cmd_eval_analogy(args) -> int:
    qpath = Path(args.questions)
    if not qpath.exists():
        raise CliError(f"questions file {qpath} does not exist")
    suite = analogy.load_questions(qpath)
    result = sweep_mod.load_manifest(Path(args.sweep))
    curves, overall = analogy.accuracy_curves(result, suite, restrict_k=args.restrict_k)
    out = _output_root() / args.out
    out.mkdir(parents=True, exist_ok=True)
    analogy.write_accuracy_tsv(curves, overall, out / "analogy_accuracy.tsv")
    analogy.write_summary_tsv(curves, overall, out / "analogy_summary.tsv")
    _write_run_manifest(
        out,
        "eval-analogy",
        {"restrict_k": args.restrict_k},
        {"sweep": str(args.sweep), "questions": str(qpath), "relations": len(suite)},
        ["analogy_accuracy.tsv", "analogy_summary.tsv"],
    )
    for curve in [*curves, overall]:
        print(f"{curve.relation}: peak beta = {curve.peak_beta}")
    return 0


def cmd_neighbors(args) -> int:
    result = sweep_mod.load_manifest(Path(args.sweep))
    centers = [w.strip() for w in args.center.split(",") if w.strip()]
    if not centers:
        raise CliError("at least one --center word is required")
    n_list = sorted({int(x) for x in args.top_n.split(",")})
    out = _output_root() / args.out
    out.mkdir(parents=True, exist_ok=True)
    outputs: list[str] = []
    for center in centers:
        try:
            catalogs = {n: neighbors.build_catalog(center, result, n) for n in n_list}
        except KeyError as e:
            raise CliError(str(e)) from e
        curves = neighbors.similarity_curves(center, sorted(catalogs[n_list[0]].union), result)
        events = neighbors.detect_crossovers(curves)
        neighbors.write_curves_tsv(curves, out / f"curves_{center}.tsv")
        neighbors.write_crossovers_tsv(events, out / f"crossovers_{center}.tsv")
        outputs += [f"curves_{center}.tsv", f"crossovers_{center}.tsv"]
        for n, cat in catalogs.items():
            hist = neighbors.peak_histogram(cat, result)
            neighbors.write_catalog_tsv(cat, out / f"catalog_{center}_n{n}.tsv")
            neighbors.write_histogram_tsv(hist, out / f"histogram_{center}_n{n}.tsv")
            outputs += [f"catalog_{center}_n{n}.tsv", f"histogram_{center}_n{n}.tsv"]
    _write_run_manifest(
        out,
        "neighbors",
        {"centers": centers, "top_n": n_list},
        {"sweep": str(args.sweep)},
        outputs,
    )
    print(f"neighbor analysis written to {out}")
    return 0


def cmd_export(args) -> int:
    src, dst = Path(args.src), Path(args.dst)
    if not src.exists():
        raise CliError(f"input embedding {src} does not exist")
    if args.direction == "to-reference":
        embio.export_reference(embio.load_embedding(src), dst)
    else:
        embio.save_embedding(embio.import_reference(src), dst)
    print(f"wrote {dst}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="scalevec",
        description="Train CBOW embeddings across context-window sampling scales and analyze the results.",
    )
    p.add_argument("--version", action="version", version=f"scalevec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("preprocess", help="clean text, build the vocabulary, emit token ids")
    sp.add_argument("input")
    sp.add_argument("--out", required=True, help="output corpus directory")
    sp.add_argument("--min-count", type=int, default=5)
    sp.set_defaults(fn=cmd_preprocess)

    sp = sub.add_parser("train", help="train one embedding")
    sp.add_argument("--corpus", required=True, help="directory from 'preprocess'")
    sp.add_argument("--out", required=True, help="output embedding file")
    sp.add_argument("--progress", action="store_true")
    add_config_flags(sp)
    sp.set_defaults(fn=cmd_train)

    sp = sub.add_parser("sweep", help="train embeddings over a scale grid with replicas")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True, help="sweep output directory")
    sp.add_argument("--scales", required=True, help="e.g. '1..100' or '1,2,5,20'")
    sp.add_argument("--replicas", type=int, default=10)
    add_config_flags(sp)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("eval-analogy", help="analogy accuracy per relation across the sweep")
    sp.add_argument("--sweep", required=True, help="sweep output directory")
    sp.add_argument("--questions", required=True)
    sp.add_argument("--restrict-k", dest="restrict_k", type=int, default=30_000)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_eval_analogy)

    sp = sub.add_parser("neighbors", help="similarity curves, crossovers, catalogs, histograms")
    sp.add_argument("--sweep", required=True)
    sp.add_argument("--center", required=True, help="comma-separated center words")
    sp.add_argument("--top-n", dest="top_n", default="5,10,20,50,100")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_neighbors)

    sp = sub.add_parser("export", help="convert between native and reference embedding formats")
    sp.add_argument("direction", choices=["to-reference", "from-reference"])
    sp.add_argument("src")
    sp.add_argument("dst")
    sp.set_defaults(fn=cmd_export)

    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, corpus.EmptyCorpusError, corpus.CorpusFormatError,
            embio.EmbeddingIntegrityError, sweep_mod.SweepError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end and experiment runner.

Subcommands: ``cluster`` (one dataset in, labels and optional Newick out),
``experiment`` (replicated method comparison with a mean(sd) results
table), and ``simulate`` (export generated datasets).  Exit codes: 0 on
success, 1 for usage errors, 2 for data errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as catio
from .core import CategoricalMatrix, Clustering, DataError, hamming, relabel_dense
from .ensemble import EnsembleConfig, ensemble_cluster
from .hclust import Dendrogram, agglomerate, cut_with_outlier_deferral, to_newick
from .kmodes import en_kmodes, kmodes
from .metrics import classification_rate, format_results_table, replicate_summary
from .rng import child_seed
from .simgen import DESIGNS, SEQ_HIGH_NOISE, SEQ_LOW_NOISE, SeqDesign, gen_highdim, gen_lowdim, gen_noise
from .subspace import subspace_ensemble, wor_subspaces, wr_subspaces

HC_METHODS = {"HCSL": "SL", "HCAL": "AL", "HCCL": "CL"}
EN_METHODS = {"ENSL": "SL", "ENAL": "AL", "ENCL": "CL"}
METHODS = (*HC_METHODS, *EN_METHODS, "KMODES", "ENKM", "WOR", "WR")

SEQ_DESIGNS = {"low-noise": SEQ_LOW_NOISE, "high-noise": SEQ_HIGH_NOISE}

THREADS_ENV = "CATENS_THREADS"


@dataclass(frozen=True)
class MethodOptions:
    """Per-run knobs shared by every method."""

    B: int = 25
    alpha: float = 0.0
    seed: int = 0
    subspace: str = "none"
    blocks: int | None = None
    normalize: bool = False
    final_linkage: str = "AL"


def run_method(
    name: str,
    x: CategoricalMatrix,
    k: int,
    opts: MethodOptions,
) -> tuple[Clustering, Dendrogram | None]:
    """Dispatch one clustering method by its table name."""
    name = name.upper()
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; expected one of {', '.join(METHODS)}")
    mode = opts.subspace
    if name == "WOR":
        mode = "wor"
    elif name == "WR":
        mode = "wr"
    if mode not in ("none", "wor", "wr"):
        raise ValueError(f"unknown subspace mode {mode!r}")
    if mode != "none":
        if name in ("KMODES", "ENKM") or name in HC_METHODS:
            raise ValueError(f"subspace ensembling is not defined for {name}")
        base_linkage = EN_METHODS.get(name, "AL")
        cfg = EnsembleConfig(
            B=opts.B, linkage=base_linkage, seed=child_seed(opts.seed, 2), alpha=opts.alpha
        )
        if mode == "wor":
            h = None
            if opts.blocks:
                if x.J % opts.blocks != 0:
                    raise ValueError(f"--blocks {opts.blocks} must divide J={x.J} for WOR")
                h = x.J // opts.blocks
            subs = wor_subspaces(x.J, h=h, seed=child_seed(opts.seed, 1))
        else:
            subs = wr_subspaces(x.J, M=opts.blocks or 200, seed=child_seed(opts.seed, 1))
        return subspace_ensemble(x, subs, cfg, k, final_linkage=opts.final_linkage)
    if name in HC_METHODS:
        d = hamming(x, normalized=opts.normalize)
        tree = agglomerate(d, HC_METHODS[name], leaf_labels=x.row_ids)
        return cut_with_outlier_deferral(tree, k, opts.alpha), tree
    if name in EN_METHODS:
        cfg = EnsembleConfig(
            B=opts.B, linkage=EN_METHODS[name], seed=opts.seed, alpha=opts.alpha
        )
        return ensemble_cluster(x, cfg, k)
    if name == "KMODES":
        state = kmodes(x, k, seed=opts.seed)
        return relabel_dense(state.labels), None
    return en_kmodes(x, k, B=opts.B, seed=opts.seed), None


@dataclass(frozen=True)
class ExperimentSpec:
    """A replicated comparison of methods on one data source."""

    methods: tuple[str, ...]
    replicates: int = 1
    k_final: int | None = None
    seed: int = 0
    output: str | None = None
    design: str | None = None
    seq_design: str | None = None
    seq_j: int | None = None
    seq_sizes: tuple[int, ...] | None = None
    input: str | None = None
    format: str | None = None
    delimiter: str = ","
    header: bool = False
    gap_symbol: str | None = None
    id_column: str | None = None
    truth_column: str | None = None
    options: MethodOptions = field(default_factory=MethodOptions)
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.methods:
            raise ValueError("at least one method is required")
        for m in self.methods:
            if m.upper() not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        sources = [s is not None for s in (self.design, self.seq_design, self.input)]
        if sum(sources) != 1:
            raise ValueError("exactly one of design, seq_design or input is required")
        if self.design is not None and self.design not in DESIGNS:
            raise ValueError(f"unknown design {self.design!r}")
        if self.seq_design is not None and self.seq_design not in SEQ_DESIGNS:
            raise ValueError(f"unknown sequence design {self.seq_design!r}")


def _seq_design(spec: ExperimentSpec) -> SeqDesign:
    base = SEQ_DESIGNS[spec.seq_design]
    kwargs = {}
    if spec.seq_j is not None:
        kwargs["J"] = spec.seq_j
    if spec.seq_sizes is not None:
        kwargs["sizes"] = spec.seq_sizes
    return SeqDesign(block_probs=base.block_probs, **kwargs) if kwargs else base


def _experiment_data(spec: ExperimentSpec, replicate: int) -> tuple[CategoricalMatrix, Clustering | None]:
    data_seed = child_seed(spec.seed, 0)
    if spec.design is not None:
        return gen_lowdim(DESIGNS[spec.design], seed=data_seed, replicate=replicate)
    if spec.seq_design is not None:
        return gen_highdim(_seq_design(spec), seed=data_seed, replicate=replicate)
    return _load_input(
        spec.input,
        fmt=spec.format,
        delimiter=spec.delimiter,
        header=spec.header,
        gap_symbol=spec.gap_symbol,
        id_column=spec.id_column,
        truth_column=spec.truth_column,
    )


def _experiment_k(spec: ExperimentSpec, truth: Clustering | None) -> int:
    if spec.k_final is not None:
        return spec.k_final
    if spec.design is not None:
        return DESIGNS[spec.design].K
    if spec.seq_design is not None:
        return 5
    if truth is not None:
        return truth.K
    raise ValueError("k_final is required when the input carries no truth labels")


def _replicate_rates(spec: ExperimentSpec, replicate: int) -> dict[str, float]:
    x, truth = _experiment_data(spec, replicate)
    if truth is None:
        raise DataError("classification rates need truth labels; none were provided")
    k = _experiment_k(spec, truth)
    method_seed = child_seed(spec.seed, 1)
    rates: dict[str, float] = {}
    for mi, method in enumerate(spec.methods):
        opts = MethodOptions(
            B=spec.options.B,
            alpha=spec.options.alpha,
            seed=child_seed(method_seed, replicate, mi),
            subspace=spec.options.subspace,
            blocks=spec.options.blocks,
            normalize=spec.options.normalize,
            final_linkage=spec.options.final_linkage,
        )
        labels, _ = run_method(method, x, k, opts)
        rates[method] = classification_rate(labels, truth)
    return rates


def run_experiment(spec: ExperimentSpec) -> dict[str, dict[str, tuple[float, float]]]:
    """Replicate x method classification rates, aggregated to mean(sd).

    Results are keyed by replicate index, so any worker scheduling produces
    the same table.
    """
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            per_rep = list(pool.map(_replicate_rates, [spec] * spec.replicates, range(spec.replicates)))
    else:
        per_rep = [_replicate_rates(spec, r) for r in range(spec.replicates)]
    column = spec.design or spec.seq_design or Path(spec.input).name
    results: dict[str, dict[str, tuple[float, float]]] = {}
    for method in spec.methods:
        results[method] = {column: replicate_summary([rep[method] for rep in per_rep])}
    return results


def _load_input(
    path: str,
    fmt: str | None = None,
    delimiter: str = ",",
    header: bool = False,
    gap_symbol: str | None = None,
    id_column: str | None = None,
    truth_column: str | None = None,
) -> tuple[CategoricalMatrix, Clustering | None]:
    suffix = Path(path).suffix.lower()
    kind = fmt or ("fasta" if suffix in catio.FASTA_SUFFIXES else "csv")
    if kind == "fasta":
        gaps = catio.DEFAULT_GAP_SYMBOLS if gap_symbol is None else (gap_symbol,)
        return catio.load_fasta_matrix(path, gap_symbols=gaps), None
    if kind != "csv":
        raise ValueError(f"unknown input format {kind!r}")
    return catio.read_categorical_csv(
        path,
        delimiter=delimiter,
        header=header,
        gap_symbol=gap_symbol,
        id_column=id_column,
        truth_column=truth_column,
    )


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse defaults to 2, which we reserve for data errors)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["csv", "fasta"], help="input format (default: by extension)")
    p.add_argument("--delimiter", default=",", help="CSV delimiter (default ',')")
    p.add_argument("--header", action="store_true", help="CSV input has a header row")
    p.add_argument("--gap-symbol", help="symbol marking alignment gaps")
    p.add_argument("--id-column", help="CSV column holding row ids (name or index)")
    p.add_argument("--truth-column", help="CSV column holding true labels (name or index)")


def _add_method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensemble-size", type=int, default=25, metavar="B",
                   help="base clusterings per ensemble (default 25)")
    p.add_argument("--alpha", type=float, default=0.0,
                   help="small-cluster deferral fraction (default 0)")
    p.add_argument("--linkage", default="AL",
                   help="final combination linkage for subspace runs (default AL)")
    p.add_argument("--subspace", choices=["none", "wor", "wr"], default="none",
                   help="wrap the method in subspace ensembling")
    p.add_argument("--blocks", type=int, metavar="M",
                   help="subspace count (WR default 200; WOR default random lengths)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--normalize", action="store_true",
                   help="divide mismatch counts by compared positions")
    p.add_argument("--config", help="flat key=value file providing flag defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="catens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pc = sub.add_parser("cluster", help="cluster one dataset")
    pc.add_argument("input", help="CSV table or aligned FASTA file")
    pc.add_argument("--method", required=True, help="one of " + ", ".join(METHODS))
    pc.add_argument("--k", type=int, required=True, help="final cluster count")
    pc.add_argument("--output", help="labels CSV path (default: stdout)")
    pc.add_argument("--newick", help="write the dendrogram to this Newick file")
    pc.add_argument("--save-dissimilarity", help="export the pairwise dissimilarity as square CSV")
    _add_method_flags(pc)
    _add_io_flags(pc)

    pe = sub.add_parser("experiment", help="replicated method comparison")
    src = pe.add_mutually_exclusive_group(required=True)
    src.add_argument("--design", choices=sorted(DESIGNS, key=lambda s: int(s[1:])),
                     help="low-dimensional simulated design")
    src.add_argument("--seq-design", choices=sorted(SEQ_DESIGNS),
                     help="high-dimensional sequence simulator")
    src.add_argument("--input", help="CSV file with a truth column")
    pe.add_argument("--seq-j", type=int, help="total dimension for --seq-design")
    pe.add_argument("--seq-sizes", help="comma-separated cluster sizes for --seq-design")
    pe.add_argument("--methods", required=True, help="comma-separated method names")
    pe.add_argument("--replicates", type=int, default=1)
    pe.add_argument("--k", type=int, help="final cluster count (default: from design/truth)")
    pe.add_argument("--output", help="write the TSV results table here")
    pe.add_argument("--workers", type=int,
                    default=int(os.environ.get(THREADS_ENV, "1")),
                    help=f"parallel replicate workers (default ${THREADS_ENV} or 1)")
    _add_method_flags(pe)
    _add_io_flags(pe)

    ps = sub.add_parser("simulate", help="generate and export a dataset")
    gsrc = ps.add_mutually_exclusive_group(required=True)
    gsrc.add_argument("--design", choices=sorted(DESIGNS, key=lambda s: int(s[1:])))
    gsrc.add_argument("--seq-design", choices=sorted(SEQ_DESIGNS))
    gsrc.add_argument("--noise", metavar="N,J,S", help="uniform noise table")
    ps.add_argument("--seq-j", type=int, help="total dimension for --seq-design")
    ps.add_argument("--seq-sizes", help="comma-separated cluster sizes for --seq-design")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--replicate", type=int, default=0)
    ps.add_argument("--output", required=True, help=".csv or .fasta destination")
    ps.add_argument("--truth-out", help="sidecar truth CSV (FASTA output only)")
    ps.add_argument("--delimiter", default=",")
    return parser


def _expand_config(argv: list[str]) -> list[str]:
    """Splice ``--config FILE`` contents in as flags (explicit flags win)."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        return argv
    path = argv[at + 1]
    rest = argv[:at] + argv[at + 2:]
    flags: list[str] = []
    for key, value in catio.load_config(path).items():
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                flags.append(flag)
        else:
            flags.extend([flag, value])
    # config flags go right after the subcommand so explicit ones override
    return rest[:1] + flags + rest[1:]


def _options_from_args(args: argparse.Namespace) -> MethodOptions:
    return MethodOptions(
        B=args.ensemble_size,
        alpha=args.alpha,
        seed=args.seed,
        subspace=args.subspace,
        blocks=args.blocks,
        normalize=args.normalize,
        final_linkage=args.linkage,
    )


def _parse_sizes(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    return tuple(int(part) for part in text.split(","))


def _cmd_cluster(args: argparse.Namespace) -> int:
    x, truth = _load_input(
        args.input,
        fmt=args.format,
        delimiter=args.delimiter,
        header=args.header,
        gap_symbol=args.gap_symbol,
        id_column=args.id_column,
        truth_column=args.truth_column,
    )
    labels, tree = run_method(args.method, x, args.k, _options_from_args(args))
    ids = x.row_ids or tuple(str(i) for i in range(x.n))
    if args.output:
        catio.write_labels_csv(args.output, ids, labels.labels)
    else:
        sys.stdout.write("id,cluster\n")
        for rid, lab in zip(ids, labels.labels):
            sys.stdout.write(f"{rid},{int(lab)}\n")
    if args.newick:
        if tree is None:
            raise ValueError(f"method {args.method} does not produce a dendrogram")
        catio.write_newick(args.newick, tree, labels=ids)
    if args.save_dissimilarity:
        catio.write_dissimilarity_csv(args.save_dissimilarity, hamming(x, normalized=args.normalize))
    if truth is not None:
        sys.stderr.write(f"classification rate: {classification_rate(labels, truth):.4f}\n")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    spec = ExperimentSpec(
        methods=tuple(m.strip().upper() for m in args.methods.split(",") if m.strip()),
        replicates=args.replicates,
        k_final=args.k,
        seed=args.seed,
        output=args.output,
        design=args.design,
        seq_design=args.seq_design,
        seq_j=args.seq_j,
        seq_sizes=_parse_sizes(args.seq_sizes),
        input=args.input,
        format=args.format,
        delimiter=args.delimiter,
        header=args.header,
        gap_symbol=args.gap_symbol,
        id_column=args.id_column,
        truth_column=args.truth_column,
        options=_options_from_args(args),
        workers=args.workers,
    )
    results = run_experiment(spec)
    table = format_results_table(results)
    if spec.output:
        Path(spec.output).write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.design:
        x, truth = gen_lowdim(DESIGNS[args.design], seed=args.seed, replicate=args.replicate)
    elif args.seq_design:
        base = SEQ_DESIGNS[args.seq_design]
        kwargs = {}
        if args.seq_j is not None:
            kwargs["J"] = args.seq_j
        sizes = _parse_sizes(args.seq_sizes)
        if sizes is not None:
            kwargs["sizes"] = sizes
        sd = SeqDesign(block_probs=base.block_probs, **kwargs) if kwargs else base
        x, truth = gen_highdim(sd, seed=args.seed, replicate=args.replicate)
    else:
        try:
            n, j, s = (int(v) for v in args.noise.split(","))
        except ValueError:
            raise ValueError("--noise expects N,J,S integers") from None
        x, truth = gen_noise(n, j, s, seed=args.seed, replicate=args.replicate), None
    out = Path(args.output)
    if out.suffix.lower() in catio.FASTA_SUFFIXES:
        catio.write_fasta(out, catio.matrix_to_fasta_records(x))
        if truth is not None and args.truth_out:
            ids = x.row_ids or tuple(str(i) for i in range(x.n))
            catio.write_labels_csv(args.truth_out, ids, truth.labels)
    else:
        catio.write_categorical_csv(out, x, truth=truth, delimiter=args.delimiter)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_expand_config(argv))
        if args.command == "cluster":
            return _cmd_cluster(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return _cmd_simulate(args)
    except DataError as exc:
        sys.stderr.write(f"catens: data error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"catens: data error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"catens: usage error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

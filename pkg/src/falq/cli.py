"""Command-line front end.

Subcommands: compress, reconstruct, analyze, budget, bench. Exit codes are
fixed for scripting: 0 ok, 2 I/O failure, 3 format error, 4 numeric error,
5 bad parameters. All randomness flows through --seed; FALQ_LOG sets the
log level (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import budget as budget_mod
from . import decompose as dec_mod
from . import tensorio
from .csvd import complex_svd
from .errors import FormatError, NumericError, ParamError
from .spectral import forward_dft2

EXIT_OK = 0
EXIT_IO = 2
EXIT_FORMAT = 3
EXIT_NUMERIC = 4
EXIT_PARAM = 5

log = logging.getLogger("falq")


def _setup_logging() -> None:
    level = os.environ.get("FALQ_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _write_csv(path: str | None, header: list[str], rows: list[list]) -> None:
    fh = sys.stdout if path is None or path == "-" else open(path, "w", newline="")
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _load_calibration(path: str | None):
    if path is None:
        return None
    return dec_mod.build_calibration(tensorio.read_tensor(path))


def cmd_compress(args) -> int:
    matrix = tensorio.read_tensor(args.input)
    if matrix.ndim != 2 or np.iscomplexobj(matrix):
        raise ParamError("compress expects a 2-D real tensor")
    log.info(
        "compressing %s (%dx%d) rank=%s bits=%d+%d",
        args.input, matrix.shape[0], matrix.shape[1],
        args.rank, args.bits_amp, args.bits_phase,
    )
    calib = _load_calibration(args.calib)
    cont, report = dec_mod.compress(
        matrix,
        calib=calib,
        rank=args.rank,
        amp_bits=args.bits_amp,
        phase_bits=args.bits_phase,
        max_rounds=args.iters,
        strict_even=not args.permissive_odd,
        source=os.path.basename(args.input),
    )
    tensorio.write_container(args.output, cont)
    report["kind"] = "compress"
    report["output"] = args.output
    _write_json(args.json, report)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cont = tensorio.read_container(args.input)
    matrix = dec_mod.reconstruct_from_container(cont)
    tensorio.write_tensor(args.output, matrix)
    if args.json:
        _write_json(
            args.json,
            {
                "kind": "reconstruct",
                "output": args.output,
                "dims": [cont.d1, cont.d2],
                "rank": cont.rank,
            },
        )
    return EXIT_OK


def cmd_analyze(args) -> int:
    matrix = tensorio.read_tensor(args.input)
    if matrix.ndim != 2 or np.iscomplexobj(matrix):
        raise ParamError("analyze expects a 2-D real tensor")
    matrix = matrix.astype(np.float64)
    s_spatial = complex_svd(matrix.astype(np.complex128)).S
    half = forward_dft2(matrix, strict=not args.permissive_odd)
    s_freq = complex_svd(half.data / np.sqrt(half.d1 * half.d2)).S
    k = max(len(s_spatial), len(s_freq))
    rows = []
    for i in range(k):
        rows.append(
            [
                i + 1,
                f"{s_spatial[i]:.12e}" if i < len(s_spatial) else "",
                f"{s_freq[i]:.12e}" if i < len(s_freq) else "",
            ]
        )
    _write_csv(args.csv, ["k", "sigma_spatial", "sigma_freq"], rows)
    return EXIT_OK


def cmd_budget(args) -> int:
    with open(args.dims) as fh:
        payload = json.load(fh)
    try:
        dims = [(int(a), int(b)) for a, b in payload["layers"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParamError(f"dims file needs a 'layers' list of pairs: {exc}") from exc
    backbone = args.bq if args.bq is not None else payload.get("backbone_bits", 2)
    factor = args.bl if args.bl is not None else payload.get("factor_bits", 16)
    rank = args.rank if args.rank is not None else payload.get("rank", 256)
    cfg = budget_mod.BudgetConfig(
        backbone_bits=backbone, factor_bits=factor, rank=rank
    )
    report = {
        "kind": "budget",
        "layers": [[a, b] for a, b in dims],
        "backbone_bits": backbone,
        "factor_bits": factor,
        "rank": rank,
        "average_bits": budget_mod.average_bits(dims, cfg),
        "rank_threshold": budget_mod.rank_threshold(dims, backbone, factor),
    }
    _write_json(args.json, report)
    return EXIT_OK


def _bench_spec(args) -> dict:
    spec = {
        "d1": 64,
        "d2": 64,
        "rho": 0.9,
        "seed": 0,
        "n_seeds": 20,
        "rank": 8,
        "target_rel": 0.01,
    }
    if args.spec:
        with open(args.spec) as fh:
            spec.update(json.load(fh))
    if args.rho is not None:
        spec["rho"] = args.rho
    if args.size is not None:
        spec["d1"] = spec["d2"] = args.size
    if args.seed is not None:
        spec["seed"] = args.seed
    if args.seeds is not None:
        spec["n_seeds"] = args.seeds
    if args.rank is not None:
        spec["rank"] = args.rank
    if args.target is not None:
        spec["target_rel"] = args.target
    return spec


def cmd_bench(args) -> int:
    spec = _bench_spec(args)
    log.info("bench kind=%s spec=%s", args.kind, spec)
    field_spec = bench_mod.StationaryFieldSpec(
        d1=spec["d1"], d2=spec["d2"], rho=spec["rho"], seed=spec["seed"]
    )
    if args.kind == "domains":
        reports, summary = bench_mod.domain_experiment(
            field_spec,
            rank=spec["rank"],
            target_rel=spec["target_rel"],
            n_seeds=spec["n_seeds"],
            fair_params=args.fair_params,
            jobs=args.jobs,
        )
        rows = [
            [
                r.seed,
                r.rank,
                f"{r.spatial_err:.10e}",
                f"{r.freq_err:.10e}",
                r.spatial_min_rank,
                r.freq_min_rank,
            ]
            for r in reports
        ]
        _write_csv(
            args.csv,
            ["seed", "rank", "spatial_err", "freq_err",
             "spatial_min_rank", "freq_min_rank"],
            rows,
        )
        if args.json:
            _write_json(args.json, {"kind": "bench-domains", **summary})
    elif args.kind == "tail":
        result = bench_mod.tail_ratio_check(
            field_spec, rank=spec["rank"], n_seeds=spec["n_seeds"], jobs=args.jobs
        )
        _write_csv(
            args.csv,
            ["rho", "rank", "n_seeds", "mean_ratio", "std_err", "bound", "passed"],
            [[result["rho"], result["rank"], result["n_seeds"],
              f"{result['mean_ratio']:.10e}", f"{result['std_err']:.10e}",
              f"{result['bound']:.10e}", result["passed"]]],
        )
        if args.json:
            _write_json(args.json, {"kind": "bench-tail", **result})
    else:  # ablation
        field = bench_mod.gen_stationary_field(field_spec)
        rows_raw = bench_mod.quantizer_ablation(
            field, rank=spec["rank"],
            amp_bits=args.bits_amp, phase_bits=args.bits_phase,
        )
        _write_csv(
            args.csv,
            ["scheme", "mean_abs_phase_err", "reconstruction_rel_err"],
            [
                [r["scheme"], f"{r['mean_abs_phase_err']:.10e}",
                 f"{r['reconstruction_rel_err']:.10e}"]
                for r in rows_raw
            ],
        )
        if args.json:
            _write_json(args.json, {"kind": "bench-ablation", "rows": rows_raw,
                                    **{k: spec[k] for k in ("d1", "d2", "rho", "seed")}})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="falq",
        description="Frequency-domain low-rank plus polar-quantized "
        "compression of real matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a FATF tensor into a FALQ container")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--bits-amp", type=int, default=dec_mod.DEFAULT_AMP_BITS)
    p.add_argument("--bits-phase", type=int, default=dec_mod.DEFAULT_PHASE_BITS)
    p.add_argument("--iters", type=int, default=dec_mod.DEFAULT_MAX_ROUNDS)
    p.add_argument("--calib", default=None, help="FATF file with calibration weights")
    p.add_argument("--permissive-odd", action="store_true",
                   help="zero-pad odd widths instead of rejecting them")
    p.add_argument("--json", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("reconstruct", help="decode a FALQ container to a FATF tensor")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("analyze", help="singular spectra of a tensor in both domains")
    p.add_argument("input")
    p.add_argument("--csv", default=None)
    p.add_argument("--permissive-odd", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("budget", help="bit-budget report for a block of layers")
    p.add_argument("dims", help="JSON file with a 'layers' list of [d1, d2] pairs")
    p.add_argument("--bq", type=float, default=None, help="backbone bits per entry")
    p.add_argument("--bl", type=float, default=None, help="factor bits per scalar")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("bench", help="synthetic-field benchmarks")
    p.add_argument("--kind", choices=("domains", "tail", "ablation"),
                   default="domains")
    p.add_argument("--spec", default=None, help="JSON file overriding defaults")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--seeds", type=int, default=None, help="number of trials")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--target", type=float, default=None)
    p.add_argument("--bits-amp", type=int, default=dec_mod.DEFAULT_AMP_BITS)
    p.add_argument("--bits-phase", type=int, default=dec_mod.DEFAULT_PHASE_BITS)
    p.add_argument("--fair-params", action="store_true",
                   help="charge a complex rank as two real-scalar ranks")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParamError as exc:
        print(f"falq: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except FormatError as exc:
        print(f"falq: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except NumericError as exc:
        print(f"falq: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"falq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: one subcommand per public operation.

Every invocation prints a single JSON document (stable key order) to
stdout; ``--pretty`` renders a human-readable view instead.  Exit codes:
0 success, 1 domain error, 2 budget exceeded, 3 verification failure,
64 usage error.  Long searches consult an append-only cache when
``--cache-file`` or the GRIDPOSET_CACHE environment variable is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .cache import CACHE_ENV_VAR, ResultCache, make_key
from .chains import (balanced_partition, corollary_window, load_partition,
                     partition_to_doc, save_partition, scd, verify_partition,
                     verify_symmetric)
from .errors import BudgetExceeded, ConstructionFailed, DomainError, GridPosetError
from .extremal import (certificate_to_doc, erdos_bound, load_certificate,
                       max_l_chain_free, max_p_free, pipeline_bound,
                       save_certificate, verify_certificate)
from .grid import GridShape, Subset, level_profile, load_subset, theta_ratio, width_grid
from .lubell import (claim1_construct, claim2_blocks, conjecture_ratio,
                     lubell_mass, mass_report_to_text)
from .patterns import (Pattern, contains_pattern, extremal_weight, load_pattern,
                       parse_inline_pattern, pattern_to_doc, poset_to_pattern)
from .poset import (Realizer, contains_induced_copy, dimension, load_poset,
                    named_poset, poset_to_doc)

USAGE_EXIT = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _shape_from_args(args) -> GridShape:
    if getattr(args, "sides", None):
        return GridShape(tuple(int(t) for t in args.sides.split(",") if t.strip()))
    if getattr(args, "k", None) is not None and getattr(args, "n", None) is not None:
        return GridShape.uniform(args.k, args.n)
    raise UsageError("specify either --k and --n, or --sides")


def _poset_from_args(args):
    if getattr(args, "poset_file", None):
        return load_poset(args.poset_file)
    if getattr(args, "poset", None):
        return named_poset(args.poset)
    raise UsageError("specify --poset NAME or --poset-file PATH")


def _pattern_from_args(args, file_attr="pattern_file", dims_attr="dims", ones_attr="ones") -> Pattern:
    path = getattr(args, file_attr, None)
    if path:
        return load_pattern(path)
    dims = getattr(args, dims_attr, None)
    ones = getattr(args, ones_attr, None)
    if dims and ones is not None:
        return parse_inline_pattern(dims, ones)
    raise UsageError("specify a pattern file or inline --dims/--ones")


def _histogram(sizes) -> dict:
    hist: dict[str, int] = {}
    for s in sizes:
        hist[str(s)] = hist.get(str(s), 0) + 1
    return dict(sorted(hist.items(), key=lambda kv: int(kv[0])))


def _cache_for(args) -> Optional[ResultCache]:
    path = getattr(args, "cache_file", None) or os.environ.get(CACHE_ENV_VAR)
    return ResultCache(path) if path else None


def _cached(args, command: str, params: dict, compute):
    cache = _cache_for(args)
    key = make_key(command, params, __version__)
    if cache is not None:
        hit = cache.lookup(key)
        if hit is not None:
            return hit
    doc = compute()
    if cache is not None:
        cache.store(key, doc)
    return doc


# -- subcommand handlers -------------------------------------------------


def _cmd_width(args) -> dict:
    shape = _shape_from_args(args)
    return {"command": "width", "sides": list(shape.sides),
            "width": width_grid(shape)}


def _cmd_levels(args) -> dict:
    shape = _shape_from_args(args)
    prof = level_profile(shape)
    return {"command": "levels", "sides": list(shape.sides),
            "sizes": list(prof.sizes), "width": prof.width,
            "width_rank": prof.width_rank}


def _cmd_dimension(args) -> dict:
    p = _poset_from_args(args)
    params = {"poset": poset_to_doc(p), "budget": args.budget}

    def compute():
        d, realizer = dimension(p, max_size=args.budget)
        return {"command": "dimension", "poset": poset_to_doc(p), "dimension": d,
                "realizer": [list(seq) for seq in realizer.sequences()]}

    return _cached(args, "dimension", params, compute)


def _cmd_scd(args) -> dict:
    shape = _shape_from_args(args)
    part = scd(shape)
    if args.out:
        save_partition(args.out, part)
    report = verify_partition(shape, part)
    return {"command": "scd", "sides": list(shape.sides),
            "chains": len(part.chains), "width": width_grid(shape),
            "size_histogram": _histogram(part.sizes),
            "partition_ok": report.is_partition and report.chains_valid,
            "symmetric": verify_symmetric(shape, part)}


def _cmd_chain_partition(args) -> dict:
    shape = _shape_from_args(args)
    part = balanced_partition(shape)
    low, high = corollary_window(shape)
    if args.out:
        save_partition(args.out, part)
    doc = {"command": "chain-partition", "sides": list(shape.sides),
           "low": low, "high": high, "chains": len(part.chains),
           "size_histogram": _histogram(part.sizes)}
    if args.verify:
        report = verify_partition(shape, part, low, high)
        doc["verified"] = report.ok
        if not report.ok:
            raise VerificationFailure(doc)
    return doc


class VerificationFailure(Exception):
    def __init__(self, doc):
        self.doc = doc


def _cmd_verify_cert(args) -> dict:
    path = args.cert
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.read(64)
    if head.lstrip().startswith("{"):
        cert = load_certificate(path)
        report = verify_certificate(cert)
        doc = {"command": "verify-cert", "kind": "bound-certificate",
               "ok": report.ok, "total": cert.total,
               "problems": report.problems}
        if not report.ok:
            raise VerificationFailure(doc)
        return doc
    part = load_partition(path)
    low = args.low
    high = args.high
    report = verify_partition(part.shape, part, low, high)
    checked = report.is_partition and report.chains_valid
    if low is not None and high is not None:
        checked = checked and report.sizes_in_window
    doc = {"command": "verify-cert", "kind": "chain-partition",
           "ok": checked, "is_partition": report.is_partition,
           "chains_valid": report.chains_valid,
           "sizes_in_window": report.sizes_in_window if low is not None else None}
    if not checked:
        raise VerificationFailure(doc)
    return doc


def _cmd_pattern_contains(args) -> dict:
    host = _pattern_from_args(args, "host_file", "host_dims", "host_ones")
    pat = _pattern_from_args(args)
    witness = contains_pattern(host, pat)
    return {"command": "pattern-contains",
            "host": pattern_to_doc(host), "pattern": pattern_to_doc(pat),
            "contains": witness is not None,
            "witness": [list(r) for r in witness.index_rows] if witness else None}


def _cmd_pattern_extremal(args) -> dict:
    pat = _pattern_from_args(args)
    params = {"m": args.m, "pattern": pattern_to_doc(pat), "budget": args.budget}

    def compute():
        value, witness = extremal_weight(args.m, pat, max_cells=args.budget)
        return {"command": "pattern-extremal", "m": args.m,
                "pattern": pattern_to_doc(pat), "max_weight": value,
                "witness_ones": [list(c) for c in witness.sorted_ones()]}

    return _cached(args, "pattern-extremal", params, compute)


def _cmd_poset_pattern(args) -> dict:
    p = _poset_from_args(args)
    params = {"poset": poset_to_doc(p), "budget": args.budget}

    def compute():
        d, realizer = dimension(p, max_size=args.budget)
        pat = poset_to_pattern(p, realizer)
        return {"command": "poset-pattern", "poset": poset_to_doc(p),
                "dimension": d,
                "realizer": [list(seq) for seq in realizer.sequences()],
                "pattern": pattern_to_doc(pat)}

    return _cached(args, "poset-pattern", params, compute)


def _cmd_max_free(args) -> dict:
    shape = _shape_from_args(args)
    p = _poset_from_args(args)
    params = {"sides": list(shape.sides), "poset": poset_to_doc(p), "budget": args.budget}

    def compute():
        value, witness = max_p_free(shape, p, max_points=args.budget)
        return {"command": "max-free", "sides": list(shape.sides),
                "poset": poset_to_doc(p), "max": value,
                "witness_indices": witness.indices(),
                "witness_points": [list(pt) for pt in witness.points()]}

    return _cached(args, "max-free", params, compute)


def _cmd_pipeline(args) -> dict:
    shape = _shape_from_args(args)
    p = _poset_from_args(args)
    params = {"sides": list(shape.sides), "poset": poset_to_doc(p),
              "cap_mode": args.cap_mode, "c_p": args.c_p, "budget": args.budget}

    def compute():
        cert = pipeline_bound(shape, p, cap_mode=args.cap_mode, c_p=args.c_p,
                              max_block_points=args.budget)
        return {"command": "pipeline", "sides": list(shape.sides),
                "poset": poset_to_doc(p), "cap_mode": args.cap_mode,
                "dim": cert.dim, "blocks": len(cert.blocks),
                "total": cert.total, "certificate": certificate_to_doc(cert)}

    doc = _cached(args, "pipeline", params, compute)
    if args.out:
        from .extremal import certificate_from_doc
        save_certificate(args.out, certificate_from_doc(doc["certificate"]))
    return doc


def _cmd_erdos(args) -> dict:
    shape = _shape_from_args(args)
    return {"command": "erdos", "sides": list(shape.sides), "l": args.l,
            "exact": max_l_chain_free(shape, args.l),
            "erdos_bound": erdos_bound(shape, args.l)}


def _cmd_lubell(args) -> dict:
    s = load_subset(args.subset_file)
    report = lubell_mass(s)
    doc = {"command": "lubell", "sides": list(s.shape.sides), "count": len(s),
           "total": _frac(report.total),
           "per_level": [[lm.level, lm.count, lm.level_size, _frac(lm.mass)]
                         for lm in report.per_level]}
    if args.export:
        with open(args.export, "w", encoding="utf-8") as fh:
            fh.write(mass_report_to_text(report))
    return doc


def _cmd_claim1(args) -> dict:
    result = claim1_construct(args.k, args.n)
    report = lubell_mass(result.subset, blocks=result.block_subsets())
    doc = {"command": "claim1", "k": args.k, "n": args.n,
           "count": len(result.subset),
           "points": [list(pt) for pt in result.subset.points()],
           "blocks": [{"i": b.index, "coords": [b.coord_lo, b.coord_hi],
                       "target_sum": b.target_sum, "level": b.level,
                       "count": b.count, "level_size": b.level_size}
                      for b in result.blocks],
           "mass": _frac(report.total),
           "block_masses": [[bm.label, _frac(bm.mass)] for bm in report.per_block]}
    if args.verify:
        from .extremal import is_p_free
        from .poset import k_poset
        free = is_p_free(result.subset, k_poset())
        doc["k_free"] = free
        if not free:
            raise VerificationFailure(doc)
    if args.out:
        from .grid import save_subset
        save_subset(args.out, result.subset)
    return doc


def _cmd_claim2(args) -> dict:
    subset = load_subset(args.subset_file) if args.subset_file else None
    report = claim2_blocks(args.k, args.n, subset)
    return {"command": "claim2", "k": args.k, "n": args.n,
            "qminus_size": report.qminus_size,
            "qminus_max_sum": report.qminus_max_sum, "s": report.s,
            "uncovered_sums": list(report.uncovered_sums),
            "blocks": [{"i": b.index, "sums": [b.sum_lo, b.sum_hi],
                        "levels": None if b.empty else [b.level_lo, b.level_hi],
                        "size": b.size, "empty": b.empty, "clipped": b.clipped,
                        "bottom_level_size": b.bottom_level_size,
                        "bottom_bound_ok": b.bottom_bound_ok,
                        "top_level_size": b.top_level_size,
                        "top_binom": b.top_binom,
                        "top_bound_ok": b.top_bound_ok,
                        "mass": _frac(b.mass) if b.mass is not None else None}
                       for b in report.blocks]}


def _cmd_ratio(args) -> dict:
    p = _poset_from_args(args)
    s = load_subset(args.subset_file)
    report = conjecture_ratio(p, args.k, args.n, s)
    ratio = _frac(report.ratio) if report.exact else repr(report.ratio)
    log2k = report.log2_k if report.exact else repr(report.log2_k)
    return {"command": "ratio", "k": args.k, "n": args.n,
            "poset": poset_to_doc(p), "count": len(s),
            "mass": _frac(report.mass), "log2_k": log2k,
            "ratio": ratio, "exact": report.exact}


# -- parser ----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="gridposet",
                     description="Exact grid-poset invariants, chain partitions, "
                                 "pattern containment, and Lubell-mass reports.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, shape=False, poset=False, budget=None):
        sp.add_argument("--pretty", action="store_true", help="human-readable output")
        sp.add_argument("--seed", type=int, default=None,
                        help="accepted for interface parity; all algorithms are deterministic")
        sp.add_argument("--cache-file", default=None,
                        help=f"result cache path (default: ${CACHE_ENV_VAR})")
        if shape:
            sp.add_argument("--k", type=int)
            sp.add_argument("--n", type=int)
            sp.add_argument("--sides", help="comma-separated sides, e.g. 2,3,4")
        if poset:
            sp.add_argument("--poset", help="chain<l>, antichain<a>, K, V, standard<n>")
            sp.add_argument("--poset-file")
        if budget is not None:
            sp.add_argument("--budget", type=int, default=budget)

    sp = sub.add_parser("width", help="width of a grid")
    common(sp, shape=True)
    sp = sub.add_parser("levels", help="exact level profile of a grid")
    common(sp, shape=True)
    sp = sub.add_parser("dimension", help="exact order dimension with realizer")
    common(sp, poset=True, budget=10)
    sp = sub.add_parser("scd", help="symmetric chain decomposition")
    common(sp, shape=True)
    sp.add_argument("--out", help="write the partition certificate here")
    sp = sub.add_parser("chain-partition", help="balanced chain partition")
    common(sp, shape=True)
    sp.add_argument("--out", help="write the partition certificate here")
    sp.add_argument("--verify", action="store_true")
    sp = sub.add_parser("verify-cert", help="re-check a stored certificate")
    common(sp)
    sp.add_argument("--cert", required=True)
    sp.add_argument("--low", type=int, default=None)
    sp.add_argument("--high", type=int, default=None)
    sp = sub.add_parser("pattern-contains", help="pattern containment with witness")
    common(sp)
    sp.add_argument("--host-file")
    sp.add_argument("--host-dims")
    sp.add_argument("--host-ones")
    sp.add_argument("--pattern-file")
    sp.add_argument("--dims")
    sp.add_argument("--ones")
    sp = sub.add_parser("pattern-extremal", help="exact extremal weight avoiding a pattern")
    common(sp, budget=25)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--pattern-file")
    sp.add_argument("--dims")
    sp.add_argument("--ones")
    sp = sub.add_parser("poset-pattern", help="encode a poset as a permutation pattern")
    common(sp, poset=True, budget=10)
    sp = sub.add_parser("max-free", help="exact maximum P-free subset of a grid")
    common(sp, shape=True, poset=True, budget=64)
    sp = sub.add_parser("pipeline", help="block-decomposition upper bound certificate")
    common(sp, shape=True, poset=True, budget=64)
    sp.add_argument("--cap-mode", choices=["exact-search", "pattern-cap"],
                    default="exact-search")
    sp.add_argument("--c-p", type=int, default=None)
    sp.add_argument("--out", help="write the certificate here")
    sp = sub.add_parser("erdos", help="exact maximum l-chain-free size")
    common(sp, shape=True)
    sp.add_argument("--l", type=int, required=True)
    sp = sub.add_parser("lubell", help="Lubell mass report for a subset file")
    common(sp)
    sp.add_argument("--subset-file", required=True)
    sp.add_argument("--export", help="write the text table here")
    sp = sub.add_parser("claim1", help="nested-antichain K-free construction")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--verify", action="store_true",
                    help="also check K-freeness exhaustively")
    sp.add_argument("--out", help="write the subset file here")
    sp = sub.add_parser("claim2", help="dyadic lower-half block report")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--subset-file")
    sp = sub.add_parser("ratio", help="mass-to-log2(k) ratio of a P-free subset")
    common(sp, poset=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--subset-file", required=True)
    return parser


_HANDLERS = {
    "width": _cmd_width,
    "levels": _cmd_levels,
    "dimension": _cmd_dimension,
    "scd": _cmd_scd,
    "chain-partition": _cmd_chain_partition,
    "verify-cert": _cmd_verify_cert,
    "pattern-contains": _cmd_pattern_contains,
    "pattern-extremal": _cmd_pattern_extremal,
    "poset-pattern": _cmd_poset_pattern,
    "max-free": _cmd_max_free,
    "pipeline": _cmd_pipeline,
    "erdos": _cmd_erdos,
    "lubell": _cmd_lubell,
    "claim1": _cmd_claim1,
    "claim2": _cmd_claim2,
    "ratio": _cmd_ratio,
}


def _render_pretty(doc: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, value in doc.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render_pretty(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(_render_pretty(item, indent + 1))
                lines.append(f"{pad}  -")
        else:
            lines.append(f"{pad}{key}: {json.dumps(value)}")
    return "\n".join(lines)


def _emit(doc: dict, pretty: bool) -> None:
    if pretty:
        print(_render_pretty(doc))
    else:
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        doc = _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except VerificationFailure as exc:
        _emit(exc.doc, getattr(args, "pretty", False))
        return 3
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except ConstructionFailed as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 3
    except (DomainError, GridPosetError, FileNotFoundError, IndexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(doc, getattr(args, "pretty", False))
    return 0


if __name__ == "__main__":
    sys.exit(main())

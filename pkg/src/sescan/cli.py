"""sescan command line.

    sescan scan contracts/ --snapshot kinds.csv --out report.json
    sescan selector "foo(uint256)"
    sescan checksum 0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed
    sescan derive 0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0 0
    sescan mine 2fbebd38 --match-bits 16 --args "(uint256)"

Exit codes: 0 clean, 1 findings / not found, 2 operational error.
"""

from __future__ import annotations

import argparse
import json
import sys

from sescan import address_kind as ak
from sescan.homograph import default_map
from sescan.miner import DEFAULT_ALPHABET, MiningTask, mine, throughput_bench
from sescan.primitives import (
    INVALID_CHECKSUM,
    MALFORMED,
    MAX_NONCE,
    Address,
    HeaderError,
    Selector,
    compute_selector,
    derive_create_address,
    eip55_classify,
    eip55_encode,
    raw_selector,
)
from sescan.report import Report, collect_files, exit_code, receivers_in, scan_files
from sescan.scanner import CLASSES, SEVERITIES, ScanConfig

EXIT_OK, EXIT_FOUND, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def d(value):
        return argparse.SUPPRESS if suppress else value

    g = parser.add_argument_group("global options")
    g.add_argument("--out", metavar="FILE", default=d(None), help="write output to FILE instead of stdout")
    g.add_argument("--severity-floor", choices=SEVERITIES, default=d("info"), help="drop findings below this severity")
    g.add_argument("--classes", metavar="A1,...", default=d(",".join(CLASSES)), help="attack classes to detect")
    g.add_argument("--snapshot", metavar="FILE", default=d(None), help="address kind snapshot (address,kind lines)")
    g.add_argument("--rpc", metavar="URL", default=d(None), help="JSON-RPC node for live eth_getCode lookups")
    g.add_argument("--jobs", type=int, default=d(1), help="parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sescan", description="Detect social-engineering patterns in Solidity source.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="scan files or directories")
    p.add_argument("paths", nargs="*", help="files or directories")
    p.add_argument("--glob", default=None, help="file name pattern for directories (default *.sol)")
    p.add_argument("--config-from", metavar="REPORT", help="re-run with the config_echo of an earlier report")
    _global_flags(p, suppress=True)

    p = sub.add_parser("selector", help="4-byte selector of a function header")
    p.add_argument("header")
    p.add_argument("--raw", action="store_true", help="hash the text exactly as given, no validation")
    _global_flags(p, suppress=True)

    p = sub.add_parser("checksum", help="classify address letter case and print the EIP-55 form")
    p.add_argument("address")
    _global_flags(p, suppress=True)

    p = sub.add_parser("derive", help="address of the contract created by SENDER at NONCE")
    p.add_argument("sender")
    p.add_argument("nonce")
    p.add_argument("--checksum", action="store_true", help="print EIP-55 mixed case")
    _global_flags(p, suppress=True)

    p = sub.add_parser("mine", help="search for a function name whose selector matches TARGET")
    p.add_argument("target", help="selector as 8 hex digits")
    p.add_argument("--alphabet", default=DEFAULT_ALPHABET)
    p.add_argument("--max-length", type=int, default=4)
    p.add_argument("--match-bits", type=int, default=32)
    p.add_argument("--budget", type=int, default=None, help="maximum candidates (default: whole space)")
    p.add_argument("--args", dest="arg_signature", default="()", help="argument list, e.g. '(uint256)'")
    p.add_argument("--workers", type=int, default=None, help="defaults to --jobs")
    p.add_argument("--progress", action="store_true", help="report progress on stderr")
    _global_flags(p, suppress=True)

    p = sub.add_parser("bench", help="measure selector evaluations per second")
    p.add_argument("--seconds", type=float, default=2.0)
    _global_flags(p, suppress=True)
    return parser


def _parse_classes(text: str):
    classes = [c.strip().upper() for c in text.split(",") if c.strip()]
    unknown = [c for c in classes if c not in CLASSES]
    if unknown or not classes:
        raise UsageError(f"--classes: expected a subset of {','.join(CLASSES)}, got {text!r}")
    return classes


def cmd_scan(args):
    paths, pattern = args.paths, args.glob
    classes, floor = args.classes, args.severity_floor
    snapshot, rpc = args.snapshot, args.rpc
    if args.config_from:
        with open(args.config_from, encoding="utf-8") as f:
            echo = json.load(f)["config_echo"]
        paths = paths or echo["paths"]
        pattern = pattern or echo["glob"]
        classes, floor = ",".join(echo["classes"]), echo["severity_floor"]
        snapshot, rpc = echo["snapshot"], echo["rpc"]
    pattern = pattern or "*.sol"
    if not paths:
        raise UsageError("scan: no paths given")

    enabled = _parse_classes(classes)
    kinds = ak.load_snapshot(snapshot) if snapshot else ak.AddressKindMap()
    files, errors = collect_files(paths, pattern)
    if rpc:
        resolver = ak.LiveResolver(kinds, rpc)
        kinds = resolver.resolve_all(receivers_in(files))
        for addr, why in sorted(resolver.failures.items(), key=lambda kv: kv[0].raw):
            errors.append({"file": None, "error": f"resolver unavailable for {addr.hex}: {why}"})
    config = ScanConfig(default_map(), kinds, frozenset(enabled), floor)

    report = scan_files(files, config, jobs=max(1, args.jobs))
    report.errors = errors + report.errors
    # jobs and --out are scheduling/output choices and do not affect content
    report.config_echo = {
        "paths": list(paths),
        "glob": pattern,
        "classes": [c for c in CLASSES if c in enabled],
        "severity_floor": floor,
        "snapshot": snapshot,
        "rpc": rpc,
        "confusables_version": config.confusable_map.version_tag,
        "address_kinds_source": kinds.source_tag,
    }
    return report.to_json(), exit_code(report)


def cmd_selector(args):
    if args.raw:
        return raw_selector(args.header).hex + "\n", EXIT_OK
    return compute_selector(args.header).hex + "\n", EXIT_OK


def cmd_checksum(args):
    c = eip55_classify(args.address.strip())
    if c.case_class == MALFORMED:
        return f"{MALFORMED}\n", EXIT_ERROR
    text = f"{c.case_class}\n{eip55_encode(c.address).text}\n"
    return text, EXIT_FOUND if c.case_class == INVALID_CHECKSUM else EXIT_OK


def cmd_derive(args):
    try:
        sender = Address.from_hex(args.sender)
    except ValueError as e:
        raise UsageError(str(e))
    try:
        nonce = int(args.nonce, 0)
    except ValueError:
        raise UsageError(f"nonce must be an integer: {args.nonce!r}")
    if not 0 <= nonce <= MAX_NONCE:
        raise UsageError(f"nonce must be in [0, 2**64): {nonce}")
    addr = derive_create_address(sender, nonce)
    return (eip55_encode(addr).text if args.checksum else addr.hex) + "\n", EXIT_OK


def cmd_mine(args):
    try:
        task = MiningTask(
            Selector.from_hex(args.target),
            args.match_bits,
            args.alphabet,
            args.max_length,
            args.arg_signature,
            args.budget,
        )
    except ValueError as e:
        raise UsageError(str(e))
    workers = args.workers if args.workers is not None else args.jobs

    def progress(done, total):
        print(f"\rmined {done}/{total} candidates", end="", file=sys.stderr, flush=True)

    result = mine(task, workers=max(1, workers), progress=progress if args.progress else None)
    if args.progress:
        print(file=sys.stderr)
    if result.found is None:
        return f"NOT FOUND after {result.candidates_tried} candidates\n", EXIT_FOUND
    return f"{result.found.canonical} {result.selector.hex}\n", EXIT_OK


def cmd_bench(args):
    if args.seconds <= 0:
        raise UsageError("--seconds must be positive")
    b = throughput_bench(args.seconds)
    return (
        f"{b.rate:.0f} selectors/s ({b.candidates} in {b.elapsed:.2f}s); "
        f"expected 32-bit search {b.expected_seconds(32) / 3600:.1f} h per worker\n"
    ), EXIT_OK


COMMANDS = {
    "scan": cmd_scan,
    "selector": cmd_selector,
    "checksum": cmd_checksum,
    "derive": cmd_derive,
    "mine": cmd_mine,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except (UsageError, HeaderError, ak.SnapshotError, OSError, KeyError, ValueError) as e:
        print(f"sescan {args.command}: error: {e}", file=sys.stderr)
        if args.command == "scan":
            text, code = Report(errors=[{"file": None, "error": str(e)}]).to_json(), EXIT_ERROR
        else:
            return EXIT_ERROR
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 ok, 1 usage error, 2 invalid state encoding, 3 sampling
exhausted, 4 size cap exceeded, 5 replay mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .encoding import (
    decode_state,
    format_hex_record,
    parse_hex,
    parse_hex_records,
    sample_uniform_state,
    state_bits_from_bytes,
    state_to_bytes,
    bits_to_bytes,
)
from .errors import InvalidEncoding, SamplingExhausted, TooLarge
from .gch import GchState, basis_of
from .owf import OwfOutput, cc_owf, check_size, sample_circuit_family
from .prng import PrngStream
from . import verify

EXIT_USAGE, EXIT_ENCODING, EXIT_SAMPLING, EXIT_TOO_LARGE, EXIT_REPLAY = 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _records(args) -> list[tuple[int, bytes]]:
    """(n, bytes) records from --hex/--n or an --input file."""
    try:
        if args.input:
            with open(args.input) as fh:
                return parse_hex_records(fh)
        if args.hex is None or args.n is None:
            raise UsageError("give --n and --hex, or --input FILE")
        return [(args.n, parse_hex(args.hex))]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _need_seed(args) -> int:
    if args.seed is None:
        raise UsageError("this command needs --seed")
    return args.seed


# -- commands -----------------------------------------------------------------

def cmd_encode(args) -> str:
    lines = [args.state] if args.state else [ln for ln in sys.stdin.read().splitlines() if ln.strip()]
    out = []
    for line in lines:
        try:
            state = GchState.parse(line)
        except ValueError as exc:
            raise UsageError(f"bad state {line!r}: {exc}") from None
        out.append(format_hex_record(state.n, state_to_bytes(state)))
    return "\n".join(out)


def cmd_decode(args) -> str:
    out = []
    for n, data in _records(args):
        out.append(str(decode_state(state_bits_from_bytes(data, n), n)))
    return "\n".join(out)


def _eval_inputs(args) -> list[tuple[int, str]]:
    if args.random:
        if args.n is None:
            raise UsageError("--random needs --n")
        check_size(args.n)
        x, _ = sample_uniform_state(args.n, PrngStream.from_int(_need_seed(args)))
        return [(args.n, x)]
    return [(n, state_bits_from_bytes(data, n)) for n, data in _records(args)]


def cmd_eval(args) -> str:
    docs = []
    for n, x in _eval_inputs(args):
        out = cc_owf(x, n)
        docs.append({
            "n": n,
            "x": "0x" + bits_to_bytes(x).hex(),
            "state": str(decode_state(x, n)),
            "y_bits": len(out.y),
            "y": out.y,
            "circuit_bytes": len(out.circuit_bytes),
            "y_prime": "0x" + out.y_prime.hex(),
        })
    if args.json:
        return json.dumps(docs if len(docs) > 1 else docs[0], sort_keys=True)
    blocks = []
    for d in docs:
        blocks.append("\n".join([
            f"n={d['n']}",
            f"x={d['x']}",
            f"state={d['state']}",
            f"y_bits={d['y_bits']}",
            f"y={d['y']}",
            f"circuit_bytes={d['circuit_bytes']}",
            f"y_prime={d['y_prime']}",
        ]))
    return "\n".join(blocks)


def cmd_invert(args) -> str:
    lines = []
    for n, data in _records(args):
        try:
            target = OwfOutput.from_bytes(data, n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        hits = verify.brute_force_invert(target, n, cap=args.cap)
        lines.append(f"n={n}")
        lines.append(f"preimages={len(hits)}")
        for x in hits:
            lines.append(f"0x{bits_to_bytes(x).hex()} {decode_state(x, n)}")
    return "\n".join(lines)


def cmd_stats(args) -> str:
    if args.n is None:
        raise UsageError("stats needs --n")
    census = verify.collision_census(args.n)
    profile = None
    if args.seed is not None:
        sizes = [int(s) for s in args.sizes.split(",")]
        profile = verify.size_profile(sizes, args.seed)
        for row in profile:
            row.pop("seconds")  # wall time would break byte-identical replay
    if args.json:
        doc = json.loads(census.to_json())
        if profile is not None:
            doc["size_profile"] = profile
        return json.dumps(doc, sort_keys=True)
    lines = [census.to_text()]
    if profile is not None:
        lines.append("n gates bound layers_per_circuit")
        for row in profile:
            lines.append(f"{row['n']} {row['gates']} {row['bound']} {max(row['layers'])}")
    return "\n".join(lines)


def cmd_attack(args) -> str:
    if args.method not in ("reverse", "substitute"):
        raise UsageError("--method must be reverse or substitute")
    rate = verify.attack_trials(args.method, args.trials, PrngStream.from_int(_need_seed(args)), args.max_n)
    if args.json:
        return json.dumps({"method": args.method, "trials": args.trials, "success_rate": rate}, sort_keys=True)
    return f"method={args.method}\ntrials={args.trials}\nsuccess_rate={rate}"


def cmd_reduce(args) -> str:
    n = args.n
    check_size(n)
    if n > verify.FULL_ENUM_CAP:
        raise TooLarge("n", n, verify.FULL_ENUM_CAP)
    inputs = [x for x in verify._iter_candidates(n, None)]
    if args.trials is not None:
        stream = PrngStream.from_int(_need_seed(args))
        inputs = [inputs[stream.randbelow(len(inputs))] for _ in range(args.trials)]
    wins = 0
    for x in inputs:
        if args.theorem == 1:
            inst = verify.algorithm1_instance(n)
            got = verify.reduction_thm1(verify.exhaustive_inverter, inst, inst(x))
            wins += got is not None and inst.f2(got) == inst(x)
        else:
            state = decode_state(x, n)
            family = sample_circuit_family(basis_of(state))
            y = cc_owf(x, n).y
            got = verify.reduction_thm3(family, y, verify.exhaustive_inverter)
            wins += got is not None
    rate = wins / len(inputs)
    if args.json:
        return json.dumps({"theorem": args.theorem, "n": n, "instances": len(inputs), "success_rate": rate},
                          sort_keys=True)
    return f"theorem={args.theorem}\nn={n}\ninstances={len(inputs)}\nsuccess_rate={rate}"


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "eval": cmd_eval,
    "invert": cmd_invert,
    "stats": cmd_stats,
    "attack": cmd_attack,
    "reduce": cmd_reduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gchowf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, records=False, seed=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--manifest", metavar="FILE", help="write a run manifest to FILE")
        if records:
            p.add_argument("--n", type=int)
            p.add_argument("--hex", help="0x-prefixed hex value")
            p.add_argument("--input", metavar="FILE", help="n=<int> header plus hex lines")
        if seed:
            p.add_argument("--seed", type=_u64)
        return p

    p = common(sub.add_parser("encode", help="pretty state -> hex encoding"))
    p.add_argument("--state", help="e.g. '0 1 + - G{5,6}:00'; reads lines from stdin if absent")
    common(sub.add_parser("decode", help="hex encoding -> pretty state"), records=True)
    p = common(sub.add_parser("eval", help="evaluate the classical OWF"), records=True, seed=True)
    p.add_argument("--random", action="store_true", help="evaluate a uniformly sampled input")
    p = common(sub.add_parser("invert", help="brute-force preimages of y'"), records=True)
    p.add_argument("--cap", type=int, help="candidate limit, required above n=4")
    p = common(sub.add_parser("stats", help="collision census and size profile"), seed=True)
    p.add_argument("--n", type=int)
    p.add_argument("--sizes", default="4,8,12,16", help="comma-separated n values for the size profile")
    p = common(sub.add_parser("attack", help="reverse/substitute attacks on naive constructions"), seed=True)
    p.add_argument("--method", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-n", type=int, default=6)
    p = common(sub.add_parser("reduce", help="reduction harnesses with the exhaustive inverter"), seed=True)
    p.add_argument("--theorem", type=int, choices=(1, 3), required=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--trials", type=int, help="random subset size (needs --seed); default all inputs")
    p = sub.add_parser("replay", help="re-run a manifest and compare output digests")
    p.add_argument("--input", metavar="FILE", required=True)
    return parser


def _run(argv: Sequence[str]) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        return _replay(args.input)
    body = COMMANDS[args.command](args)
    if args.manifest:
        params = list(argv)
        i = params.index("--manifest")
        del params[i:i + 2]
        manifest = make_manifest(args.command, params, getattr(args, "seed", None), body)
        with open(args.manifest, "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    if args.command == "eval" and not args.json:
        manifest = make_manifest("eval", list(argv), args.seed, body)
        body += "\nmanifest=" + json.dumps(manifest, sort_keys=True)
    return 0, body


def make_manifest(command: str, argv: list[str], seed: Optional[int], body: str) -> dict:
    return {
        "command": command,
        "argv": argv,
        "seed": seed,
        "version": __version__,
        "output_sha256": hashlib.sha256(body.encode()).hexdigest(),
    }


def _replay(path: str) -> tuple[int, str]:
    with open(path) as fh:
        manifest = json.load(fh)
    argv = manifest["argv"]
    args = build_parser().parse_args(argv)
    body = COMMANDS[args.command](args)
    digest = hashlib.sha256(body.encode()).hexdigest()
    if digest != manifest["output_sha256"]:
        return EXIT_REPLAY, f"replay mismatch: {digest} != {manifest['output_sha256']}"
    return 0, f"replay ok {digest}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        code, text = _run(argv)
    except SystemExit as exc:  # argparse: --help, --version, bad flags
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidEncoding as exc:
        print(f"InvalidEncoding: {exc}", file=sys.stderr)
        return EXIT_ENCODING
    except SamplingExhausted as exc:
        print(f"SamplingExhausted: {exc}", file=sys.stderr)
        return EXIT_SAMPLING
    except TooLarge as exc:
        print(f"TooLarge: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface: ``ideals``, ``volume``, ``census`` and ``verify``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .census import ExponentBox, brute_force_oracle, run_census
from .ideals import enumerate_ideal_inventory
from .qfield import FieldError, make_field, make_place_set
from .report import ConfigError, RunConfig, verify
from .sunits import s_unit_basis
from .volume import DEFAULT_CAP, VolumeCapError, build_halfspaces, exact_volume, mc_volume

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_UNSATURATED = 3


def _primes(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None


def _context(d, primes):
    K = make_field(d)
    S = make_place_set(K, primes)
    return K, S, s_unit_basis(K, S)


def cmd_ideals(args) -> int:
    K, S, group = _context(args.d, args.s_primes)
    inv = enumerate_ideal_inventory(K, S, group, args.m)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["norm", "a", "b"])
    for norm, a, b in inv.rows():
        w.writerow([norm, str(a), str(b)])
    return EXIT_OK


def cmd_volume(args) -> int:
    p = build_halfspaces(args.n, args.s)
    out = {"n": args.n, "s": args.s}
    try:
        v = exact_volume(p, args.cap)
        out["exact"] = str(v)
    except VolumeCapError as exc:
        if not args.mc:
            print(str(exc), file=sys.stderr)
            return EXIT_CONFIG
        out["exact"] = None
    if args.mc:
        est, err = mc_volume(p, args.mc, args.seed)
        out["mc"] = est
        out["stderr"] = err
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def _census_once(args, group, proper_only):
    if args.oracle:
        return brute_force_oracle(group, args.n, args.m, args.q, args.coordinate_bound,
                                  proper_only, cap=args.cap or 1024)
    K, S = group.field, group.places
    inv = enumerate_ideal_inventory(K, S, group, args.m)
    return run_census(inv, args.n, args.q, ExponentBox.uniform(S.s, args.box), args.cap or 256,
                      proper_only)


def cmd_census(args) -> int:
    K, S, group = _context(args.d, args.s_primes)
    res = _census_once(args, group, args.proper_subsums_only)
    out = {"field": str(K), "s": S.s, "method": "oracle" if args.oracle else "structured"}
    out.update(res.to_dict())
    if args.proper_subsums_only:
        alt = _census_once(args, group, False)
        if alt.counts() != res.counts():
            out["all_subsets"] = alt.to_dict()
    text = json.dumps(out, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if args.fixture:
        path = Path(args.fixture)
        if path.exists():
            if json.loads(path.read_text()) != json.loads(text):
                print(f"fixture mismatch: {path}", file=sys.stderr)
                return EXIT_FAIL
        else:
            path.write_text(text)
    if not res.saturated:
        print("census did not saturate before the cap", file=sys.stderr)
        return EXIT_UNSATURATED
    return EXIT_OK


def cmd_verify(args) -> int:
    path = Path(args.config)
    try:
        config = RunConfig.from_json(path.read_text())
        if any(q < 3 for q in config.q_ladder):
            raise ConfigError("verify needs every q >= 3")
        code, csv_text, json_text = verify(config)
    except (ConfigError, FieldError, OSError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    csv_path = Path(args.csv or config.csv_path or path.with_suffix(".csv"))
    json_path = Path(args.json or config.json_path or path.with_suffix(".summary.json"))
    csv_path.write_text(csv_text)
    json_path.write_text(json_text)
    print(f"wrote {csv_path} and {json_path}")
    if code == EXIT_UNSATURATED:
        print("some census runs did not saturate", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sintsums", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ideals", help="print I(m) as CSV (norm, a, b)")
    p.add_argument("--d", required=True, help="squarefree d, or Q for the rationals")
    p.add_argument("--s-primes", type=_primes, default=[], help="comma separated primes")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_ideals)

    p = sub.add_parser("volume", help="exact c_{n,s} and optional Monte-Carlo estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--mc", type=int, default=0, metavar="SAMPLES")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("census", help="count u, |V|, |V*| for one q")
    p.add_argument("--d", required=True)
    p.add_argument("--s-primes", type=_primes, default=[])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--box", type=int, default=2, help="initial exponent radius")
    p.add_argument("--cap", type=int, default=None,
                   help="largest exponent radius (default 256) or coordinate bound (default 1024)")
    p.add_argument("--oracle", action="store_true", help="use the raw-element brute force")
    p.add_argument("--coordinate-bound", type=int, default=8)
    p.add_argument("--fixture", help="write the result here, or compare against it")
    p.add_argument("--proper-subsums-only", action="store_true")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="compare census counts with the main term over a q ladder")
    p.add_argument("--config", required=True)
    p.add_argument("--csv")
    p.add_argument("--json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
    try:
        return args.func(args)
    except (FieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 singular character, 64 usage
or configuration error.  Output files go to ``--out`` or, failing that, the
directory named by ``GALOIS_ORDERS_OUT`` (default: current directory).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .certify import certify_coprincipal, certify_principal
from .families import FamilyConfig, make_family
from .modules import CharacterPoint, SingularCharacter, build_cyclic_module, report_csv, report_json
from .sampling import generic_point
from .skew import evaluate, skew_mul
from .symmetry import is_invariant

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_SINGULAR, EXIT_USAGE = 0, 1, 2, 3, 64
OUT_ENV = "GALOIS_ORDERS_OUT"
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_schema() -> dict:
    return json.loads(resources.files("galois_orders").joinpath("schema/config.schema.json").read_text())


def validate_config(data: dict) -> None:
    """Schema validation with one readable line per problem."""
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            where = "/".join(str(p) for p in e.absolute_path) or "(top level)"
            lines.append(f"  {where}: {e.message}")
        raise UsageError("invalid configuration:\n" + "\n".join(lines))


def _int_list(text: str, what: str) -> list[int]:
    try:
        out = [int(v) for v in text.split(",") if v.strip()] if text.strip() else []
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers, got {text!r}") from None
    return out


def build_config(args) -> dict:
    """Merge the optional JSON file with command-line overrides and validate."""
    data: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"configuration file {path} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: not valid JSON ({e})") from None
        if not isinstance(data, dict):
            raise UsageError(f"{path}: top level must be an object")
    if args.family:
        data["family"] = args.family
    if args.r is not None:
        data["r"] = _int_list(args.r, "--r")
    if args.pi is not None:
        data["pi"] = _int_list(args.pi, "--pi")
    if args.n is not None:
        data["n"] = args.n
    if args.J is not None:
        data["J"] = _int_list(args.J, "--J")
    if args.f_kind is not None:
        data["f_kind"] = args.f_kind
    if args.f_degree is not None:
        data["f_degree"] = args.f_degree
    if "family" not in data:
        raise UsageError("no family given (use --family or a configuration file)")
    validate_config(data)
    return data


def _family(data: dict):
    try:
        cfg = FamilyConfig.from_dict(data)
        return cfg, *make_family(cfg)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUT_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _generator(gens: dict, name: str):
    if name not in gens:
        raise UsageError(f"unknown generator {name!r}; available: {', '.join(gens)}")
    return gens[name]


# -- commands ------------------------------------------------------------------


def cmd_certify(args) -> int:
    data = build_config(args)
    cfg, setting, gens = _family(data)
    opts = data.get("certify", {})
    samples = args.samples if args.samples is not None else opts.get("samples", 20)
    seed = args.seed if args.seed is not None else opts.get("seed", DEFAULT_SEED)
    bound = args.bound if args.bound is not None else opts.get("bound", 8)
    if cfg.family == "qogz":
        cert = certify_coprincipal(setting, gens, samples, seed, bound, opts.get("allow_opposite", True))
    else:
        cert = certify_principal(setting, gens, samples, seed, bound)
    payload = {"config": cfg.to_dict(), "setting": setting.name, "generators": list(gens), "certificate": cert.to_json()}
    path = _out_dir(args) / (args.name or "certificate.json")
    write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"{setting.name}: {cert.kind} {cert.verdict}")
    if cert.counterexample:
        print(f"  {cert.counterexample}")
    print(f"  certificate written to {path}")
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(cert.verdict, EXIT_INCONCLUSIVE)


def cmd_evaluate(args) -> int:
    data = build_config(args)
    _, setting, gens = _family(data)
    X = _generator(gens, args.generator)
    try:
        a = setting.vt.parse(args.gamma)
    except (SyntaxError, KeyError, ZeroDivisionError) as e:
        raise UsageError(f"cannot parse {args.gamma!r}: {e}") from None
    v = evaluate(X, a)
    print(v)
    ok = v.is_laurent() and (not is_invariant(setting.group, a) or is_invariant(setting.group, v))
    if not v.is_laurent():
        print("  (not a Laurent polynomial)")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_multiply(args) -> int:
    data = build_config(args)
    _, setting, gens = _family(data)
    prod = setting.ring.one()
    for name in args.generators:
        prod = skew_mul(prod, _generator(gens, name))
    print(prod.to_text())
    if args.json:
        path = _out_dir(args) / args.json
        write_atomic(path, json.dumps({"product": args.generators, "terms": prod.to_json()}, indent=2) + "\n")
    return EXIT_PASS


def _seed_point(setting, spec, q, rng):
    if spec is None:
        return generic_point(setting, rng, q)
    if isinstance(spec, str):
        spec = [v for v in spec.split(",") if v.strip()]
    try:
        if isinstance(spec, dict):
            return CharacterPoint.from_mapping(setting.vt, {k: Fraction(v) for k, v in spec.items()}, q)
        return CharacterPoint(setting.vt, tuple(Fraction(v) for v in spec), q)
    except (ValueError, KeyError, ZeroDivisionError) as e:
        raise UsageError(f"bad seed point: {e}") from None


def cmd_module(args) -> int:
    data = build_config(args)
    cfg, setting, gens = _family(data)
    opts = data.get("module", {})
    depth = args.depth if args.depth is not None else opts.get("depth", 2)
    if not 0 <= depth <= 12:
        raise UsageError("depth must lie in 0..12")
    side = args.side or opts.get("side") or ("left" if cfg.family == "qogz" else "right")
    q = args.q if args.q is not None else opts.get("q")
    try:
        q = Fraction(q) if q is not None else None
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad q value {q!r}") from None
    rng = random.Random(args.seed if args.seed is not None else DEFAULT_SEED)
    seed = _seed_point(setting, args.point if args.point is not None else opts.get("seed"), q, rng)
    try:
        m = build_cyclic_module(setting, gens, seed, depth, side)
    except SingularCharacter as e:
        print(str(e), file=sys.stderr)
        return EXIT_SINGULAR
    out = _out_dir(args)
    stem = args.name or "module"
    write_atomic(out / f"{stem}.json", report_json(m))
    write_atomic(out / f"{stem}.csv", report_csv(m))
    dims = sorted(set(m.weights.values()))
    print(f"{setting.name}: {m.dimension} basis vectors, {len(m.weights)} weights, dimensions {dims}"
          f"{' (truncated)' if m.truncated else ''}")
    print(f"  reports written to {out / (stem + '.json')} and {out / (stem + '.csv')}")
    return EXIT_PASS


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = run_selftest(args.seed if args.seed is not None else DEFAULT_SEED, args.bad_convention, args.verbose)
    return EXIT_PASS if ok else EXIT_FAIL


# -- parser --------------------------------------------------------------------


def _family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--family", choices=["Xf", "ogz", "qogz", "finiteW"])
    p.add_argument("--r", help="signature, e.g. 1,2")
    p.add_argument("--pi", help="shape, e.g. 1,2")
    p.add_argument("--n", type=int, help="number of variables for Xf")
    p.add_argument("--J", help="parabolic set, e.g. 1,3 (empty string for none)")
    p.add_argument("--f-kind", choices=["power", "power_sum"], help="Xf: choice of f")
    p.add_argument("--f-degree", type=int, help="Xf: exponent in f")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    p.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED})")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="galois-orders", description="Certify Galois orders and build Gelfand-Zeitlin modules.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("certify", help="certify a family as a (co-)principal Galois order")
    _family_args(p)
    p.add_argument("--samples", type=int, help="random spot-check products (default 20)")
    p.add_argument("--bound", type=int, help="monoid search box (default 8)")
    p.add_argument("--name", help="certificate file name")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("evaluate", help="evaluate a generator on a field element")
    _family_args(p)
    p.add_argument("generator")
    p.add_argument("gamma", help="expression such as 'x[1,1] + x[1,2]'")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("multiply", help="multiply generators left to right")
    _family_args(p)
    p.add_argument("generators", nargs="+")
    p.add_argument("--json", help="also write the product to this file in the output directory")
    p.set_defaults(func=cmd_multiply)

    p = sub.add_parser("module", help="build a truncated cyclic Gelfand-Zeitlin module")
    _family_args(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--side", choices=["left", "right"])
    p.add_argument("--q", help="value of q for multiplicative settings (default 2)")
    p.add_argument("--point", help="seed coordinates, comma-separated (default: sampled)")
    p.add_argument("--name", help="report file stem (default 'module')")
    p.set_defaults(func=cmd_module)

    p = sub.add_parser("selftest", help="run the property suites at small sizes")
    p.add_argument("--seed", type=int)
    p.add_argument("--verbose", action="store_true", help="print per-suite timings")
    p.add_argument("--bad-convention", action="store_true",
                   help="place OGZ shifts left of their coefficients (must fail)")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"galois-orders: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

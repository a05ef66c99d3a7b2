"""Command-line interface.

Exit status: 0 on success, 2 when a mathematical check fails (the report
names the violated inequality), 1 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from fractions import Fraction

from . import conjugacy as conj
from . import dynamics as dyn
from . import symbolic as sym
from .disk import Disk, parse_region
from .errors import CertificationError, EscapeError, PadicError
from .padic import PadicNumber, Radius, check_prime, parse_padic, parse_radius
from .poly import (
    GUARD_DIGITS,
    evaluate,
    newton_polygon_data,
    newton_root_count,
    parse_polynomial,
    parse_rational_polynomial,
    unique_root_in_disk,
)

DEFAULTS = {
    "p": 3,
    "precision": 64,
    "seed": 0,
    "format": "text",
    "target": "p^-10",
    "depth": 10,
    "d": 2,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class RunConfig:
    def __init__(self, p: int, precision: int, seed: int, fmt: str):
        check_prime(p)
        if precision < 8:
            raise UsageError("precision must be at least 8")
        if fmt not in ("text", "records"):
            raise UsageError("format must be text or records")
        self.p = p
        self.precision = precision
        self.seed = seed
        self.format = fmt

    @property
    def work(self) -> int:
        return self.precision + GUARD_DIGITS

    def number(self, text: str):
        try:
            return parse_padic(text, self.p, self.work)
        except ValueError:
            pass
        # a constant expression such as (x - 1/2)/p
        cs = parse_rational_polynomial(text, self.p)
        if len(cs) > 1:
            raise ValueError(f"expected a number, got a polynomial: {text!r}")
        return PadicNumber.from_rational(cs[0] if cs else Fraction(0), self.p, self.work)

    def poly(self, text: str):
        return parse_polynomial(text, self.p, self.precision)

    def region(self, text: str):
        return parse_region(text, self.p, self.work)


class Report:
    """Collects output lines; text mode prints ``key: value``, records mode JSON lines."""

    def __init__(self, cfg: RunConfig, out):
        self.cfg = cfg
        self.out = out

    def emit(self, kind: str, **fields):
        if self.cfg.format == "records":
            rec = {"record": kind}
            rec.update({k: _jsonable(v) for k, v in fields.items()})
            self.out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            body = ", ".join(f"{k}={_text(v)}" for k, v in fields.items())
            self.out.write(f"{kind}: {body}\n" if body else f"{kind}\n")


def _jsonable(v):
    if hasattr(v, "to_record"):
        return v.to_record()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, sym.ItineraryWord):
        return str(v)
    return v


def _text(v):
    if isinstance(v, Radius):
        return str(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_text(x) for x in v) + "]"
    if isinstance(v, dict):
        return json.dumps(_jsonable(v), sort_keys=True)
    return str(v)


# --------------------------------------------------------------------------
# subcommands


def cmd_eval(cfg, a, rep):
    f = cfg.poly(a.poly)
    z = cfg.number(a.z)
    rep.emit("value", value=evaluate(f, z))


def _disk(cfg, a):
    return Disk(cfg.number(a.center), parse_radius(a.radius))


def cmd_newton_count(cfg, a, rep):
    f = cfg.poly(a.poly)
    disk = _disk(cfg, a)
    n = newton_root_count(f, disk)
    polygon = [{"index": k, "term": r} for k, r in newton_polygon_data(f, disk)]
    rep.emit("count", count=n, polygon=polygon)


def cmd_root_in_disk(cfg, a, rep):
    f = cfg.poly(a.poly)
    root = unique_root_in_disk(f, _disk(cfg, a))
    rep.emit("root", root=root, residual=evaluate(f, root))


def _context(cfg, a):
    return dyn.build_context(cfg.poly(a.poly), cfg.region(a.region))


def cmd_preimages(cfg, a, rep):
    ctx = _context(cfg, a)
    target = Disk(cfg.number(a.center), parse_radius(a.radius))
    for z, R in dyn.preimage_disks(ctx, target):
        rep.emit("preimage", center=z, radius=R)


def _emit_context(rep, ctx):
    rep.emit(
        "context",
        region=str(ctx.region),
        **{"lambda": ctx.lam, "delta": ctx.delta, "mu": ctx.mu, "M": ctx.bigM},
    )


def cmd_certify(cfg, a, rep):
    ctx = _context(cfg, a)
    _emit_context(rep, ctx)
    rep.emit("backward_invariance", certificate=ctx.certificate)


def cmd_tau(cfg, a, rep):
    ctx = _context(cfg, a)
    idx = range(ctx.degree + 1) if a.index is None else [int(a.index)]
    for i in idx:
        rep.emit("tau", index=i, tau=dyn.tau_threshold(i, ctx))


def _emit_trace(rep, value, tr):
    rep.emit(
        "conjugate",
        value=value,
        depth=tr.depth,
        corrections=list(tr.corrections),
        certified_error=tr.certified_error,
    )


def cmd_conjugate(cfg, a, rep):
    f = cfg.poly(a.f)
    g = cfg.poly(a.g)
    ctx = dyn.build_context(f, cfg.region(a.region))
    problem = conj.neighborhood_check(f, g, ctx)
    rep.emit("problem", route=problem.route, drift=problem.drift, mu=ctx.mu)
    value, tr = conj.conjugate_point(problem, cfg.number(a.z), parse_radius(a.target), trace=True)
    _emit_trace(rep, value, tr)


def cmd_thm23(cfg, a, rep):
    d = int(a.d)
    c = cfg.number(a.c)
    c2 = cfg.number(a.c2)
    target = parse_radius(a.target)
    ev = conj.theorem_2_3_conjugacy(d, c, c2, target)
    ctx = ev.problem.ctx
    _emit_context(rep, ctx)
    if a.z is not None:
        z = cfg.number(a.z)
    else:
        z = conj.find_repelling_fixed_point(ctx.map, ctx.region)
        rep.emit("fixed_point", point=z)
    tr = ev.trace(z)
    value = tr.backward_values[0]
    _emit_trace(rep, value, tr)
    if a.z is None:
        rep.emit("fixed_point_residual", residual=conj.fixed_point_residual(ev.problem, z, target))


def cmd_itinerary(cfg, a, rep):
    w = sym.itinerary(cfg.number(a.z), int(a.depth))
    rep.emit("word", word=str(w))


def cmd_decode(cfg, a, rep):
    region = sym.decode(sym.ItineraryWord.parse(a.word), cfg.p, cfg.work)
    if isinstance(region, Disk):
        rep.emit("disk", center=region.center, radius=region.radius)
    else:
        for d in region.disks:
            rep.emit("disk", center=d.center, radius=d.radius)


def cmd_cor42(cfg, a, rep):
    n = int(a.depth)
    pipe = sym.Corollary42(cfg.number(a.c), cfg.work)
    if a.z is not None:
        z = cfg.number(a.z)
    else:
        rng = random.Random(cfg.seed)
        w = sym.ItineraryWord.parse(a.word) if a.word else sym.ItineraryWord(tuple(rng.randrange(2) for _ in range(n)))
        z = pipe.julia_point(w)
        rep.emit("point", word=str(w), point=z)
    word = pipe.word(z, n)
    ok = pipe.equivariance_holds(z, n)
    rep.emit("cor42", word=str(word), equivariance=ok)
    if not ok:
        raise CertificationError("shift equivariance failed")


COMMANDS = {
    "eval": (cmd_eval, ["poly", "z"]),
    "newton-count": (cmd_newton_count, ["poly", "center", "radius"]),
    "root-in-disk": (cmd_root_in_disk, ["poly", "center", "radius"]),
    "preimages": (cmd_preimages, ["poly", "region", "center", "radius"]),
    "certify": (cmd_certify, ["poly", "region"]),
    "tau": (cmd_tau, ["poly", "region", "index?"]),
    "conjugate": (cmd_conjugate, ["f", "g", "region", "z", "target?"]),
    "thm23": (cmd_thm23, ["d?", "c", "c2", "z?", "target?"]),
    "itinerary": (cmd_itinerary, ["z", "depth?"]),
    "decode": (cmd_decode, ["word"]),
    "cor42": (cmd_cor42, ["c", "depth?", "z?", "word?"]),
}

HELP = {
    "eval": "evaluate a polynomial at a point",
    "newton-count": "number of roots in a closed disk",
    "root-in-disk": "the unique root in a closed disk",
    "preimages": "preimage disks of a small disk around a point of B",
    "certify": "build and certify the expansion context of a map on a region",
    "tau": "perturbation thresholds",
    "conjugate": "evaluate the conjugacy from f to g at a point",
    "thm23": "conjugacy between z^d + c and z^d + c2",
    "itinerary": "itinerary of a point under z(z-1)/p",
    "decode": "disk of points with a given itinerary prefix",
    "cor42": "itinerary of a Julia point of z^2 + c through the conjugacy chain",
}


def _global_options(parser, default):
    parser.add_argument("--p", type=int, default=default)
    parser.add_argument("--precision", type=int, default=default)
    parser.add_argument("--seed", type=int, default=default)
    parser.add_argument("--format", choices=["text", "records"], default=default)
    parser.add_argument("--config", default=default, help="file of key=value lines supplying option values")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="padicdyn", description="p-adic polynomial dynamics toolkit")
    _global_options(parser, None)
    # the same options are accepted after the subcommand name
    common = _Parser(add_help=False)
    _global_options(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, opts) in COMMANDS.items():
        sp = sub.add_parser(name, help=HELP[name], parents=[common])
        for opt in opts:
            opt = opt.rstrip("?")
            sp.add_argument(f"--{opt}")
    return parser


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"config line without '=': {line!r}")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(args, name: str):
    """Command-line value, else config value, else built-in default."""
    v = getattr(args, name, None)
    if v is None:
        v = args._config.get(name)
    if v is None:
        v = DEFAULTS.get(name)
    return v


_NEGATIVE = re.compile(r"^-[0-9p(.]")


def _join_negative_values(argv):
    """``--c -7/36`` -> ``--c=-7/36`` so that negative literals are not read as flags."""
    out = []
    i = 0
    argv = list(argv)
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(_join_negative_values(argv))
        args._config = read_config(args.config) if args.config else {}
        if not args.command:
            raise UsageError("a subcommand is required")
        cfg = RunConfig(
            int(_resolve(args, "p")),
            int(_resolve(args, "precision")),
            int(_resolve(args, "seed")),
            str(_resolve(args, "format")),
        )
        func, opts = COMMANDS[args.command]
        for opt in opts:
            required = not opt.endswith("?")
            name = opt.rstrip("?")
            value = _resolve(args, name)
            if value is None and required:
                raise UsageError(f"{args.command}: --{name} is required")
            setattr(args, name, value)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    rep = Report(cfg, out)
    try:
        func(cfg, args, rep)
    except PadicError as exc:
        rec = exc.as_record() if isinstance(exc, CertificationError) else {
            "error": type(exc).__name__,
            "message": str(exc),
        }
        if isinstance(exc, EscapeError):
            rec["step"] = exc.step
        escaping = getattr(exc, "escaping_disk", None)
        if escaping is not None:
            rec["escaping_disk"] = escaping.to_record()
        rep.emit("failure", **rec)
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    return 0


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: construct, verify, scan, classify, frames.

Reports go to stdout (or ``--out``) as JSON; diagnostics go to stderr.
Exit codes: 0 ok, 1 check failed, 2 bad config, 3 construction or domain
error, 4 undecidable predicate.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cayley_menger import (
    InconsistentSeed,
    embed,
    generalized_volume,
    membership_residuals,
    reconstruct_all,
    seed_from,
)
from .complexes import (
    DegenerateEdge,
    InvalidN,
    build_bipyramid,
    build_subdivided,
    check_nondegeneracy,
    edge_lengths_sq,
)
from .constructions import (
    PAPER_PARAMS,
    PRINCIPAL,
    CollinearFrame,
    DegenerateParams,
    OutOfFlexDomain,
    Type1Params,
    fitting_pair_check,
    flex8_domain,
    flex8_realization,
    flex8_source,
    omega_check,
    omega_residuals,
    place_vertex_N,
    random_type1_params,
    type1_construct,
    type1_points,
    type3_pose,
    type3_pose_projective,
    type3_source,
)
from .galois import TargetOutOfRange, classify_source, flat_pose_scan, two_ones_consequences
from .intersections import embedded_bracket, scan_polyhedron
from .numeric import NegativeRadicand, SignUndecidable, format_scalar, is_exact, parse_scalar, set_precision, within
from .serialization import dumps, load_realization, realization_to_json, write_obj

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CONSTRUCTION, EXIT_UNDECIDABLE = 0, 1, 2, 3, 4

CONFIG_KEYS = {
    "command", "construction", "params", "t", "a", "with_n", "branch", "realization",
    "samples", "count", "range", "random", "obj", "out", "precision_bits",
    "max_precision_bits", "seed",
}
DEFAULT_TOL = Fraction(1, 2 ** 64)


class ConfigError(ValueError):
    pass


# -- argument parsing ---------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    kw = {"default": argparse.SUPPRESS} if suppress else {"default": None}
    parser.add_argument("--precision-bits", type=int, help="working precision (default 128)", **kw)
    parser.add_argument("--max-precision-bits", type=int, help="refinement limit (default 1024)", **kw)
    parser.add_argument("--config", help="JSON config file", **kw)
    parser.add_argument("--out", help="output file (directory for frames)", **kw)
    parser.add_argument("--seed", type=int, help="seed for randomized sweeps", **kw)


def _source_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_mutually_exclusive_group()
    g.add_argument("--type1", dest="construction", action="store_const", const="type1",
                   help="line-symmetric construction from six parameters")
    g.add_argument("--type3", dest="construction", action="store_const", const="type3",
                   help="rational Type III motion")
    g.add_argument("--flex8", dest="construction", action="store_const", const="flex8",
                   help="radical flex in the apex height a")
    parser.add_argument("--params", help='six parameters "t,a,x3,y3,z3,mu" (p/q or decimals)')
    parser.add_argument("--t", help='Type III parameter, or "inf"')
    parser.add_argument("--a", help="apex height for --flex8")
    parser.add_argument("--branch", help='radical branch "sign_t,sign_inner" (default "-1,1")')
    parser.add_argument("--with-n", dest="with_n", action="store_true", default=None,
                        help="add vertex N (8-vertex polyhedron)")
    parser.add_argument("--realization", help="realization JSON or OBJ file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flexbipyramid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command")
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    _source_flags(common)

    p = sub.add_parser("construct", parents=[common], help="write a realization")
    p.add_argument("--obj", help="also write an OBJ mesh")
    p = sub.add_parser("verify", parents=[common], help="run flex and identity checks")
    p.add_argument("--samples", type=int)
    p.add_argument("--random", type=int, help="also check N random Type I parameter sets")
    p = sub.add_parser("scan", parents=[common], help="face self-intersection scan")
    p.add_argument("--samples", type=int, help="scan a flex at this many parameter values")
    p.add_argument("--range", choices=["domain", "embedded"])
    sub.add_parser("classify", parents=[common], help="sign-group classification of a motion")
    p = sub.add_parser("frames", parents=[common], help="export an OBJ frame sequence")
    p.add_argument("--count", type=int)
    p.add_argument("--range", choices=["domain", "embedded"])
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(data) - CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        cfg.update(data)
    for key, val in vars(args).items():
        if key == "config" or val is None:
            continue
        if key == "command" and "command" in cfg and cfg["command"] != val:
            raise ConfigError(f"config command {cfg['command']!r} conflicts with {val!r}")
        cfg[key] = val
    if not cfg.get("command"):
        raise ConfigError("no subcommand given")
    cfg.setdefault("precision_bits", 128)
    cfg.setdefault("max_precision_bits", 1024)
    cfg.setdefault("seed", 0)
    for key in ("precision_bits", "max_precision_bits", "seed", "samples", "count", "random"):
        if key in cfg and cfg[key] is not None and not isinstance(cfg[key], int):
            raise ConfigError(f"{key} must be an integer")
    if cfg["precision_bits"] <= 0 or cfg["max_precision_bits"] < cfg["precision_bits"]:
        raise ConfigError("need 0 < precision_bits <= max_precision_bits")
    return cfg


def _parse_params(text) -> Type1Params:
    try:
        vals = text.split(",") if isinstance(text, str) else list(text)
        return Type1Params.parse([parse_scalar(v) for v in vals])
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad --params: {exc}") from exc


def _parse_branch(text) -> tuple:
    if text is None:
        return PRINCIPAL
    try:
        vals = tuple(int(v) for v in (text.split(",") if isinstance(text, str) else text))
    except ValueError as exc:
        raise ConfigError(f"bad --branch: {exc}") from exc
    if len(vals) != 2 or any(v not in (-1, 1) for v in vals):
        raise ConfigError("branch must be two signs, e.g. -1,1")
    return vals


def _scalar_arg(cfg, key, default):
    val = cfg.get(key)
    if val is None:
        return default
    if key == "t" and str(val).lower() in ("inf", "oo", "infinity"):
        return "inf"
    try:
        return parse_scalar(val)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad --{key}: {exc}") from exc


def _construction(cfg) -> str:
    kind = cfg.get("construction")
    if kind is None and not cfg.get("realization"):
        raise ConfigError("choose --type1, --type3, --flex8 or --realization")
    if kind not in (None, "type1", "type3", "flex8"):
        raise ConfigError(f"unknown construction {kind!r}")
    return kind


def _describe(cfg) -> dict:
    kind = cfg.get("construction")
    out = {"type": kind}
    if kind == "type1":
        out["params"] = [format_scalar(v) for v in _parse_params(cfg.get("params", _paper_text())).astuple()]
    elif kind == "type3":
        t = _scalar_arg(cfg, "t", Fraction(0))
        out["t"] = t if t == "inf" else format_scalar(t)
    elif kind == "flex8":
        out["a"] = format_scalar(_scalar_arg(cfg, "a", Fraction(1)))
        out["branch"] = list(_parse_branch(cfg.get("branch")))
        out["with_n"] = bool(cfg.get("with_n"))
    return out


def _paper_text() -> str:
    return ",".join(str(v) for v in PAPER_PARAMS.astuple())


def _realize(cfg):
    """(realization, complex) for the configured construction."""
    if cfg.get("realization"):
        try:
            rho = load_realization(cfg["realization"])
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load realization: {exc}") from exc
        cx = build_subdivided() if "N" in rho else build_bipyramid(5)
        return rho, cx
    kind = _construction(cfg)
    with_n = bool(cfg.get("with_n"))
    if kind == "type1":
        rho = type1_construct(_parse_params(cfg.get("params", _paper_text())))[1]
    elif kind == "type3":
        rho = type3_pose(_scalar_arg(cfg, "t", Fraction(0)))
    else:
        rho = flex8_realization(_scalar_arg(cfg, "a", Fraction(1)), _parse_branch(cfg.get("branch")))
    if with_n:
        rho = place_vertex_N(rho)
    return rho, build_subdivided() if with_n else build_bipyramid(5)


# -- commands -------------------------------------------------------------------


def _meta(cfg) -> dict:
    return {"precision_bits": cfg["precision_bits"], "max_precision_bits": cfg["max_precision_bits"]}


def cmd_construct(cfg) -> tuple[int, dict]:
    rho, cx = _realize(cfg)
    meta = {"construction": _describe(cfg) if cfg.get("construction") else None, **_meta(cfg)}
    out = realization_to_json(rho, meta)
    if cfg.get("obj"):
        Path(cfg["obj"]).write_text(write_obj(rho, cx))
        out["obj"] = str(cfg["obj"])
    return EXIT_OK, out


def _check(name, ok, **detail) -> dict:
    return {"name": name, "pass": bool(ok), **detail}


def _identity_checks(rho, tol=None) -> list[dict]:
    cp = embed(rho.restrict([k for k in rho.labels if k not in ("0", "N")]))
    res = membership_residuals(cp)
    zero = (lambda x: within(x, tol)) if tol is not None else (lambda x: is_exact(x) and x == 0)
    return [_check("cm_identity", all(zero(v) for v in res.values())),
            _check("zero_sum", zero(generalized_volume(cp)),
                   value=format_scalar(generalized_volume(cp)))]


def _lengths_constant(samples, cx, tol) -> dict:
    base = edge_lengths_sq(samples[0], cx)
    bad = [i for i, r in enumerate(samples[1:], 1) if not base.equals(edge_lengths_sq(r, cx), tol)]
    return _check("edge_lengths_constant", not bad, samples=len(samples), failing_samples=bad)


def _type3_samples(count: int) -> list:
    half = (count + 1) // 2
    ts = [Fraction(-1) + Fraction(2 * i, half - 1) for i in range(half)] if half > 1 else [Fraction(0)]
    us = [Fraction(-1) + Fraction(2 * i, count - half + 1) for i in range(1, count - half + 1)]
    return [("t", t) for t in ts] + [("1/t", u) for u in us]


def cmd_verify(cfg) -> tuple[int, dict]:
    checks = []
    kind = cfg.get("construction")
    if cfg.get("realization"):
        rho, cx = _realize(cfg)
        ref = None
        data = json.loads(Path(cfg["realization"]).read_text()) if str(cfg["realization"]).endswith(".json") else {}
        desc = data.get("construction") if isinstance(data, dict) else None
        if kind is not None:
            ref = _realize({**cfg, "realization": None})[0]
        elif desc:
            ref = _realize(_config_from_description(desc, cfg))[0]
        if ref is not None:
            checks.append(_lengths_constant([ref, rho], cx, DEFAULT_TOL))
        checks += _identity_checks(rho, None if rho.is_exact() else DEFAULT_TOL)
    elif _construction(cfg) == "type3":
        n = cfg.get("samples") or 17
        poses = [type3_pose_projective(x, 1) if ch == "t" else type3_pose_projective(1, x)
                 for ch, x in _type3_samples(n)]
        cx = build_bipyramid(5)
        checks.append(_lengths_constant(poses, cx, None))
        checks.append(_check("nondegenerate", check_nondegeneracy(poses, cx).ok))
        checks += [c for r in poses[:3] for c in _identity_checks(r)]
        fp = flat_pose_scan(type3_source(), 33)
        flats = [("t" if br == "t" else "1/t", format_scalar(x)) for br, x in fp.flat]
        checks.append(_check("flat_poses_at_0_and_inf", flats == [("t", "0"), ("1/t", "0")],
                             flat=[list(f) for f in flats]))
        cp = embed(poses[1])
        rec = reconstruct_all(seed_from(cp))
        checks.append(_check("reconstruction", rec.d == cp.d))
    elif kind == "type1":
        params = _parse_params(cfg.get("params", _paper_text()))
        fp_, rho = type1_construct(params)
        rep = fitting_pair_check(fp_)
        checks.append(_check("omega", omega_check(params).ok))
        checks.append(_check("fitting_pair", rep.ok, distance_case=rep.distance_case))
        checks += _identity_checks(rho)
        cp = embed(rho)
        checks.append(_check("s12_plus_s45", cp.s[("1", "2")] + cp.s[("4", "5")] == 0))
        two = two_ones_consequences(edge_lengths_sq(rho, build_bipyramid(5)), (1, 0, 0, 1, 0))
        checks.append(_check("two_ones_equal_lengths", two.equal_lengths))
    else:
        n = cfg.get("samples") or 9
        dom = flex8_domain()
        src = flex8_source(dom, with_n=bool(cfg.get("with_n")))
        br = _parse_branch(cfg.get("branch"))
        poses = [src(a, br) for a in dom.samples(n)]
        cx = build_subdivided() if cfg.get("with_n") else build_bipyramid(5)
        checks.append(_lengths_constant(poses, cx, DEFAULT_TOL))
        checks.append(_check("nondegenerate", check_nondegeneracy(poses, cx, DEFAULT_TOL).ok))
        checks.append(_check("omega", all(within(r, DEFAULT_TOL) for p in poses
                                          for r in omega_residuals(_with_zero(p)))))
        checks += [c for r in poses[:2] for c in _identity_checks(r, DEFAULT_TOL)]
    if cfg.get("random"):
        checks.append(_random_type1_sweep(cfg["random"], cfg["seed"]))
    ok = all(c["pass"] for c in checks)
    return (EXIT_OK if ok else EXIT_CHECK), {"pass": ok, "checks": checks, **_meta(cfg)}


def _with_zero(rho):
    # vertex 0 sits on segment 15 at the fixed ratio mu = 2/7
    mu = Fraction(2, 7)
    p0 = tuple(mu * x + (1 - mu) * y for x, y in zip(rho["1"], rho["5"]))
    return {**{k: rho[k] for k in rho.labels}, "0": p0}


def _random_type1_sweep(count: int, seed: int) -> dict:
    rng = random.Random(seed)
    fails = 0
    for _ in range(count):
        p = random_type1_params(rng)
        if not omega_check(type1_points(p)).ok:
            fails += 1
    return _check("omega_random_sweep", fails == 0, count=count, seed=seed)


def _config_from_description(desc, cfg) -> dict:
    out = {**cfg, "realization": None, "construction": desc.get("type")}
    for key in ("params", "t", "a", "branch", "with_n"):
        if key in desc:
            val = desc[key]
            out[key] = ",".join(v if isinstance(v, str) else v["value"] for v in val) if key == "params" \
                else (val["value"] if isinstance(val, dict) else val)
    return out


def _flex_samples(cfg, with_n: bool, count: int):
    dom = flex8_domain()
    src = flex8_source(dom, with_n=with_n)
    br = _parse_branch(cfg.get("branch"))
    rng = cfg.get("range") or ("embedded" if with_n else "domain")
    lo, hi = dom.inner
    if rng == "embedded":
        cx = build_subdivided() if with_n else build_bipyramid(5)
        lo, hi = embedded_bracket(src, cx, Fraction(1), dom.inner, branch=br).inner
    xs = [lo + (hi - lo) * Fraction(i, count - 1) for i in range(count)] if count > 1 else [(lo + hi) / 2]
    return src, br, xs, rng, (lo, hi)


def cmd_scan(cfg) -> tuple[int, dict]:
    if cfg.get("samples") and cfg.get("construction") == "flex8":
        with_n = bool(cfg.get("with_n"))
        src, br, xs, rng, bounds = _flex_samples(cfg, with_n, cfg["samples"])
        cx = build_subdivided() if with_n else build_bipyramid(5)
        reports = [scan_polyhedron(src(x, br), cx) for x in xs]
        margins = [r.min_separation_sq for r in reports if r.min_separation_sq is not None]
        out = {
            "range": rng, "bounds": [format_scalar(b) for b in bounds],
            "samples": [{"a": format_scalar(x), **r.to_json()} for x, r in zip(xs, reports)],
            "improper_total": sum(r.improper_count for r in reports),
            "undecided_total": sum(len(r.undecided) for r in reports),
            "worst_min_separation_sq": format_scalar(min(margins)) if margins else None,
        }
        undecided = out["undecided_total"]
    else:
        rho, cx = _realize(cfg)
        rep = scan_polyhedron(rho, cx)
        out = {**rep.to_json(), "pairs_checked": len(rep.pairs) + len(rep.undecided)}
        undecided = len(rep.undecided)
    out.update(_meta(cfg))
    return (EXIT_UNDECIDABLE if undecided else EXIT_OK), out


def cmd_classify(cfg) -> tuple[int, dict]:
    kind = _construction(cfg)
    if kind == "type3":
        src = type3_source()
    elif kind == "flex8":
        src = flex8_source()
    else:
        raise ConfigError("classify needs a motion: --type3 or --flex8")
    res, fibers = classify_source(src)
    return EXIT_OK, {**res.to_json(), "fiber_sizes": [len(f) for f in fibers],
                     "complete": False, **_meta(cfg)}


def cmd_frames(cfg) -> tuple[int, dict]:
    kind = _construction(cfg)
    count = cfg.get("count") or 24
    if count < 1:
        raise ConfigError("count must be positive")
    outdir = Path(cfg.get("out") or "frames")
    outdir.mkdir(parents=True, exist_ok=True)
    with_n = bool(cfg.get("with_n"))
    cx = build_subdivided() if with_n else build_bipyramid(5)
    if kind == "flex8":
        src, br, xs, rng, _ = _flex_samples(cfg, with_n, count)
        poses = [src(x, br) for x in xs]
    elif kind == "type3":
        rng = "t in [-2, 2]"
        xs = [Fraction(-2) + Fraction(4 * i, max(count - 1, 1)) for i in range(count)]
        poses = [type3_pose(x) for x in xs]
        if with_n:
            poses = [place_vertex_N(p) for p in poses]
    else:
        raise ConfigError("frames needs --type3 or --flex8")
    frames = []
    for i, (x, rho) in enumerate(zip(xs, poses)):
        name = f"frame_{i:03d}.obj"
        (outdir / name).write_text(write_obj(rho, cx, name=f"frame_{i:03d}"))
        rep = scan_polyhedron(rho, cx)
        frames.append({"file": name, "param": format_scalar(x), "improper": rep.improper_count,
                       "undecided": len(rep.undecided)})
    clean = all(f["improper"] == 0 and f["undecided"] == 0 for f in frames)
    return EXIT_OK, {"directory": str(outdir), "range": rng, "frames": frames,
                     "all_clean": clean, **_meta(cfg)}


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "scan": cmd_scan,
            "classify": cmd_classify, "frames": cmd_frames}


VALUE_FLAGS = ("--params", "--t", "--a", "--branch")


def _attach_values(argv: list[str]) -> list[str]:
    """Rewrite ``--params -5/8,...`` as ``--params=-5/8,...`` so values may start with '-'."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None) -> tuple[int, dict | None, str | None]:
    """Execute a command; returns (exit code, report, output file or None)."""
    parser = build_parser()
    argv = _attach_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_CONFIG), None, None
    target = None
    try:
        cfg = _merge_config(args)
        if cfg["command"] not in COMMANDS:
            raise ConfigError(f"unknown command {cfg['command']!r}")
        if cfg["command"] != "frames":
            target = cfg.get("out")
        set_precision(cfg["precision_bits"], cfg["max_precision_bits"])
        code, out = COMMANDS[cfg["command"]](cfg)
        return code, out, target
    except ConfigError as exc:
        return EXIT_CONFIG, _error(exc), None
    except SignUndecidable as exc:
        return EXIT_UNDECIDABLE, _error(exc), None
    except (DegenerateParams, OutOfFlexDomain, CollinearFrame, InvalidN, DegenerateEdge,
            TargetOutOfRange, NegativeRadicand, InconsistentSeed, ZeroDivisionError) as exc:
        return EXIT_CONSTRUCTION, _error(exc), None


def _error(exc: Exception) -> dict:
    return {"error": type(exc).__name__, "message": str(exc)}


def main(argv=None) -> int:
    code, out, target = run(argv)
    if out is not None:
        text = dumps(out)
        if target:
            Path(target).write_text(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

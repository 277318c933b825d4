"""Command-line front end: batch operations on cones, monoids, extended
cones, complexes, graphs, and log curves, with canonical JSON output.

Exit codes: 0 success, 1 usage or input errors, 2 a verified
counterexample from verify-square. Results are cached content-addressed
under the directory named by TROPATLAS_CACHE (if set); cached and fresh
runs emit identical bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from . import serialize as ser
from .complexes import star
from .cones import faces, quotient_cone
from .extended import compose_ext, factorize_ext, fiber_product_ext
from .graphs import canonical_key, enumerate_stable_graphs, moduli_atlas
from .logcurves import base_change, dual_tropical_curve, log_clutch, log_self_glue
from .monoids import compose, factorize_morphism, pointed, pushout
from .serialize import SchemaError, canonical_dumps


class CliError(Exception):
    def __init__(self, message, code=1):
        super().__init__(message)
        self.code = code


class RawOutput(str):
    """Marks command output that is already formatted text (DOT)."""


def _load(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read {path}: {e}")


def _face_arg(text):
    if not text:
        return frozenset()
    try:
        return frozenset(int(x) for x in text.split(","))
    except ValueError:
        raise CliError("face must be a comma-separated list of ray indices")


def cmd_dualize(args):
    data = _load(args.input)
    if isinstance(data, dict) and "cone" in data:
        # a monoid: its dual is the extended cone over the same base
        return {"cone": ser.cone_to_json(ser.monoid_from_json(data).cone)}
    if isinstance(data, dict) and "rank" in data:
        # a cone: its dual is the pointed monoid of lattice points
        c = ser.cone_from_json(data)
        return {"monoid": ser.monoid_to_json(pointed(c))}
    raise SchemaError("input must be a cone or a monoid")


def cmd_faces(args):
    c = ser.cone_from_json(_load(args.input))
    return {"faces": [sorted(f) for f in faces(c).faces]}


def cmd_quotient(args):
    c = ser.cone_from_json(_load(args.input))
    face = _face_arg(args.face)
    try:
        q, proj = quotient_cone(c, face)
    except ValueError as e:
        raise SchemaError(str(e))
    return {
        "cone": ser.cone_to_json(q),
        "projection": [list(r) for r in proj],
    }


def cmd_factorize(args):
    data = _load(args.input)
    if "target_face" in data:
        e = ser.ext_morphism_from_json(data)
        toric, incl = factorize_ext(e)
        return {
            "toric": ser.ext_morphism_to_json(toric),
            "inclusion": ser.ext_morphism_to_json(incl),
        }
    f = ser.morphism_from_json(data)
    rees, toric = factorize_morphism(f)
    return {
        "rees": ser.morphism_to_json(rees),
        "toric": ser.morphism_to_json(toric),
    }


def cmd_compose(args):
    a = _load(args.first)
    b = _load(args.second)
    if "target_face" in a:
        e1 = ser.ext_morphism_from_json(a)
        e2 = ser.ext_morphism_from_json(b)
        try:
            return ser.ext_morphism_to_json(compose_ext(e1, e2))
        except AssertionError as e:
            raise SchemaError(f"morphisms do not compose: {e}")
    f = ser.morphism_from_json(a)
    g = ser.morphism_from_json(b)
    if f.target != g.source:
        raise SchemaError("morphisms do not compose: target and source differ")
    return ser.morphism_to_json(compose(f, g))


def cmd_pushout(args):
    f = ser.morphism_from_json(_load(args.first))
    g = ser.morphism_from_json(_load(args.second))
    if f.source != g.source:
        raise SchemaError("pushout needs a common source")
    try:
        r = pushout(f, g)
    except ValueError as e:
        raise SchemaError(str(e))
    return {
        "apex": ser.monoid_to_json(r.apex),
        "leg_left": ser.morphism_to_json(r.leg_left),
        "leg_right": ser.morphism_to_json(r.leg_right),
        "non_integral_steps": len(r.non_integral_steps),
    }


def cmd_fiberproduct(args):
    f = ser.ext_morphism_from_json(_load(args.first))
    g = ser.ext_morphism_from_json(_load(args.second))
    if f.target != g.target:
        raise SchemaError("fiber product needs a common target")
    try:
        r = fiber_product_ext(f, g)
    except ValueError as e:
        raise SchemaError(str(e))
    return {
        "apex": ser.cone_to_json(r.apex.base),
        "proj_left": ser.ext_morphism_to_json(r.proj_left),
        "proj_right": ser.ext_morphism_to_json(r.proj_right),
        "non_integral_steps": len(r.non_integral_steps),
    }


def cmd_star(args):
    c = ser.complex_from_json(_load(args.input))
    if not 0 <= args.cell < len(c.cells):
        raise SchemaError("cell index out of range")
    return ser.complex_to_json(star(args.cell, c))


def cmd_enumerate(args):
    if 2 * args.g - 2 + args.n <= 0:
        raise SchemaError("unstable (g, n): need 2g-2+n > 0")
    graphs = sorted(enumerate_stable_graphs(args.g, args.n), key=canonical_key)
    if args.count:
        return {"count": len(graphs), "g": args.g, "n": args.n}
    if args.dot:
        os.makedirs(args.dot, exist_ok=True)
        for i, gr in enumerate(graphs):
            path = os.path.join(args.dot, f"graph{i:05d}.dot")
            with open(path, "w") as fh:
                fh.write(ser.graph_to_dot(gr, name=f"G{i}"))
        return {"count": len(graphs), "dot_dir": args.dot}
    atlas = moduli_atlas(args.g, args.n)
    order = sorted(range(len(atlas.graphs)), key=lambda i: canonical_key(atlas.graphs[i]))
    pos = {old: new for new, old in enumerate(order)}
    return {
        "g": args.g,
        "n": args.n,
        "graphs": [ser.graph_to_json(atlas.graphs[i]) for i in order],
        "automorphisms": [atlas.automorphisms[i] for i in order],
        "contractions": sorted(
            [pos[s], sorted(subset), pos[d]] for s, subset, d in atlas.contractions
        ),
    }


def _curve_output(x, fmt):
    if fmt == "dot":
        return RawOutput(ser.graph_to_dot(dual_tropical_curve(x).graph))
    return ser.log_curve_to_json(x)


def cmd_clutch(args):
    x = ser.log_curve_from_json(_load(args.first))
    y = ser.log_curve_from_json(_load(args.second))
    try:
        out = log_clutch(x, y, product_base=args.product_base)
    except AssertionError as e:
        raise SchemaError(f"cannot clutch: {e}")
    return _curve_output(out, args.format)


def cmd_glue(args):
    x = ser.log_curve_from_json(_load(args.input))
    if len(x.markings) < 2:
        raise SchemaError("self-gluing needs at least two markings")
    return _curve_output(log_self_glue(x), args.format)


def cmd_trop(args):
    x = ser.log_curve_from_json(_load(args.input))
    c = dual_tropical_curve(x)
    if args.format == "dot":
        return RawOutput(ser.graph_to_dot(c.graph))
    return ser.trop_curve_to_json(c)


def cmd_basechange(args):
    x = ser.log_curve_from_json(_load(args.input))
    f = ser.morphism_from_json(_load(args.morphism))
    if f.source != x.base.monoid:
        raise SchemaError("morphism source does not match the curve base")
    return ser.log_curve_to_json(base_change(x, f))


def _square_input(path):
    """A square input is a log curve, optionally wrapped with a claimed
    tropicalization: {"curve": ..., "trop": ...}."""
    data = _load(path)
    if isinstance(data, dict) and "curve" in data:
        x = ser.log_curve_from_json(data["curve"])
        claimed = (
            ser.trop_curve_from_json(data["trop"]) if "trop" in data else None
        )
        return x, claimed
    return ser.log_curve_from_json(data), None


def cmd_verify_square(args):
    from .graphs import clutch as trop_clutch
    from .graphs import curve_isomorphisms
    from .graphs import self_glue as trop_self_glue
    from .logcurves import dual_tropical_curve as trop_of

    x, tx = _square_input(args.first)
    tx = tx if tx is not None else trop_of(x)
    if args.mode == "clutch":
        if not args.second:
            raise CliError("clutch mode needs two curves")
        y, ty = _square_input(args.second)
        ty = ty if ty is not None else trop_of(y)
        log_side = trop_of(log_clutch(x, y))
        try:
            trop_side = trop_clutch(tx, ty)
        except AssertionError as e:
            raise SchemaError(f"cannot clutch: {e}")
    else:
        if len(x.markings) < 2:
            raise SchemaError("glue mode needs at least two markings")
        log_side = trop_of(log_self_glue(x))
        trop_side = trop_self_glue(tx)
    isos = curve_isomorphisms(log_side, trop_side)
    out = {
        "mode": args.mode,
        "ok": bool(isos),
        "witness": list(isos[0]) if isos else None,
        "log_side": ser.trop_curve_to_json(log_side),
        "trop_side": ser.trop_curve_to_json(trop_side),
    }
    return out, (0 if isos else 2)


COMMANDS = {
    "dualize": cmd_dualize,
    "faces": cmd_faces,
    "quotient": cmd_quotient,
    "factorize": cmd_factorize,
    "compose": cmd_compose,
    "pushout": cmd_pushout,
    "fiberproduct": cmd_fiberproduct,
    "star": cmd_star,
    "enumerate": cmd_enumerate,
    "clutch": cmd_clutch,
    "glue": cmd_glue,
    "trop": cmd_trop,
    "basechange": cmd_basechange,
    "verify-square": cmd_verify_square,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="tropatlas",
        description="Exact computations with toric monoids, extended cones, "
        "and tropical moduli of stable graphs.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, **kw)

    s = add("dualize", help="dual of a cone or monoid")
    s.add_argument("input")
    s = add("faces", help="face lattice of a cone")
    s.add_argument("input")
    s = add("quotient", help="quotient of a cone by a face")
    s.add_argument("input")
    s.add_argument("--face", default="", help="comma-separated ray indices")
    s = add("factorize", help="Rees/toric factorization of a morphism")
    s.add_argument("input")
    s = add("compose", help="compose two morphisms")
    s.add_argument("first")
    s.add_argument("second")
    s = add("pushout", help="pushout of pointed monoid morphisms")
    s.add_argument("first")
    s.add_argument("second")
    s = add("fiberproduct", help="fiber product of extended cone morphisms")
    s.add_argument("first")
    s.add_argument("second")
    s = add("star", help="star complex of a cell")
    s.add_argument("input")
    s.add_argument("--cell", type=int, required=True)
    s = add("enumerate", help="stable graphs of type (g, n)")
    s.add_argument("g", type=int)
    s.add_argument("n", type=int)
    s.add_argument("--count", action="store_true")
    s.add_argument("--full", action="store_true")
    s.add_argument("--dot", metavar="DIR", default=None)
    s = add("clutch", help="clutch two log curves at their last markings")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--product-base", action="store_true", dest="product_base")
    s.add_argument("--format", choices=["json", "dot"], default="json")
    s = add("glue", help="self-glue a log curve at its last two markings")
    s.add_argument("input")
    s.add_argument("--format", choices=["json", "dot"], default="json")
    s = add("trop", help="dual tropical curve of a log curve")
    s.add_argument("input")
    s.add_argument("--format", choices=["json", "dot"], default="json")
    s = add("basechange", help="base change of a log curve along a morphism")
    s.add_argument("input")
    s.add_argument("morphism")
    s = add("verify-square", help="check clutch/glue commutes with tropicalization")
    s.add_argument("--mode", choices=["clutch", "glue"], required=True)
    s.add_argument("first")
    s.add_argument("second", nargs="?", default=None)
    return p


def _cache_dir():
    return os.environ.get("TROPATLAS_CACHE")


def _cache_key(args, file_args):
    payload = {
        "version": __version__,
        "argv": sorted(
            (k, v)
            for k, v in vars(args).items()
            if k != "command" and not callable(v) and k not in file_args
        ),
        "command": args.command,
        "inputs": [file_args[k] for k in sorted(file_args)],
    }
    return hashlib.sha256(
        canonical_dumps(payload).encode()
    ).hexdigest()


def _file_contents(args):
    out = {}
    for k in ("input", "first", "second", "morphism"):
        v = getattr(args, k, None)
        if v and v != "-":
            try:
                with open(v) as fh:
                    out[k] = fh.read()
            except OSError as e:
                raise CliError(f"cannot read {v}: {e}")
    return out


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        cacheable = args.command != "enumerate" or not args.dot
        key = None
        if _cache_dir() and cacheable:
            try:
                key = _cache_key(args, _file_contents(args))
                path = os.path.join(_cache_dir(), key + ".json")
                if os.path.exists(path):
                    with open(path) as fh:
                        cached = json.load(fh)
                    sys.stdout.write(cached["output"])
                    return cached["code"]
            except CliError:
                raise
            except OSError:
                key = None
        result = COMMANDS[args.command](args)
        code = 0
        if isinstance(result, tuple):
            result, code = result
        text = result if isinstance(result, RawOutput) else canonical_dumps(result)
        if key is not None:
            os.makedirs(_cache_dir(), exist_ok=True)
            tmp = os.path.join(_cache_dir(), key + ".tmp")
            with open(tmp, "w") as fh:
                json.dump({"output": text, "code": code}, fh)
            os.replace(tmp, os.path.join(_cache_dir(), key + ".json"))
        sys.stdout.write(text)
        return code
    except (SchemaError, CliError) as e:
        code = getattr(e, "code", 1)
        sys.stderr.write(canonical_dumps({"error": str(e)}))
        return code


if __name__ == "__main__":
    sys.exit(main())

"""Batch front end: parse diagram and model files, verify, compute, report.

Reports are deterministic for fixed inputs and flags: JSON output uses
canonically ordered keys and exact scalar strings, and every report
carries a provenance block with the input hashes and the quotient
parameters the result is valid under.  Exit codes: 0 ok, 1 violation,
2 usage or parse error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from typing import List, Optional, Tuple

from .chain import Barcode
from .cubes import (CubeDiagram, cone, compose, cube_from_json, cube_to_json,
                    verify_cube)
from .morse import (bundled_model, empty_set, global_sections,
                    involutive_descent_instance, minmax_square,
                    model_from_json, relative_sh)
from .novikov import rat
from .rays import (Ray, TailSpec, completed_homology, descent_complex,
                   mayer_vietoris, telescope)

FORMAT_VERSION = 1


class InputError(ValueError):
    pass


def _read_json(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc))
    try:
        return json.loads(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError("cannot parse %s: %s" % (path, exc))


def _load_model(path: str):
    if path.startswith("bundled:"):
        model = bundled_model(path.split(":", 1)[1])
        digest = "bundled:" + path.split(":", 1)[1]
        return model, digest
    data, digest = _read_json(path)
    try:
        return model_from_json(data), digest
    except (KeyError, ValueError) as exc:
        raise InputError("bad model file %s: %s" % (path, exc))


def _load_cube(path: str) -> Tuple[CubeDiagram, str]:
    data, digest = _read_json(path)
    try:
        return cube_from_json(data), digest
    except (KeyError, ValueError) as exc:
        raise InputError("bad cube file %s: %s" % (path, exc))


def _load_ray(path: str) -> Tuple[Ray, str]:
    data, digest = _read_json(path)
    try:
        n = int(data["n"])
        prefix = [cube_from_json(c) for c in data.get("prefix", ())]
        taildata = data.get("tail", {"kind": "finite"})
        kind = taildata.get("kind", "finite")
        if kind == "finite":
            tail = TailSpec.finite()
        elif kind == "stationary":
            tail = TailSpec.stationary(cube_from_json(taildata["cube"]))
        else:
            raise InputError("file rays support tails 'finite' and "
                             "'stationary', got %r" % kind)
        return Ray(n, prefix, tail), digest
    except InputError:
        raise
    except (KeyError, ValueError) as exc:
        raise InputError("bad ray file %s: %s" % (path, exc))


def _parse_fraction(text: str, flag: str) -> Fraction:
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError):
        raise InputError("flag %s expects a rational p/q, got %r"
                         % (flag, text))


def _provenance(digests, args, **extra):
    prov = {"format_version": FORMAT_VERSION,
            "inputs": list(digests)}
    for name in ("precision", "work"):
        val = getattr(args, name.replace("-", "_"), None)
        prov[name] = str(val) if val is not None else None
    depth = getattr(args, "depth", None)
    prov["depth"] = depth
    prov.update(extra)
    return prov


def _barcode_json(code: Barcode):
    return code.to_json()


# ---------------------------------------------------------------------------
# command handlers: return (report_dict, exit_code)


def cmd_verify_cube(args, path):
    cube, digest = _load_cube(path)
    work = _parse_fraction(args.work, "--work")
    rep = verify_cube(cube, work)
    report = {
        "command": "verify-cube",
        "input": path,
        "status": "ok" if rep.ok else "violation",
        "faces_checked": len(cube.faces),
        "violations": [{"face": f, "detail": d} for f, d in rep.violations],
        "provenance": _provenance([digest], args),
    }
    return report, 0 if rep.ok else 1


def cmd_cone(args, path):
    cube, digest = _load_cube(path)
    work = _parse_fraction(args.work, "--work")
    out = cone(cube, args.direction)
    rep = verify_cube(out, work)
    report = {
        "command": "cone",
        "input": path,
        "direction": args.direction,
        "status": "ok" if rep.ok else "violation",
        "cube": cube_to_json(out.relabel_vertices(
            lambda w, l: _flatten_label(l))),
        "provenance": _provenance([digest], args),
    }
    return report, 0 if rep.ok else 1


def _flatten_label(label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(_flatten_label(x) for x in label) + ")"
    return str(label)


def cmd_compose(args, paths):
    first, d1 = _load_cube(paths[0])
    second, d2 = _load_cube(paths[1])
    work = _parse_fraction(args.work, "--work")
    out = compose(first, second)
    rep = verify_cube(out, work)
    report = {
        "command": "compose",
        "inputs": list(paths),
        "status": "ok" if rep.ok else "violation",
        "cube": cube_to_json(out.relabel_vertices(
            lambda w, l: _flatten_label(l))),
        "provenance": _provenance([d1, d2], args),
    }
    return report, 0 if rep.ok else 1


def cmd_tel(args, path):
    ray, digest = _load_ray(path)
    work = _parse_fraction(args.work, "--work")
    tel = telescope(ray, args.depth)
    rep = verify_cube(tel, work)
    report = {
        "command": "tel",
        "input": path,
        "status": "ok" if rep.ok else "violation",
        "depth": args.depth,
        "cube": cube_to_json(tel.relabel_vertices(
            lambda w, l: _flatten_label(l))),
        "provenance": _provenance([digest], args),
    }
    return report, 0 if rep.ok else 1


def cmd_sh(args, path):
    ray, digest = _load_ray(path)
    precision = _parse_fraction(args.precision, "--precision")
    work = _parse_fraction(args.work, "--work") if args.work else None
    code = completed_homology(ray, precision, work)
    report = {
        "command": "sh",
        "input": path,
        "status": "ok",
        "barcode": _barcode_json(code),
        "provenance": _provenance([digest], args),
    }
    return report, 0


def cmd_mv(args, path):
    cube, digest = _load_cube(path)
    work = _parse_fraction(args.work, "--work") if args.work \
        else _parse_fraction(args.precision, "--precision")
    rep = mayer_vietoris(cube, work)
    report = {
        "command": "mv",
        "input": path,
        "status": "ok" if rep.ok else "violation",
        "exactness": {spot: {str(p): v for p, v in by.items()}
                      for spot, by in sorted(rep.spots.items())},
        "homology_ranks": {w: list(r) for w, r in sorted(rep.ranks.items())},
        "provenance": _provenance([digest], args),
    }
    return report, 0 if rep.ok else 1


def cmd_descent(args, path):
    ray, digest = _load_ray(path)
    precision = _parse_fraction(args.precision, "--precision")
    work = _parse_fraction(args.work, "--work") if args.work else precision
    rep = descent_complex(ray, max(work, precision), args.depth)
    report = {
        "command": "descent",
        "input": path,
        "status": "ok" if rep.acyclic else "violation",
        "acyclic": rep.acyclic,
        "degree_entry_counts": {str(k): v
                                for k, v in rep.degree_entry_counts.items()},
        "d0_matches_summands": rep.d0_matches_summands,
        "slice_betti": [list(b) for b in rep.certificate.betti],
        "tail_note": rep.certificate.tail_note,
        "provenance": _provenance([digest], args),
    }
    return report, 0 if rep.acyclic else 1


def cmd_morse(args, path):
    action = args.action
    if action == "global-sections":
        model, digest = _load_model(path)
        precision = _parse_fraction(args.precision, "--precision")
        rep = global_sections(model, precision, args.depth)
        report = {
            "command": "morse global-sections",
            "input": path,
            "status": "ok",
            "barcode": _barcode_json(rep.barcode),
            "betti": list(rep.betti),
            "stage_weights_checked": rep.stage_weights_checked,
            "provenance": _provenance([digest], args),
        }
        return report, 0
    if action == "empty-set":
        model, digest = _load_model(path)
        precision = _parse_fraction(args.precision, "--precision")
        code = empty_set(model, None, precision)
        report = {
            "command": "morse empty-set",
            "input": path,
            "status": "ok" if code.is_zero else "violation",
            "barcode": _barcode_json(code),
            "provenance": _provenance([digest], args),
        }
        return report, 0 if code.is_zero else 1
    if action == "relative-sh":
        model, digest = _load_model(path)
        precision = _parse_fraction(args.precision, "--precision")
        if args.subset is None:
            raise InputError("relative-sh needs --subset")
        labels = [s for s in args.subset.split(",") if s]
        rep = relative_sh(model, labels, precision, args.depth)
        report = {
            "command": "morse relative-sh",
            "input": path,
            "status": "ok",
            "subset": sorted(labels),
            "barcode": _barcode_json(rep.barcode),
            "betti": list(rep.betti),
            "provenance": _provenance([digest], args),
        }
        return report, 0
    if action == "minmax":
        data, digest = _read_json(path)
        try:
            model = model_from_json(data["model"])
            hx = {l: rat(v) for l, v in data["hx"].items()}
            hy = {l: rat(v) for l, v in data["hy"].items()}
        except (KeyError, ValueError) as exc:
            raise InputError("bad minmax file %s: %s" % (path, exc))
        rep = minmax_square(model, hx, hy)
        mv = mayer_vietoris(rep.square,
                            _parse_fraction(args.work or "3", "--work"))
        report = {
            "command": "morse minmax",
            "input": path,
            "status": "ok" if (rep.acyclic and rep.pieces_match and mv.ok)
                      else "violation",
            "pieces": {str(l): kind for l, kind in sorted(
                rep.pieces.items(), key=lambda kv: str(kv[0]))},
            "pieces_match": rep.pieces_match,
            "strict_commutation": rep.strict_commutation,
            "acyclic": rep.acyclic,
            "mayer_vietoris_exact": mv.ok,
            "square": cube_to_json(rep.square),
            "provenance": _provenance([digest], args),
        }
        return report, 0 if report["status"] == "ok" else 1
    if action == "descent-involutive":
        data, digest = _read_json(path)
        try:
            model = model_from_json(data["model"])
            regions = [set(r) for r in data["regions"]]
        except (KeyError, ValueError) as exc:
            raise InputError("bad descent file %s: %s" % (path, exc))
        precision = _parse_fraction(args.precision, "--precision")
        rep = involutive_descent_instance(model, regions, precision,
                                          depth=args.depth)
        report = {
            "command": "morse descent-involutive",
            "input": path,
            "status": "ok" if rep.acyclic else "violation",
            "acyclic": rep.acyclic,
            "pairwise": [{"pair": list(pair), "acyclic": ok}
                         for pair, ok in rep.pairwise],
            "provenance": _provenance([digest], args),
        }
        return report, 0 if rep.acyclic else 1
    raise InputError("unknown morse action %r" % action)


# ---------------------------------------------------------------------------


def render_text(report: dict) -> str:
    lines = ["%s: %s" % (report.get("command"), report.get("status"))]
    for key in sorted(report):
        if key in ("command", "status", "cube", "square", "provenance"):
            continue
        val = report[key]
        if key == "barcode" and isinstance(val, dict):
            lines.append("barcode:")
            for bar in val.get("free", ()):
                lines.append("  free     parity %d" % bar["parity"])
            for bar in val.get("open", ()):
                lines.append("  open     parity %d  (0, precision)"
                             % bar["parity"])
            for bar in val.get("torsion", ()):
                lines.append("  torsion  parity %d  length %s"
                             % (bar["parity"], bar["length"]))
            if not any(val.get(k) for k in ("free", "open", "torsion")):
                lines.append("  (empty)")
            continue
        if key == "violations" and isinstance(val, list):
            lines.append("violations: %d" % len(val))
            for v in val[:50]:
                lines.append("  %s: %s" % (v["face"], v["detail"]))
            continue
        if key == "exactness":
            for spot, by in val.items():
                lines.append("exact at %-9s even=%s odd=%s"
                             % (spot, by.get("0"), by.get("1")))
            continue
        lines.append("%s: %s" % (key, json.dumps(val, sort_keys=True)))
    prov = report.get("provenance", {})
    lines.append("provenance: precision=%s work=%s depth=%s"
                 % (prov.get("precision"), prov.get("work"),
                    prov.get("depth")))
    return "\n".join(lines)


def emit(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    return render_text(report)


def _run_one(task):
    args, handler, payload = task
    try:
        report, code = handler(args, payload)
    except InputError as exc:
        return {"command": args.command, "status": "error",
                "error": str(exc)}, 2
    except Exception as exc:  # noqa: BLE001 - surfaced with module names
        return {"command": args.command, "status": "error",
                "error": "%s: %s" % (type(exc).__name__, exc)}, 3
    return report, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="novcube",
        description="verify and compute with cubical diagrams over the "
                    "Novikov ring")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, work=True, precision=False, depth=False):
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel batch over multiple input files")
        if work:
            p.add_argument("--work", default=None,
                           help="working precision p/q")
        if precision:
            p.add_argument("--precision", required=True,
                           help="quotient precision p/q (mandatory)")
        if depth:
            p.add_argument("--depth", type=int, required=True,
                           help="materialization depth (mandatory)")

    p = sub.add_parser("verify-cube", help="check the coherence equations")
    p.add_argument("files", nargs="+")
    add_common(p)
    p.set_defaults(handler=cmd_verify_cube, multi=True)
    p.set_defaults(work_default="10")

    p = sub.add_parser("cone", help="contract one direction")
    p.add_argument("files", nargs="+")
    p.add_argument("--direction", type=int, required=True)
    add_common(p)
    p.set_defaults(handler=cmd_cone, multi=True, work_default="10")

    p = sub.add_parser("compose", help="compose two glued map-cubes")
    p.add_argument("files", nargs=2)
    add_common(p)
    p.set_defaults(handler=cmd_compose, multi=False, work_default="10")

    p = sub.add_parser("tel", help="materialize a telescope")
    p.add_argument("files", nargs="+")
    add_common(p, depth=True)
    p.set_defaults(handler=cmd_tel, multi=True, work_default=None)
    p.set_defaults(work_required=True)

    p = sub.add_parser("sh", help="completed homology of a ray")
    p.add_argument("files", nargs="+")
    add_common(p, precision=True)
    p.set_defaults(handler=cmd_sh, multi=True)

    p = sub.add_parser("mv", help="six-term exact sequence of a square")
    p.add_argument("files", nargs="+")
    add_common(p, precision=False)
    p.add_argument("--precision", default=None)
    p.set_defaults(handler=cmd_mv, multi=True, work_default="3")

    p = sub.add_parser("descent", help="subset-cube descent verdict")
    p.add_argument("files", nargs="+")
    add_common(p, precision=True, depth=True)
    p.set_defaults(handler=cmd_descent, multi=True)

    p = sub.add_parser("morse", help="cell-model computations")
    p.add_argument("action", choices=("global-sections", "empty-set",
                                      "relative-sh", "minmax",
                                      "descent-involutive"))
    p.add_argument("files", nargs="+")
    p.add_argument("--subset", default=None,
                   help="comma-separated labels for relative-sh")
    p.add_argument("--depth", type=int, default=None)
    add_common(p, precision=True)
    p.set_defaults(handler=cmd_morse, multi=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "work", None) is None:
        if getattr(args, "work_required", False):
            parser.exit(2, "error: --work is mandatory for telescoped "
                           "computations\n")
        args.work = getattr(args, "work_default", None)
    if args.command == "morse" and args.depth is None:
        if args.action in ("global-sections", "relative-sh",
                           "descent-involutive"):
            parser.exit(2, "error: --depth is mandatory for completed "
                           "computations\n")
        args.depth = 2
    if args.command == "compose":
        tasks = [(args, args.handler, tuple(args.files))]
    else:
        tasks = [(args, args.handler, f) for f in args.files]

    if args.jobs > 1 and len(tasks) > 1:
        import multiprocessing
        with multiprocessing.Pool(args.jobs) as pool:
            results = pool.map(_run_one, tasks)
    else:
        results = [_run_one(t) for t in tasks]

    worst = 0
    for report, code in results:
        print(emit(report, args.format))
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())

"""Command line: ``mural2scene compile|validate|simulate|fixture``.

Exit status is 0 on success, 1 when diagnostics (or a failed simulation)
stop the command, and 2 for I/O failures. Diagnostics go to stderr, one per
line, as ``SEVERITY CODE file:line:col path: message``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from PIL import Image

from .errors import CompileError, has_errors
from .manifest.model import SceneManifest
from .manifest.validate import locate, source_size_issues, validate_manifest
from .narrative.script import parse_script
from .narrative.simulate import Completed, simulate
from .pipeline import CompileOptions, compile_manifest, load_manifest, write_package

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_IO = 2

log = logging.getLogger("mural2scene")


def _report(diags) -> None:
    for d in diags:
        print(str(d), file=sys.stderr)


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _load(path: str) -> SceneManifest | int:
    try:
        parsed = load_manifest(path)
    except CompileError as exc:
        print(f"ERROR {exc.code} {path}: {exc.message}", file=sys.stderr)
        return EXIT_IO
    if not isinstance(parsed, SceneManifest):
        _report(parsed)
        return EXIT_DIAGNOSTICS
    return parsed


def cmd_compile(args) -> int:
    opts = CompileOptions(downsample=args.downsample, seed=args.seed, strict=args.strict,
                          max_side_px=args.max_atlas_side)
    result = compile_manifest(args.manifest, opts)
    _report(result.diagnostics)
    if not result.ok:
        return EXIT_IO if result.io_error else EXIT_DIAGNOSTICS
    try:
        written = write_package(result, args.out)
    except OSError as exc:
        print(f"ERROR IO_ERROR {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %d files to %s", len(written), args.out)
    if args.verbose:
        print(result.report, end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    m = _load(args.manifest)
    if isinstance(m, int):
        return m
    file = str(args.manifest)
    sizes = {}
    base = Path(args.manifest).parent
    for src in m.sources:
        try:
            with Image.open(base / src.image) as im:
                sizes[src.source_id] = im.size
        except (OSError, Image.DecompressionBombError):
            pass  # a missing image is reported by compile, not here
    diags = [d.located(file) for d in validate_manifest(m, sizes)]
    for d in source_size_issues(m, sizes):
        line, col = locate(m, d.path)
        diags.append(type(d)(d.severity, d.code, d.message, d.path, line, col, file))
    _report(diags)
    if has_errors(diags) or (args.strict and diags):
        return EXIT_DIAGNOSTICS
    print(f"{file}: ok ({len(diags)} warnings)")
    return EXIT_OK


def cmd_simulate(args) -> int:
    m = _load(args.manifest)
    if isinstance(m, int):
        return m
    if m.narrative is None:
        print(f"ERROR NO_NARRATIVE {args.manifest}: the manifest has no narrative", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    try:
        text = Path(args.script).read_bytes()
    except OSError as exc:
        print(f"ERROR IO_ERROR {args.script}: {exc}", file=sys.stderr)
        return EXIT_IO
    events = parse_script(text, file=str(args.script))
    if isinstance(events, list):
        _report(events)
        return EXIT_DIAGNOSTICS
    trace = simulate(m.narrative, events, strict=args.strict)
    for s in trace.steps:
        mark = "ok " if s.accepted else "REJ"
        entered = f" -> {s.node_entered}" if s.node_entered else ""
        note = f"  ({s.note})" if s.note else ""
        print(f"{s.index:3d} {mark} {type(s.event).__name__}{entered}{note}")
    print(f"outcome: {trace.outcome}")
    print(f"final node: {trace.final_node}")
    print(f"items delivered ({len(trace.items_delivered)}): "
          f"{', '.join(sorted(trace.items_delivered))}")
    return EXIT_OK if isinstance(trace.outcome, Completed) else EXIT_DIAGNOSTICS


def cmd_fixture(args) -> int:
    from .fixtures import write_foguang

    try:
        path = write_foguang(args.out, dpi=args.dpi)
    except OSError as exc:
        print(f"ERROR IO_ERROR {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mural2scene",
                                description="Compile an annotated mural into a glTF scene package.")
    p.add_argument("-v", "--verbose", action="store_true", help="print the build report")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="build a scene package")
    c.add_argument("manifest", type=Path)
    c.add_argument("-o", "--out", type=Path, required=True, help="output directory")
    c.add_argument("--downsample", type=_positive, default=1,
                   help="integer box-filter factor applied to source images")
    c.add_argument("--seed", type=int, default=None, help="override the skybox rhythm seed")
    c.add_argument("--strict", action="store_true", help="treat warnings as errors")
    c.add_argument("--max-atlas-side", type=_positive, default=CompileOptions.max_side_px)
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("validate", help="check a manifest without building")
    v.add_argument("manifest", type=Path)
    v.add_argument("--strict", action="store_true", help="treat warnings as errors")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="replay an event script on the narrative")
    s.add_argument("manifest", type=Path)
    s.add_argument("--script", type=Path, required=True, help="YAML list of events")
    s.add_argument("--strict", action="store_true", help="stop at the first rejected event")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fixture", help="write the Foguang Temple test fixture")
    f.add_argument("-o", "--out", type=Path, required=True)
    f.add_argument("--dpi", type=_positive, default=300)
    f.set_defaults(func=cmd_fixture)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``hrim <subcommand> ...``.

Exit codes: 0 success (conformant, true), 1 findings or a false verdict,
2 usage error, 3 I/O error. Findings go to stderr prefixed with
``file:line:col:``; formatted text, reports and traces go to stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

from hrim import naming
from hrim.catalog import BUILTIN_MODELS, source_path
from hrim.conformance import check, interchangeable, load_descriptor
from hrim.emitter import IdentityRequired, UnknownGroup, WouldOverwrite, emit, write_tree
from hrim.model import ComponentModel, Finding, Identity, InvalidIdentity, InvalidModel, Span
from hrim.modelc import ParseFailure, SourceFile, format_model, parse_model
from hrim.naming import NamePattern
from hrim.simbus import (
    DEFAULT_SWAP_SCRIPT,
    Bus,
    NotInterchangeable,
    ScriptError,
    default_resolver,
    parse_script,
    run_directives,
    swap_and_verify,
)
from hrim.units import check_units

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(f"{self.prog}: {message}")


def _location(path: str, span: Optional[Span]) -> str:
    if span is None:
        return f"{path}:1:1"
    return f"{path}:{span.start_line}:{span.start_col}"


def _report(findings: Iterable[Finding], path: str, err: TextIO) -> None:
    for f in findings:
        print(f"{_location(path, f.span)}: {f}", file=err)


def _load(path: str, err: TextIO) -> tuple[Optional[ComponentModel], list[Finding]]:
    """Parse ``path``; print its diagnostics. OSError propagates."""
    result = parse_model(SourceFile.read(path))
    _report(result.diagnostics, path, err)
    errors = [d for d in result.diagnostics if d.is_error]
    return (None if errors else result.model), errors


def _cmd_check(args, out, err) -> int:
    model, errors = _load(args.file, err)
    if model is None:
        return EXIT_FINDINGS
    findings = check_units(model)
    _report(findings, args.file, err)
    return EXIT_FINDINGS if any(f.is_error for f in findings) else EXIT_OK


def _cmd_fmt(args, out, err) -> int:
    model, _ = _load(args.file, err)
    if model is None:
        return EXIT_FINDINGS
    text = format_model(model)
    if args.write:
        target = Path(args.file)
        if target.read_text(encoding="utf-8") != text:
            target.write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _cmd_gen(args, out, err) -> int:
    try:
        identity = Identity(args.vendor, args.product, args.instance)
    except InvalidIdentity as exc:
        raise _UsageError(f"gen: {exc}") from None
    model, _ = _load(args.file, err)
    if model is None:
        return EXIT_FINDINGS
    try:
        tree = emit(model, identity, args.without)
    except (IdentityRequired, UnknownGroup) as exc:
        raise _UsageError(f"gen: {exc}") from None
    summary = write_tree(tree, args.out, force=args.force)
    print(f"wrote {summary.files_written} files ({summary.bytes} bytes) to {args.out}", file=out)
    return EXIT_OK


def _load_descriptor(path: str, err: TextIO):
    try:
        return load_descriptor(path)
    except ParseFailure as exc:
        _report(exc.diagnostics, path, err)
    except InvalidIdentity as exc:
        print(f"{_location(path, exc.span)}: error E_INVALID_IDENTITY identity: {exc}", file=err)
    return None


def _cmd_conform(args, out, err) -> int:
    model, _ = _load(args.model, err)
    descriptor = _load_descriptor(args.descriptor, err)
    if model is None or descriptor is None:
        return EXIT_FINDINGS
    report = check(descriptor, model)
    if args.json:
        out.write(report.to_json() + "\n")
    else:
        out.write(report.to_text())
    return EXIT_OK if report.conformant else EXIT_FINDINGS


def _cmd_swap(args, out, err) -> int:
    model, _ = _load(args.model, err)
    a = _load_descriptor(args.a, err)
    b = _load_descriptor(args.b, err)
    if model is None or a is None or b is None:
        return EXIT_FINDINGS
    verdict = interchangeable(a, b, model)
    explanation = verdict.explanation
    ok = verdict.verdict
    if ok:
        try:
            ok = swap_and_verify(DEFAULT_SWAP_SCRIPT, a, b, model, seed=args.seed)
        except NotInterchangeable as exc:
            ok, explanation = False, str(exc)
        if not ok:
            explanation = "simulated traces differ after identity erasure"
        else:
            explanation += "; simulated traces identical after identity erasure"
    print(f"verdict: {'true' if ok else 'false'}", file=out)
    print(explanation, file=out)
    return EXIT_OK if ok else EXIT_FINDINGS


def _cmd_sim(args, out, err) -> int:
    text = SourceFile.read(args.script).text
    try:
        bus = run_directives(Bus(args.seed), parse_script(text),
                             default_resolver(Path(args.script).parent))
    except ScriptError as exc:
        print(f"{args.script}:{exc.line}:{exc.col}: error E_SCRIPT {exc.message}", file=err)
        return EXIT_FINDINGS
    except ParseFailure as exc:
        _report(exc.diagnostics, exc.source.path or args.script, err)
        return EXIT_FINDINGS
    out.write(bus.trace_text())
    return EXIT_OK


def _cmd_list(args, out, err) -> int:
    for name in BUILTIN_MODELS:
        print(f"{name}\t{source_path(name)}", file=out)
    return EXIT_OK


def _cmd_lint_name(args, out, err) -> int:
    try:
        pattern = NamePattern(args.pattern)
    except ValueError:
        choices = ", ".join(p.value for p in NamePattern)
        raise _UsageError(f"lint-name: unknown pattern {args.pattern!r} (choose from {choices})") from None
    ok, findings = naming.validate(pattern, args.name)
    for f in findings:
        print(f"<argv>:1:1: {f}", file=err)
    return EXIT_OK if ok else EXIT_FINDINGS


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="hrim", description="HRIM model toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)
    sub.required = True

    p = sub.add_parser("check", help="parse and validate a model")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("fmt", help="print or rewrite a model in canonical form")
    p.add_argument("file")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.set_defaults(func=_cmd_fmt)

    p = sub.add_parser("gen", help="generate interface files for a module")
    p.add_argument("file")
    p.add_argument("--vendor", required=True)
    p.add_argument("--product", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true", help="overwrite existing files")
    p.add_argument("--without", action="append", default=[], metavar="GROUP",
                   help="leave out an optional group (repeatable)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("conform", help="check a module descriptor against a model")
    p.add_argument("model")
    p.add_argument("descriptor")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=_cmd_conform)

    p = sub.add_parser("swap", help="can descriptor b replace descriptor a?")
    p.add_argument("model")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_swap)

    p = sub.add_parser("sim", help="run a simulation script and print the trace")
    p.add_argument("script")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("list", help="list the builtin catalog")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("lint-name", help="validate a name against a naming pattern")
    p.add_argument("pattern")
    p.add_argument("name")
    p.set_defaults(func=_cmd_lint_name)
    return parser


def run(argv: Sequence[str], out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        args = build_parser().parse_args(list(argv))
        return args.func(args, out, err)
    except _UsageError as exc:
        print(f"<argv>:1:1: error E_USAGE {exc}", file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except WouldOverwrite as exc:
        print(f"{exc.filename}:1:1: error E_IO {exc.strerror}; pass --force to overwrite", file=err)
        return EXIT_IO
    except InvalidModel as exc:
        _report(exc.findings, "<model>", err)
        return EXIT_FINDINGS
    except (OSError, UnicodeDecodeError) as exc:
        where = getattr(exc, "filename", None) or "<io>"
        print(f"{where}:1:1: error E_IO {exc}", file=err)
        return EXIT_IO


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

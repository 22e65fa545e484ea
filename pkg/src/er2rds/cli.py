"""Command-line interface.

Five subcommands over `.er` and `.rds` files: validate, transform, reverse,
roundtrip, and ddl.  Diagnostics go to standard error; primary output goes
to standard output or the file named by -o.  Exit codes: 0 clean, 1 warnings
only, 2 model or schema errors, 3 I/O errors.  A reverse run's NORM notes
describe inherent normalizations rather than problems, so they alone do not
raise the exit code.
"""

from __future__ import annotations

import argparse
import difflib
import sys
from dataclasses import dataclass, field

from .er_text import emit_er, parse_er
from .errors import PrerequisiteFailed, TransformError
from .forward import TraceEntry, TransformConfig, transform_model
from .model import (
    Diagnostic,
    ERModel,
    RelationalSchema,
    Severity,
    format_diagnostic,
    has_errors,
    leading_underline_count,
)
from .rds_text import emit_rds, parse_rds
from .reverse import (
    RelationKind,
    classify_relations,
    model_diff,
    normalize_model,
    reconstruct_sog_choices,
    reverse_transform,
)
from .validator import validate_notation

EXIT_CLEAN = 0
EXIT_WARNINGS = 1
EXIT_ERRORS = 2
EXIT_IO = 3


# --------------------------------------------------------------------------
# Round-trip check


@dataclass
class RoundtripReport:
    """Outcome of forward, reverse, forward-again on one configuration."""

    ok: bool
    schema_text: str = ""
    second_schema_text: str = ""
    differences: list[str] = field(default_factory=list)


def run_roundtrip(model: ERModel, cfg: TransformConfig | None = None
                  ) -> RoundtripReport:
    """Transform, reverse, and re-transform; the report is ok when the
    reversed model equals the normalized source and the second transformation
    reproduces the first schema byte for byte.

    The second run replays the side choices recorded in the first schema's
    one-to-one foreign keys, so it needs no external configuration."""
    cfg = cfg or TransformConfig()
    schema, _ = transform_model(model, cfg)
    first = emit_rds(schema)
    report = RoundtripReport(ok=False, schema_text=first)

    reversed_model, diagnostics = reverse_transform(schema)
    if reversed_model is None:
        report.differences = [
            "reverse transformation failed:",
            *(format_diagnostic(d, "<schema>") for d in diagnostics
              if d.severity is Severity.ERROR),
        ]
        return report
    report.differences.extend(model_diff(normalize_model(model), reversed_model))

    replay = TransformConfig(sog_choice=reconstruct_sog_choices(schema),
                             extensions=cfg.extensions)
    try:
        second_schema, _ = transform_model(reversed_model, replay)
    except TransformError as exc:
        report.differences.append(f"second transformation failed: {exc}")
        return report
    second = emit_rds(second_schema)
    report.second_schema_text = second
    if second != first:
        report.differences.append("schema texts differ:")
        report.differences.extend(
            line.rstrip("\n")
            for line in difflib.unified_diff(
                first.splitlines(keepends=True), second.splitlines(keepends=True),
                fromfile="first", tofile="second")
        )
    report.ok = not report.differences
    return report


# --------------------------------------------------------------------------
# DDL projection


def _sql_identifier(name: str) -> str:
    return name if name.isalnum() else f'"{name}"'


def render_ddl(schema: RelationalSchema) -> tuple[str, list[Diagnostic]]:
    """Project the schema onto CREATE TABLE statements.

    Every column is a TEXT placeholder; leading underlined attributes form
    the primary key; each suffixed attribute becomes a foreign key against
    the regular relation owning the referenced key (prefix stripped), with
    its suffix preserved as a trailing comment.  Subtype, multivalued, and
    weak relations also reference their owner through their first attribute.
    An unresolvable reference becomes a comment plus a warning diagnostic.
    """
    diagnostics: list[Diagnostic] = []
    kinds, _ = classify_relations(schema)
    owners: dict[str, str] = {}
    for relation in schema.relations:
        if kinds.get(relation.name) is RelationKind.REGULAR_ENTITY:
            owners.setdefault(relation.pk_name(), relation.name)

    def unresolved(relation_name: str, key: str) -> str:
        diagnostics.append(
            Diagnostic("FK", Severity.WARNING,
                       f"no relation owns primary key {key!r}",
                       element=relation_name)
        )
        return f"-- unresolved reference: no relation owns primary key {key}"

    statements = []
    for relation in schema.relations:
        items: list[tuple[str, str]] = []
        for attr in relation.attributes:
            comment = ""
            if attr.suffix is not None:
                s = attr.suffix
                comment = f"-- ({s.relationship}, {s.v2}, {s.v3}, {s.v4})"
            items.append((f"{_sql_identifier(attr.display_name())} TEXT", comment))

        pk = [a.name for a in
              relation.attributes[:leading_underline_count(relation)]]
        if pk:
            items.append((f"PRIMARY KEY ({', '.join(pk)})", ""))

        dependent = kinds.get(relation.name) in (
            RelationKind.SUBTYPE, RelationKind.MULTIVALUED, RelationKind.WEAK)
        if dependent:
            key = relation.attributes[0].name
            owner = owners.get(key)
            if owner is None:
                items.append((unresolved(relation.name, key), ""))
            else:
                items.append((f"FOREIGN KEY ({key}) "
                              f"REFERENCES {owner} ({key})", ""))
        for attr in relation.attributes:
            if attr.suffix is None:
                continue
            owner = owners.get(attr.name)
            if owner is None:
                items.append((unresolved(relation.name, attr.name), ""))
            else:
                items.append((f"FOREIGN KEY ({_sql_identifier(attr.display_name())}) "
                              f"REFERENCES {owner} ({attr.name})", ""))

        lines = [f"CREATE TABLE {relation.name} ("]
        last_definition = max(
            (i for i, (d, _) in enumerate(items) if not d.startswith("--")),
            default=-1,
        )
        for index, (definition, comment) in enumerate(items):
            needs_comma = index < last_definition and not definition.startswith("--")
            suffix = f" {comment}" if comment else ""
            lines.append(f"    {definition}{',' if needs_comma else ''}{suffix}")
        lines.append(");")
        statements.append("\n".join(lines))
    if not statements:
        return "", diagnostics
    return "\n\n".join(statements) + "\n", diagnostics


# --------------------------------------------------------------------------
# Command plumbing


def _print_diagnostics(diagnostics, path: str) -> None:
    for diag in diagnostics:
        print(format_diagnostic(diag, path), file=sys.stderr)


def _exit_code(diagnostics) -> int:
    if has_errors(diagnostics):
        return EXIT_ERRORS
    if diagnostics:
        return EXIT_WARNINGS
    return EXIT_CLEAN


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _parse_choices(pairs: list[str]) -> dict[str, str]:
    choices: dict[str, str] = {}
    for pair in pairs:
        relationship, sep, participant = pair.partition("=")
        if not sep or not relationship or not participant:
            raise ValueError(
                f"--sog-choice expects RELATIONSHIP=PARTICIPANT, got {pair!r}"
            )
        choices[relationship] = participant
    return choices


def _config_from(args: argparse.Namespace) -> TransformConfig:
    return TransformConfig(
        sog_choice=_parse_choices(args.sog_choice),
        prefer_regular=args.prefer_regular,
        extensions=args.extensions,
    )


def _print_trace(trace: list[TraceEntry]) -> None:
    for entry in trace:
        print(f"step {entry.step} {entry.subject} -> {entry.relation}",
              file=sys.stderr)
        for line in entry.schema_after:
            print(f"    {line}", file=sys.stderr)


def cmd_validate(args: argparse.Namespace, text: str) -> int:
    model, diagnostics = parse_er(text, args.input)
    if model is not None:
        diagnostics = [*diagnostics,
                       *validate_notation(model, allow_extensions=args.extensions)]
    _print_diagnostics(diagnostics, args.input)
    return _exit_code(diagnostics)


def cmd_transform(args: argparse.Namespace, text: str) -> int:
    model, diagnostics = parse_er(text, args.input)
    if model is None:
        _print_diagnostics(diagnostics, args.input)
        return EXIT_ERRORS
    try:
        cfg = _config_from(args)
        schema, trace = transform_model(model, cfg)
    except PrerequisiteFailed as exc:
        _print_diagnostics([*diagnostics, *exc.diagnostics], args.input)
        return EXIT_ERRORS
    except (TransformError, ValueError) as exc:
        _print_diagnostics(diagnostics, args.input)
        print(f"er2rds: {exc}", file=sys.stderr)
        return EXIT_ERRORS
    diagnostics = [*diagnostics,
                   *validate_notation(model, allow_extensions=args.extensions)]
    _print_diagnostics(diagnostics, args.input)
    if args.trace:
        _print_trace(trace)
    _write_output(emit_rds(schema), args.output)
    return _exit_code(diagnostics)


def cmd_reverse(args: argparse.Namespace, text: str) -> int:
    schema, diagnostics = parse_rds(text, args.input)
    if schema is None:
        _print_diagnostics(diagnostics, args.input)
        return EXIT_ERRORS
    model, reverse_diags = reverse_transform(schema)
    diagnostics = [*diagnostics, *reverse_diags]
    _print_diagnostics(diagnostics, args.input)
    if model is None:
        return EXIT_ERRORS
    _write_output(emit_er(model), args.output)
    # NORM notes accompany every reversal; they alone keep the exit clean.
    if any(d.rule_id != "NORM" for d in diagnostics):
        return EXIT_WARNINGS
    return EXIT_CLEAN


def cmd_roundtrip(args: argparse.Namespace, text: str) -> int:
    model, diagnostics = parse_er(text, args.input)
    if model is None:
        _print_diagnostics(diagnostics, args.input)
        return EXIT_ERRORS
    try:
        report = run_roundtrip(model, _config_from(args))
    except PrerequisiteFailed as exc:
        _print_diagnostics([*diagnostics, *exc.diagnostics], args.input)
        return EXIT_ERRORS
    except (TransformError, ValueError) as exc:
        print(f"er2rds: {exc}", file=sys.stderr)
        return EXIT_ERRORS
    if report.ok:
        count = report.schema_text.count("\n")
        print(f"round trip OK: {count} relations reproduced")
        return EXIT_CLEAN
    print("round trip FAILED")
    for line in report.differences:
        print(line)
    return EXIT_ERRORS


def cmd_ddl(args: argparse.Namespace, text: str) -> int:
    schema, diagnostics = parse_rds(text, args.input)
    if schema is None:
        _print_diagnostics(diagnostics, args.input)
        return EXIT_ERRORS
    sql, ddl_diags = render_ddl(schema)
    diagnostics = [*diagnostics, *ddl_diags]
    _print_diagnostics(diagnostics, args.input)
    _write_output(sql, args.output)
    return _exit_code(diagnostics)


_COMMANDS = {
    "validate": cmd_validate,
    "transform": cmd_transform,
    "reverse": cmd_reverse,
    "roundtrip": cmd_roundtrip,
    "ddl": cmd_ddl,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="er2rds",
        description="Transform ER models to annotated relational schemas "
                    "and back.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, output: bool = False,
            extensions: bool = False, config: bool = False,
            trace: bool = False) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("input", help="input file")
        if output:
            sub.add_argument("-o", "--output", default=None,
                             help="output file (default: standard output)")
        if extensions:
            sub.add_argument("--extensions", action="store_true",
                             help="accept subtype endpoints in 1:N relationships")
        if config:
            sub.add_argument("--sog-choice", action="append", default=[],
                             metavar="RELATIONSHIP=PARTICIPANT",
                             help="host this 1:1 relationship's foreign key in "
                                  "the named participant's relation (repeatable)")
            sub.add_argument("--prefer-regular", action="store_true",
                             help="default 1:1 foreign keys into the regular "
                                  "entity's relation instead of the subtype's")
        if trace:
            sub.add_argument("--trace", action="store_true",
                             help="write the step-by-step schema trace to "
                                  "standard error")
        return sub

    add("validate", "check a .er model against the notation rules",
        extensions=True)
    add("transform", "compile a .er model to an annotated .rds schema",
        output=True, extensions=True, config=True, trace=True)
    add("reverse", "rebuild the .er model a .rds schema came from", output=True)
    add("roundtrip", "verify transform-reverse-transform reproduces the input",
        extensions=True, config=True)
    add("ddl", "project a .rds schema onto CREATE TABLE statements", output=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.input, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"er2rds: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return _COMMANDS[args.command](args, text)
    except OSError as exc:
        print(f"er2rds: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

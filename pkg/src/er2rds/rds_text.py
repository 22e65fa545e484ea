"""Text format for relational schemas.

One relation per line: ``Name[a1, a2, ...]``.  An attribute is rendered as
``_Attr_`` when underlined (primary key part), ``Prefix-Attr`` when it
carries a subtype prefix, and gains a bracketed foreign-key suffix
``(RelName, v2, v3, v4)`` appended with no space before the parenthesis.
``//`` starts a comment; blank lines are ignored.  Emission is deterministic,
so equal schemas produce byte-identical text.
"""

from __future__ import annotations

import re

from .model import (
    Diagnostic,
    FkSuffix,
    RdsAttribute,
    Relation,
    RelationalSchema,
    Severity,
    has_errors,
)


def render_attribute(attr: RdsAttribute) -> str:
    if attr.underlined:
        return f"_{attr.name}_"
    text = attr.display_name()
    if attr.suffix is not None:
        s = attr.suffix
        text += f"({s.relationship}, {s.v2}, {s.v3}, {s.v4})"
    return text


def render_relation(relation: Relation) -> str:
    body = ", ".join(render_attribute(a) for a in relation.attributes)
    return f"{relation.name}[{body}]"


def emit_rds(schema: RelationalSchema) -> str:
    return "".join(render_relation(r) + "\n" for r in schema.relations)


_LINE_RE = re.compile(r"^([A-Za-z]+)\[(.*)\]$")
_UNDERLINED_RE = re.compile(r"^_([A-Za-z]+)_(\(.*\))?$")
_PLAIN_RE = re.compile(
    r"^(?:([A-Za-z]+)-)?([A-Za-z]+)"
    r"(?:\(\s*([A-Za-z]+)\s*,\s*([01])\s*,\s*([01])\s*,\s*([1n])\s*\))?$"
)


def _split_attributes(body: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    current = ""
    for ch in body:
        if ch == "," and depth == 0:
            parts.append(current.strip())
            current = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        current += ch
    parts.append(current.strip())
    return parts


def _parse_attribute(text: str, line_no: int,
                     diagnostics: list[Diagnostic]) -> RdsAttribute | None:
    match = _UNDERLINED_RE.match(text)
    if match is not None:
        if match.group(2) is not None:
            diagnostics.append(
                Diagnostic("INVARIANT", Severity.ERROR,
                           f"underlined attribute {match.group(1)!r} cannot carry "
                           f"a foreign-key suffix", line_no)
            )
            return None
        return RdsAttribute(match.group(1), underlined=True)
    match = _PLAIN_RE.match(text)
    if match is None:
        diagnostics.append(
            Diagnostic("SYNTAX", Severity.ERROR,
                       f"malformed attribute {text!r}", line_no)
        )
        return None
    prefix, name, rel, v2, v3, v4 = match.groups()
    suffix = FkSuffix(rel, v2, v3, v4) if rel is not None else None
    if prefix is not None and suffix is None:
        diagnostics.append(
            Diagnostic("INVARIANT", Severity.ERROR,
                       f"prefixed attribute {prefix}-{name} must carry a "
                       f"foreign-key suffix", line_no)
        )
        return None
    return RdsAttribute(name, prefix=prefix, suffix=suffix)


def parse_rds(text: str, path: str = "<rds>") -> tuple[RelationalSchema | None,
                                                       list[Diagnostic]]:
    """Parse schema text; returns (schema, diagnostics), schema None on errors.

    Enforces the attribute laws (prefix implies suffix, underlined excludes
    suffix) and relation-name uniqueness.  Whether underlined attributes lead
    the relation is left to classification: only transformer output promises
    that, and hand-written files are still parseable.
    """
    schema = RelationalSchema()
    diagnostics: list[Diagnostic] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        # an en dash between prefix and key is read as the plain hyphen
        line = line.replace("–", "-")
        if not line:
            continue
        match = _LINE_RE.match(line)
        if match is None:
            diagnostics.append(
                Diagnostic("SYNTAX", Severity.ERROR,
                           f"malformed relation line {line!r}", line_no)
            )
            continue
        name, body = match.groups()
        if name in seen:
            diagnostics.append(
                Diagnostic("REF", Severity.ERROR,
                           f"relation {name!r} is declared more than once", line_no)
            )
            continue
        seen.add(name)
        if body.strip() == "":
            diagnostics.append(
                Diagnostic("SYNTAX", Severity.ERROR,
                           f"relation {name!r} has no attributes", line_no)
            )
            continue
        attributes: list[RdsAttribute] = []
        attr_names: set[str] = set()
        for part in _split_attributes(body):
            attr = _parse_attribute(part, line_no, diagnostics)
            if attr is None:
                continue
            display = attr.display_name()
            if display in attr_names:
                diagnostics.append(
                    Diagnostic("REF", Severity.ERROR,
                               f"attribute {display!r} appears more than once in "
                               f"relation {name!r}", line_no)
                )
                continue
            attr_names.add(display)
            attributes.append(attr)
        schema.relations.append(Relation(name, attributes))
    if has_errors(diagnostics):
        return None, diagnostics
    return schema, diagnostics

"""Text format for ER models.

Grammar (newline-insensitive, ``//`` line comments, UTF-8)::

    entity  <Name> { key <Attr>; [key <Attr>;]* [attr <Attr>; | multi <Attr>;]* }
    subtype <Name> of <Super> { [attr <Attr>;]* }
    weak    <Name> of <Owner> via <RelName> { partial <Attr>; [attr <Attr>;]* }
    rel     <Name> ( <P> <min>..<max> , <P> <min>..<max> ) { [attr <Attr>;]* }

Identifiers are purely alphabetic; the lexer rejects anything else at the
character-class rule (R2.5.2).  Minima are ``0`` or ``1``; maxima are ``1``
or ``n``.  Declarations inside a block may appear in any order and keep
that order through a parse and re-emit; canonical form fixes only layout.
Notation rules beyond the character class are the validator's business,
not the parser's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    MAX_MANY,
    Attribute,
    AttributeKind,
    CardinalityPair,
    Diagnostic,
    ERModel,
    RegularEntityType,
    RelationshipEndpoint,
    RelationshipType,
    Severity,
    Subtype,
    WeakEntityType,
    has_errors,
)

_TOP_KEYWORDS = ("entity", "subtype", "weak", "rel")


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "number" | punctuation text | "eof"
    text: str
    line: int
    column: int


def _lex(text: str) -> tuple[list[_Token], list[Diagnostic]]:
    tokens: list[_Token] = []
    diagnostics: list[Diagnostic] = []
    line, column = 1, 1
    i = 0
    length = len(text)
    while i < length:
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            column += 1
            continue
        if text.startswith("//", i):
            while i < length and text[i] != "\n":
                i += 1
            continue
        if ch.isalpha():
            start = i
            start_col = column
            # Swallow an entire name-like chunk so one bad name yields one
            # diagnostic rather than a token-soup of syntax errors.
            while i < length and (text[i].isalnum() or text[i] in "_-/"):
                i += 1
            chunk = text[start:i]
            column += len(chunk)
            if not chunk.isalpha():
                diagnostics.append(
                    Diagnostic(
                        "R2.5.2",
                        Severity.ERROR,
                        f"name {chunk!r} contains non-alphabetic characters",
                        line,
                        start_col,
                    )
                )
            # Tokenized either way so one bad name cannot cascade into
            # follow-on syntax errors.
            tokens.append(_Token("name", chunk, line, start_col))
            continue
        if ch.isdigit():
            start = i
            start_col = column
            while i < length and text[i].isdigit():
                i += 1
            tokens.append(_Token("number", text[start:i], line, start_col))
            column += i - start
            continue
        if text.startswith("..", i):
            tokens.append(_Token("..", "..", line, column))
            i += 2
            column += 2
            continue
        if ch in "{}(),;":
            tokens.append(_Token(ch, ch, line, column))
            i += 1
            column += 1
            continue
        diagnostics.append(
            Diagnostic(
                "SYNTAX", Severity.ERROR, f"unexpected character {ch!r}", line, column
            )
        )
        i += 1
        column += 1
    tokens.append(_Token("eof", "", line, column))
    return tokens, diagnostics


@dataclass
class _RawMember:
    keyword: str
    name: str
    line: int


@dataclass
class _RawConstruct:
    keyword: str
    name: str
    line: int
    column: int
    supertype: str | None = None
    owner: str | None = None
    via: str | None = None
    endpoints: list[tuple[str, str, str]] = field(default_factory=list)
    members: list[_RawMember] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def error(self, message: str, token: _Token | None = None) -> None:
        token = token or self.peek()
        self.diagnostics.append(
            Diagnostic("SYNTAX", Severity.ERROR, message, token.line, token.column)
        )

    def expect(self, kind: str, what: str) -> _Token | None:
        token = self.peek()
        if token.kind != kind:
            self.error(f"expected {what}, found {token.text or 'end of input'!r}")
            return None
        return self.advance()

    def expect_name(self, what: str) -> str | None:
        token = self.expect("name", what)
        return token.text if token else None

    def sync_to_top(self) -> None:
        while True:
            token = self.peek()
            if token.kind == "eof":
                return
            if token.kind == "name" and token.text in _TOP_KEYWORDS:
                return
            self.advance()

    def parse(self) -> list[_RawConstruct]:
        constructs: list[_RawConstruct] = []
        while self.peek().kind != "eof":
            token = self.peek()
            if token.kind != "name" or token.text not in _TOP_KEYWORDS:
                self.error(
                    f"expected one of {', '.join(_TOP_KEYWORDS)}, "
                    f"found {token.text or 'end of input'!r}"
                )
                self.advance()
                self.sync_to_top()
                continue
            construct = self.parse_construct()
            if construct is not None:
                constructs.append(construct)
            else:
                self.sync_to_top()
        return constructs

    def parse_construct(self) -> _RawConstruct | None:
        keyword_token = self.advance()
        keyword = keyword_token.text
        name = self.expect_name(f"a name after '{keyword}'")
        if name is None:
            return None
        construct = _RawConstruct(
            keyword, name, keyword_token.line, keyword_token.column
        )
        if keyword == "subtype":
            if not self.expect_keyword("of"):
                return None
            construct.supertype = self.expect_name("a supertype name")
            if construct.supertype is None:
                return None
        elif keyword == "weak":
            if not self.expect_keyword("of"):
                return None
            construct.owner = self.expect_name("an owner entity name")
            if construct.owner is None:
                return None
            if not self.expect_keyword("via"):
                return None
            construct.via = self.expect_name("an identifying relationship name")
            if construct.via is None:
                return None
        elif keyword == "rel":
            if not self.parse_endpoints(construct):
                return None
        if not self.parse_body(construct):
            return None
        return construct

    def expect_keyword(self, word: str) -> bool:
        token = self.peek()
        if token.kind == "name" and token.text == word:
            self.advance()
            return True
        self.error(f"expected '{word}', found {token.text or 'end of input'!r}")
        return False

    def parse_endpoints(self, construct: _RawConstruct) -> bool:
        if self.expect("(", "'('") is None:
            return False
        for position in range(2):
            participant = self.expect_name("a participant name")
            if participant is None:
                return False
            pair = self.parse_pair()
            if pair is None:
                return False
            construct.endpoints.append((participant, pair[0], pair[1]))
            if position == 0 and self.expect(",", "','") is None:
                return False
        return self.expect(")", "')'") is not None

    def parse_pair(self) -> tuple[str, str] | None:
        token = self.peek()
        if token.kind != "number" or token.text not in ("0", "1"):
            self.error(f"minimum participation must be 0 or 1, found {token.text!r}")
            return None
        self.advance()
        minimum = token.text
        if self.expect("..", "'..'") is None:
            return None
        token = self.peek()
        if token.kind == "number" and token.text == "1":
            maximum = "1"
        elif token.kind == "name" and token.text in ("n", "N"):
            maximum = MAX_MANY
        else:
            self.error(f"maximum participation must be 1 or n, found {token.text!r}")
            return None
        self.advance()
        return minimum, maximum

    def parse_body(self, construct: _RawConstruct) -> bool:
        if self.expect("{", "'{'") is None:
            return False
        allowed = {
            "entity": ("key", "attr", "multi"),
            "subtype": ("attr",),
            "weak": ("partial", "attr"),
            "rel": ("attr",),
        }[construct.keyword]
        while True:
            token = self.peek()
            if token.kind == "}":
                self.advance()
                return True
            if token.kind == "eof":
                self.error("unterminated block, expected '}'")
                return False
            if token.kind != "name" or token.text not in allowed:
                self.error(
                    f"expected one of {', '.join(allowed)} or '}}', "
                    f"found {token.text or 'end of input'!r}"
                )
                return False
            self.advance()
            member_name = self.expect_name(f"a name after '{token.text}'")
            if member_name is None:
                return False
            if self.expect(";", "';'") is None:
                return False
            construct.members.append(_RawMember(token.text, member_name, token.line))
        # unreachable


_MEMBER_KINDS = {
    "key": AttributeKind.KEY,
    "attr": AttributeKind.SIMPLE,
    "multi": AttributeKind.MULTIVALUED,
    "partial": AttributeKind.PARTIAL_KEY,
}


def _resolve(constructs: list[_RawConstruct]) -> tuple[ERModel | None, list[Diagnostic]]:
    diagnostics: list[Diagnostic] = []

    def err(construct: _RawConstruct, rule: str, message: str) -> None:
        diagnostics.append(
            Diagnostic(rule, Severity.ERROR, message, construct.line, construct.column,
                       element=f"{construct.keyword} {construct.name}")
        )

    # Global name uniqueness covers the four element kinds plus identifying
    # relationship names, which reversal regenerates as first-class names.
    taken: set[str] = set()
    for construct in constructs:
        names = [construct.name]
        if construct.via is not None:
            names.append(construct.via)
        for name in names:
            if name in taken:
                err(construct, "REF", f"name {name!r} is already declared")
            taken.add(name)

    entity_names = {c.name for c in constructs if c.keyword == "entity"}
    subtype_names = {c.name for c in constructs if c.keyword == "subtype"}

    def attributes_of(construct: _RawConstruct) -> tuple[Attribute, ...]:
        seen: set[str] = set()
        collected: list[Attribute] = []
        for member in construct.members:
            if member.name in seen:
                err(construct, "REF",
                    f"attribute {member.name!r} declared more than once")
                continue
            seen.add(member.name)
            collected.append(Attribute(member.name, _MEMBER_KINDS[member.keyword]))
        return tuple(collected)

    entities: list[RegularEntityType] = []
    subtypes: list[Subtype] = []
    weaks: list[WeakEntityType] = []
    relationships: list[RelationshipType] = []

    for construct in constructs:
        attrs = attributes_of(construct)
        if construct.keyword == "entity":
            if not any(a.kind is AttributeKind.KEY for a in attrs):
                err(construct, "MODEL",
                    f"entity {construct.name!r} declares no key attribute")
            entities.append(RegularEntityType(construct.name, attrs))
        elif construct.keyword == "subtype":
            if construct.supertype not in entity_names:
                err(construct, "REF",
                    f"supertype {construct.supertype!r} is not a regular entity type")
            subtypes.append(Subtype(construct.name, construct.supertype or "", attrs))
        elif construct.keyword == "weak":
            if construct.owner not in entity_names:
                err(construct, "REF",
                    f"owner {construct.owner!r} is not a regular entity type")
            partials = [a for a in attrs if a.kind is AttributeKind.PARTIAL_KEY]
            if len(partials) != 1:
                err(construct, "MODEL",
                    f"weak entity {construct.name!r} needs exactly one partial key, "
                    f"found {len(partials)}")
                partials = partials or [Attribute("", AttributeKind.PARTIAL_KEY)]
            rest = tuple(a for a in attrs if a.kind is not AttributeKind.PARTIAL_KEY)
            weaks.append(
                WeakEntityType(construct.name, construct.owner or "",
                               construct.via or "", partials[0], rest)
            )
        else:  # rel
            endpoints = []
            for participant, minimum, maximum in construct.endpoints:
                if participant not in entity_names and participant not in subtype_names:
                    err(construct, "REF",
                        f"participant {participant!r} is not an entity type or subtype")
                endpoints.append(
                    RelationshipEndpoint(participant, CardinalityPair(minimum, maximum))
                )
            relationships.append(
                RelationshipType(construct.name, (endpoints[0], endpoints[1]), attrs)
            )

    if has_errors(diagnostics):
        return None, diagnostics
    model = ERModel(
        tuple(entities), tuple(subtypes), tuple(weaks), tuple(relationships)
    )
    return model, diagnostics


def parse_er(text: str, path: str = "<er>") -> tuple[ERModel | None, list[Diagnostic]]:
    """Parse ER source text; returns (model, diagnostics), model None on errors."""
    tokens, diagnostics = _lex(text)
    parser = _Parser(tokens)
    constructs = parser.parse()
    diagnostics.extend(parser.diagnostics)
    if has_errors(diagnostics):
        return None, diagnostics
    model, resolution = _resolve(constructs)
    diagnostics.extend(resolution)
    if model is None:
        return None, diagnostics
    return model, diagnostics


def _block(header: str, members: list[str]) -> list[str]:
    if not members:
        return [f"{header} {{ }}"]
    return [f"{header} {{", *(f"  {line}" for line in members), "}"]


_KIND_KEYWORDS = {
    AttributeKind.KEY: "key",
    AttributeKind.SIMPLE: "attr",
    AttributeKind.MULTIVALUED: "multi",
    AttributeKind.PARTIAL_KEY: "partial",
}


def _member_lines(attributes) -> list[str]:
    return [f"{_KIND_KEYWORDS[a.kind]} {a.name};" for a in attributes]


def emit_er(model: ERModel) -> str:
    """Render a model in canonical form: fixed construct grouping, two-space
    indent, one declaration per line, blank line between constructs."""
    blocks: list[list[str]] = []
    for entity in model.entities:
        blocks.append(_block(f"entity {entity.name}", _member_lines(entity.attributes)))
    for subtype in model.subtypes:
        blocks.append(
            _block(f"subtype {subtype.name} of {subtype.supertype}",
                   _member_lines(subtype.attributes))
        )
    for weak in model.weak_entities:
        members = _member_lines((weak.partial_key, *weak.attributes))
        blocks.append(
            _block(
                f"weak {weak.name} of {weak.owner} via {weak.identifying_relationship}",
                members,
            )
        )
    for rel in model.relationships:
        sides = ", ".join(
            f"{ep.participant} {ep.pair.min}..{ep.pair.max}" for ep in rel.endpoints
        )
        blocks.append(
            _block(f"rel {rel.name} ({sides})", _member_lines(rel.attributes))
        )
    return "\n\n".join("\n".join(block) for block in blocks) + "\n"

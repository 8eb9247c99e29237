"""Recursive-descent parser for ``.hrim`` models and ``.hrimd`` descriptors.

Both grammars are keyword-block forms over one token stream. On a syntax
error inside a block the parser records a diagnostic and skips ahead to the
next item keyword (or the closing brace) at the enclosing block depth, so a
single run reports every independent mistake in the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

from hrim.model import (
    ActionSchema,
    ClaimedElement,
    ComponentModel,
    ConstantDef,
    DeviceKind,
    Direction,
    ElementCategory,
    ElementKind,
    FieldDef,
    Finding,
    Identity,
    InterfaceElement,
    InvalidIdentity,
    Literal,
    MessageSchema,
    ModuleDescriptor,
    Obligation,
    OptionalGroup,
    Schema,
    ServiceSchema,
    Span,
    common_elements,
    error,
    validate_model,
)
from hrim.modelc.lexer import LexError, SourceFile, Token, TokenKind, tokenize

ELEMENT_KEYWORDS = {"topic": ElementKind.TOPIC, "service": ElementKind.SERVICE,
                    "action": ElementKind.ACTION, "parameter": ElementKind.PARAMETER}
SCHEMA_KEYWORDS = ("message", "srv", "action_schema")
MODEL_ITEMS = frozenset({"kind", "group", *ELEMENT_KEYWORDS, *SCHEMA_KEYWORDS})
GROUP_ITEMS = frozenset(ELEMENT_KEYWORDS)
DESCRIPTOR_ITEMS = frozenset({"kind", "identity", *ELEMENT_KEYWORDS, *SCHEMA_KEYWORDS})

# closed registry of codes the parser itself can emit
DIAGNOSTIC_CODES = frozenset({
    "E_LEX_ILLEGAL_CHAR", "E_LEX_UNTERMINATED_STRING", "E_NO_MODEL_BLOCK",
    "E_NO_DESCRIPTOR_BLOCK", "E_UNEXPECTED_TOKEN", "E_TRAILING_INPUT",
    "E_MISSING_KIND", "E_MISSING_DIRECTION", "E_MISSING_SCHEMA", "E_MISSING_TYPE",
    "E_MISSING_CATEGORY", "E_MISSING_IDENTITY", "E_INVALID_VALUE", "E_INVALID_IDENTITY",
    "E_UNKNOWN_PROPERTY", "E_DUPLICATE_PROPERTY", "E_PROPERTY_NOT_ALLOWED",
    "E_DUPLICATE_ELEMENT", "E_DUPLICATE_SCHEMA", "E_DUPLICATE_GROUP",
    "E_REQUIRES_OUTSIDE_GROUP",
})

_PROPERTY_KEYS = {
    "obligation", "category", "direction", "schema", "type", "default", "requires", "unit", "value",
}
_MODEL_PROPERTIES = _PROPERTY_KEYS - {"value"}
_DESCRIPTOR_PROPERTIES = {"direction", "schema", "type", "unit", "value"}


class ParseError(Exception):
    def __init__(self, code: str, message: str, span: Span) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span

    def finding(self) -> Finding:
        return error(self.code, "syntax", self.message, self.span)


class ParseFailure(Exception):
    """Raised by load helpers when a file has error diagnostics."""

    def __init__(self, source: SourceFile, diagnostics: list[Finding]) -> None:
        self.source = source
        self.diagnostics = diagnostics
        first = diagnostics[0]
        super().__init__(f"{source.path}:{first.span.start_line}:{first.span.start_col}: {first}")


@dataclass
class ParseResult:
    model: Optional[ComponentModel]
    diagnostics: list[Finding] = field(default_factory=list)
    source: Optional[SourceFile] = None

    @property
    def ok(self) -> bool:
        return self.model is not None and not any(d.is_error for d in self.diagnostics)


@dataclass
class _RawElement:
    kind: ElementKind
    name: str
    span: Span
    props: dict[str, tuple[object, Span]]


class _Parser:
    def __init__(self, source: SourceFile, tokens: list[Token]) -> None:
        self.source = source
        self.tokens = tokens
        self.pos = 0
        self.depth = 0
        self.diagnostics: list[Finding] = []

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind is not TokenKind.EOF:
            self.pos += 1
            if t.is_(TokenKind.PUNCT, "{"):
                self.depth += 1
            elif t.is_(TokenKind.PUNCT, "}"):
                self.depth -= 1
        return t

    def at_punct(self, text: str) -> bool:
        return self.tok.is_(TokenKind.PUNCT, text)

    def at_word(self, *words: str) -> bool:
        return self.tok.kind in (TokenKind.KEYWORD, TokenKind.IDENT) and self.tok.text in words

    def fail(self, message: str, token: Optional[Token] = None, code: str = "E_UNEXPECTED_TOKEN"):
        token = token or self.tok
        found = "end of file" if token.kind is TokenKind.EOF else repr(token.text)
        raise ParseError(code, f"{message}, found {found}", token.span)

    def report(self, code: str, message: str, span: Span, subject: str = "syntax") -> None:
        self.diagnostics.append(error(code, subject, message, span))

    def note(self, exc: ParseError) -> None:
        """Record a syntax error; once input has run out, report only the first."""
        eof = self.tokens[-1].span
        if exc.span == eof and self.diagnostics and self.diagnostics[-1].span == eof:
            return
        self.diagnostics.append(exc.finding())

    def expect_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def expect_word(self, what: str) -> Token:
        if self.tok.kind not in (TokenKind.IDENT, TokenKind.KEYWORD):
            self.fail(f"expected {what}")
        return self.advance()

    def optional_comma(self) -> None:
        if self.at_punct(","):
            self.advance()

    # -- recovery -----------------------------------------------------------

    def is_sync(self, items: frozenset[str]) -> bool:
        t = self.tok
        if t.kind is TokenKind.DIRECTIVE:
            return True
        return t.kind in (TokenKind.KEYWORD, TokenKind.IDENT) and t.text in items

    def recover(self, start: int, depth: int, items: frozenset[str]) -> None:
        """Skip to the next item start or closing brace at ``depth``.

        Always leaves the cursor past ``start`` so a failing item can never
        be retried at the same position.
        """
        if self.pos == start:
            self.advance()
        while self.tok.kind is not TokenKind.EOF:
            if self.depth == depth and (self.is_sync(items) or self.at_punct("}")):
                return
            if self.depth < depth:
                return
            self.advance()

    def block_items(self, depth: int, items: frozenset[str], parse_item: Callable[[], None]) -> None:
        while not self.at_punct("}"):
            if self.tok.kind is TokenKind.EOF:
                self.fail("expected '}'")
            start = self.pos
            try:
                parse_item()
            except ParseError as exc:
                self.note(exc)
                self.recover(start, depth, items)
        self.advance()

    # -- shared pieces ------------------------------------------------------

    def parse_type(self) -> str:
        base = self.tok
        if base.kind is not TokenKind.IDENT:
            self.fail("expected a type name")
        self.advance()
        if not self.at_punct("["):
            return base.text
        self.advance()
        size = ""
        if self.tok.kind is TokenKind.NUMBER and isinstance(self.tok.value, int) and self.tok.value >= 0:
            size = str(self.advance().value)
        self.expect_punct("]")
        return f"{base.text}[{size}]"

    def parse_literal(self) -> Literal:
        t = self.tok
        if t.kind in (TokenKind.NUMBER, TokenKind.STRING):
            self.advance()
            return t.value
        if t.kind is TokenKind.IDENT and t.text in ("true", "false"):
            self.advance()
            return t.text == "true"
        self.fail("expected a literal value")

    def parse_field(self) -> FieldDef:
        start = self.advance().span  # 'field'
        name = self.expect_word("field name")
        self.expect_punct(":")
        ftype = self.parse_type()
        unit = None
        end = self.tokens[self.pos - 1].span
        if self.at_word("unit"):
            self.advance()
            if self.tok.kind is not TokenKind.STRING:
                self.fail("expected a quoted unit")
            unit_tok = self.advance()
            unit, end = unit_tok.value, unit_tok.span
        return FieldDef(name.text, ftype, unit, span=start.cover(end))

    def parse_constant(self) -> ConstantDef:
        start = self.advance().span  # 'constant'
        name = self.expect_word("constant name")
        self.expect_punct(":")
        ctype = self.parse_type()
        self.expect_punct("=")
        value = self.parse_literal()
        return ConstantDef(name.text, ctype, value, span=start.cover(self.tokens[self.pos - 1].span))

    def parse_fields_block(self, allow_constants: bool) -> tuple[list[FieldDef], list[ConstantDef]]:
        self.expect_punct("{")
        fields: list[FieldDef] = []
        constants: list[ConstantDef] = []
        while not self.at_punct("}"):
            if self.at_word("field"):
                fields.append(self.parse_field())
            elif allow_constants and self.at_word("constant"):
                constants.append(self.parse_constant())
            else:
                self.fail("expected 'field'" + (" or 'constant'" if allow_constants else ""))
        self.advance()
        return fields, constants

    def parse_schema(self) -> Schema:
        head = self.advance()
        name = self.expect_word("schema name")
        if head.text == "message":
            fields, constants = self.parse_fields_block(allow_constants=True)
            return MessageSchema(name.text, tuple(fields), tuple(constants),
                                 span=head.span.cover(self.tokens[self.pos - 1].span))
        sections = ("request", "response") if head.text == "srv" else ("goal", "result", "feedback")
        self.expect_punct("{")
        parsed = []
        for section in sections:
            if not self.at_word(section):
                self.fail(f"expected section {section!r}")
            self.advance()
            parsed.append(tuple(self.parse_fields_block(allow_constants=False)[0]))
        self.expect_punct("}")
        span = head.span.cover(self.tokens[self.pos - 1].span)
        cls = ServiceSchema if head.text == "srv" else ActionSchema
        return cls(name.text, *parsed, span=span)

    def parse_element(self, allowed: set[str]) -> _RawElement:
        head = self.advance()
        kind = ELEMENT_KEYWORDS[head.text]
        name = self.expect_word(f"{kind} name")
        self.expect_punct("{")
        props: dict[str, tuple[object, Span]] = {}
        while not self.at_punct("}"):
            key_tok = self.tok
            key = key_tok.text
            if key_tok.kind not in (TokenKind.IDENT, TokenKind.KEYWORD) or key not in _PROPERTY_KEYS:
                self.fail("expected a property", code="E_UNKNOWN_PROPERTY")
            if key not in allowed:
                self.fail(f"property {key!r} is not allowed here", code="E_PROPERTY_NOT_ALLOWED")
            self.advance()
            if key == "unit":
                if self.tok.kind is not TokenKind.STRING:
                    self.fail("expected a quoted unit")
                value_tok = self.advance()
                value: object = value_tok.value
            else:
                self.expect_punct(":")
                value_tok = self.tok
                if key in ("default", "value"):
                    value = self.parse_literal()
                elif key == "type":
                    value = self.parse_type()
                else:
                    value = self.expect_word(f"a value for {key!r}").text
            if key in props:
                self.report("E_DUPLICATE_PROPERTY", f"property {key!r} given twice", key_tok.span, name.text)
            else:
                props[key] = (value, key_tok.span.cover(value_tok.span))
            self.optional_comma()
        close = self.advance()
        return _RawElement(kind, name.text, head.span.cover(close.span), props)

    def enum_prop(self, raw: _RawElement, key: str, enum_cls):
        if key not in raw.props:
            return None
        value, span = raw.props[key]
        try:
            return enum_cls(value)
        except ValueError:
            choices = ", ".join(m.value for m in enum_cls)
            self.report("E_INVALID_VALUE", f"{key} must be one of {choices}, got {value!r}", span, raw.name)
            return None

    def check_shape(self, raw: _RawElement) -> bool:
        """Report structural gaps common to both grammars; True if usable."""
        ok = True
        props = raw.props
        if raw.kind is ElementKind.TOPIC and "direction" not in props:
            self.report("E_MISSING_DIRECTION", f"topic {raw.name!r} needs 'direction:'", raw.span, raw.name)
            ok = False
        if raw.kind is not ElementKind.TOPIC and "direction" in props:
            self.report("E_PROPERTY_NOT_ALLOWED", f"{raw.kind} cannot have a direction",
                        props["direction"][1], raw.name)
            ok = False
        if raw.kind is ElementKind.PARAMETER:
            if "type" not in props:
                self.report("E_MISSING_TYPE", f"parameter {raw.name!r} needs 'type:'", raw.span, raw.name)
                ok = False
            if "schema" in props:
                self.report("E_PROPERTY_NOT_ALLOWED", "parameters have a type, not a schema",
                            props["schema"][1], raw.name)
                ok = False
        else:
            if "schema" not in props:
                self.report("E_MISSING_SCHEMA", f"{raw.kind} {raw.name!r} needs 'schema:'", raw.span, raw.name)
                ok = False
            for key in ("type", "unit", "default", "value"):
                if key in props:
                    self.report("E_PROPERTY_NOT_ALLOWED", f"only parameters carry {key!r}",
                                props[key][1], raw.name)
                    ok = False
        return ok

    def parse_file_header(self, keyword: str, missing_code: str) -> Token:
        if not self.at_word(keyword):
            if self.tok.kind is TokenKind.EOF:
                raise ParseError(missing_code, f"file contains no '{keyword}' block", self.tok.span)
            self.fail(f"expected '{keyword}'", code=missing_code)
        return self.advance()

    def expect_eof(self) -> None:
        if self.tok.kind is not TokenKind.EOF:
            self.report("E_TRAILING_INPUT", "only one top-level block is allowed per file", self.tok.span)


class ModelParser(_Parser):
    def __init__(self, source: SourceFile, tokens: list[Token]) -> None:
        super().__init__(source, tokens)
        self.kind: Optional[DeviceKind] = None
        self.kind_seen = False
        self.device_name = ""
        self.elements: list[InterfaceElement] = []
        self.groups: list[OptionalGroup] = []
        self.schemas: list[Schema] = []

    def add_element(self, element: InterfaceElement) -> None:
        if any(e.name == element.name for e in self.elements):
            self.report("E_DUPLICATE_ELEMENT", f"element {element.name!r} declared twice",
                        element.span, element.name)
            return
        self.elements.append(element)

    def build(self, raw: _RawElement, group: Optional[str], group_category) -> Optional[InterfaceElement]:
        ok = self.check_shape(raw)
        obligation = self.enum_prop(raw, "obligation", Obligation)
        category = self.enum_prop(raw, "category", ElementCategory)
        direction = self.enum_prop(raw, "direction", Direction)
        if ("obligation" in raw.props and obligation is None) or ("category" in raw.props and category is None) \
                or ("direction" in raw.props and direction is None):
            ok = False
        if category is None and "category" not in raw.props:
            if group is None:
                self.report("E_MISSING_CATEGORY", f"{raw.kind} {raw.name!r} needs 'category:'",
                            raw.span, raw.name)
                ok = False
            else:
                category = group_category
        if obligation is None and "obligation" not in raw.props and category is not None:
            obligation = category.required_obligation
        required = False
        if "requires" in raw.props:
            value, span = raw.props["requires"]
            if value != "group":
                self.report("E_INVALID_VALUE", f"requires must be 'group', got {value!r}", span, raw.name)
                ok = False
            elif group is None:
                self.report("E_REQUIRES_OUTSIDE_GROUP", "'requires: group' outside a group", span, raw.name)
                ok = False
            required = True
        if not ok:
            return None
        get = lambda key: raw.props[key][0] if key in raw.props else None  # noqa: E731
        return InterfaceElement(
            element_kind=raw.kind,
            name=raw.name,
            obligation=obligation,
            category=category,
            direction=direction,
            schema_ref=get("schema"),
            param_type=get("type"),
            unit=get("unit"),
            default_value=get("default"),
            group=group,
            required_in_group=required,
            span=raw.span,
        )

    def parse_group(self) -> None:
        head = self.advance()
        name = self.expect_word("group name")
        self.expect_punct("{")
        depth = self.depth
        raws: list[_RawElement] = []

        def item() -> None:
            if not self.at_word(*GROUP_ITEMS):
                self.fail("expected an element inside the group")
            raws.append(self.parse_element(_MODEL_PROPERTIES))

        self.block_items(depth, GROUP_ITEMS, item)
        span = head.span.cover(self.tokens[self.pos - 1].span)
        category = ElementCategory.OPTIONAL_HARDWARE
        for raw in raws:
            declared = raw.props.get("category", (None,))[0]
            if declared in ElementCategory._value2member_map_:
                category = ElementCategory(declared)
                break
        members = []
        for raw in raws:
            element = self.build(raw, name.text, category)
            if element is not None:
                before = len(self.elements)
                self.add_element(element)
                if len(self.elements) > before:
                    members.append(element.name)
        if any(g.name == name.text for g in self.groups):
            self.report("E_DUPLICATE_GROUP", f"group {name.text!r} declared twice", span, name.text)
            return
        self.groups.append(OptionalGroup(name.text, tuple(members), span=span))

    def parse_item(self) -> None:
        t = self.tok
        if t.kind is TokenKind.DIRECTIVE:
            if t.text != "@common":
                self.fail("unknown directive")
            self.advance()
            for element in common_elements(self.device_name, span=t.span):
                self.add_element(element)
        elif self.at_word("kind"):
            self.advance()
            self.expect_punct(":")
            value = self.expect_word("a device kind")
            if self.kind_seen:
                self.report("E_DUPLICATE_PROPERTY", "kind given twice", value.span, self.device_name)
            self.kind_seen = True
            try:
                self.kind = DeviceKind(value.text)
            except ValueError:
                self.report("E_INVALID_VALUE",
                            f"kind must be one of {', '.join(k.value for k in DeviceKind)}, "
                            f"got {value.text!r}", value.span, self.device_name)
        elif self.at_word(*ELEMENT_KEYWORDS):
            element = self.build(self.parse_element(_MODEL_PROPERTIES), None, None)
            if element is not None:
                self.add_element(element)
        elif self.at_word("group"):
            self.parse_group()
        elif self.at_word(*SCHEMA_KEYWORDS):
            schema = self.parse_schema()
            if any(s.name == schema.name for s in self.schemas):
                self.report("E_DUPLICATE_SCHEMA", f"schema {schema.name!r} declared twice",
                            schema.span, schema.name)
            else:
                self.schemas.append(schema)
        else:
            self.fail("expected a model item")

    def parse(self) -> Optional[ComponentModel]:
        try:
            head = self.parse_file_header("model", "E_NO_MODEL_BLOCK")
            name = self.expect_word("model name")
            self.device_name = name.text
            self.expect_punct("{")
            self.block_items(1, MODEL_ITEMS, self.parse_item)
        except ParseError as exc:
            self.note(exc)
            return None
        span = head.span.cover(self.tokens[self.pos - 1].span)
        self.expect_eof()
        if not self.kind_seen:
            self.report("E_MISSING_KIND", "model has no 'kind:'", span, self.device_name)
        if self.diagnostics:
            return None
        return ComponentModel(self.kind, self.device_name, tuple(self.elements),
                              tuple(self.groups), tuple(self.schemas), span=span)


class DescriptorParser(_Parser):
    def __init__(self, source: SourceFile, tokens: list[Token]) -> None:
        super().__init__(source, tokens)
        self.kind: Optional[DeviceKind] = None
        self.identity: Optional[Identity] = None
        self.identity_seen = False
        self.elements: list[ClaimedElement] = []
        self.schemas: list[Schema] = []

    def parse_identity(self) -> None:
        head = self.advance()
        self.expect_punct("{")
        values: dict[str, Token] = {}
        while not self.at_punct("}"):
            key = self.expect_word("'vendor', 'product' or 'instance'")
            if key.text not in ("vendor", "product", "instance"):
                self.fail("expected 'vendor', 'product' or 'instance'", key, "E_UNKNOWN_PROPERTY")
            self.expect_punct(":")
            if self.tok.kind not in (TokenKind.IDENT, TokenKind.NUMBER, TokenKind.STRING):
                self.fail("expected an identity token")
            values[key.text] = self.advance()
            self.optional_comma()
        close = self.advance()
        self.identity_seen = True
        for key in ("vendor", "product", "instance"):
            if key not in values:
                raise InvalidIdentity(f"identity has no {key!r}", head.span.cover(close.span))
        try:
            self.identity = Identity(*(values[k].text for k in ("vendor", "product", "instance")))
        except InvalidIdentity as exc:
            bad = next(t for t in values.values() if str(t.text) in str(exc))
            raise InvalidIdentity(str(exc), bad.span) from None

    def parse_item(self) -> None:
        if self.at_word("kind"):
            self.advance()
            self.expect_punct(":")
            value = self.expect_word("a device kind")
            try:
                self.kind = DeviceKind(value.text)
            except ValueError:
                self.report("E_INVALID_VALUE", f"unknown device kind {value.text!r}", value.span)
        elif self.at_word("identity"):
            self.parse_identity()
        elif self.at_word(*ELEMENT_KEYWORDS):
            raw = self.parse_element(_DESCRIPTOR_PROPERTIES)
            ok = self.check_shape(raw)
            direction = self.enum_prop(raw, "direction", Direction)
            if not ok or ("direction" in raw.props and direction is None):
                return
            if any(e.name == raw.name for e in self.elements):
                self.report("E_DUPLICATE_ELEMENT", f"element {raw.name!r} claimed twice", raw.span, raw.name)
                return
            get = lambda key: raw.props[key][0] if key in raw.props else None  # noqa: E731
            self.elements.append(ClaimedElement(
                raw.kind, raw.name, direction, get("schema"), get("type"), get("unit"), get("value"),
                span=raw.span,
            ))
        elif self.at_word(*SCHEMA_KEYWORDS):
            schema = self.parse_schema()
            if any(s.name == schema.name for s in self.schemas):
                self.report("E_DUPLICATE_SCHEMA", f"schema {schema.name!r} declared twice", schema.span)
            else:
                self.schemas.append(schema)
        else:
            self.fail("expected a descriptor item")

    def parse(self) -> Optional[ModuleDescriptor]:
        try:
            head = self.parse_file_header("descriptor", "E_NO_DESCRIPTOR_BLOCK")
            name = self.expect_word("device name")
            self.expect_punct("{")
            self.block_items(1, DESCRIPTOR_ITEMS, self.parse_item)
        except ParseError as exc:
            self.note(exc)
            return None
        span = head.span.cover(self.tokens[self.pos - 1].span)
        self.expect_eof()
        if self.kind is None and not any(d.code == "E_INVALID_VALUE" for d in self.diagnostics):
            self.report("E_MISSING_KIND", "descriptor has no 'kind:'", span)
        if not self.identity_seen:
            self.report("E_MISSING_IDENTITY", "descriptor has no 'identity { ... }' block", span)
        if self.diagnostics:
            return None
        return ModuleDescriptor(self.identity, self.kind, name.text, tuple(self.elements),
                                tuple(self.schemas), span=span)


def _lex(source: SourceFile) -> Union[list[Token], Finding]:
    try:
        return tokenize(source)
    except LexError as exc:
        return error(exc.code, "lexer", exc.message, exc.span)


def parse_model(source: Union[SourceFile, str]) -> ParseResult:
    """Parse one ``model`` block and run the structural validator over it."""
    if isinstance(source, str):
        source = SourceFile(source)
    tokens = _lex(source)
    if isinstance(tokens, Finding):
        return ParseResult(None, [tokens], source)
    parser = ModelParser(source, tokens)
    model = parser.parse()
    diagnostics = parser.diagnostics
    if model is not None:
        for finding in validate_model(model):
            if finding.span is None:
                finding = Finding(finding.code, finding.severity, finding.subject,
                                  finding.message, model.span)
            diagnostics.append(finding)
    return ParseResult(model, diagnostics, source)


def load_model(path: Union[str, Path]) -> ComponentModel:
    """Read a ``.hrim`` file; raise ParseFailure on any error diagnostic."""
    source = SourceFile.read(path)
    result = parse_model(source)
    errors = [d for d in result.diagnostics if d.is_error]
    if errors:
        raise ParseFailure(source, errors)
    return result.model


def parse_descriptor(source: Union[SourceFile, str]) -> ModuleDescriptor:
    """Parse a ``.hrimd`` file.

    Raises ParseFailure for syntax problems and InvalidIdentity (with a span)
    for malformed vendor/product/instance tokens.
    """
    if isinstance(source, str):
        source = SourceFile(source)
    tokens = _lex(source)
    if isinstance(tokens, Finding):
        raise ParseFailure(source, [tokens])
    parser = DescriptorParser(source, tokens)
    descriptor = parser.parse()
    if descriptor is None:
        raise ParseFailure(source, parser.diagnostics)
    return descriptor

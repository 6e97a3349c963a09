"""Ring definition files (TOML) and the polynomial / class literal syntax."""

from __future__ import annotations

import logging
import re
import tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from cech import CechClass, normalize_class
from rings import Assumptions, RingPresentation, make_ring
from scalars import FieldDescriptor, RationalScalar, ScalarError

logger = logging.getLogger(__name__)

Poly = Dict[Tuple[int, ...], RationalScalar]

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>[-+*/^()\[\]]))")
_BARE_KEY = re.compile(r"^[A-Za-z0-9_-]+$")


class RingFileError(ValueError):
    """Malformed ring file or literal; line and column are 1-based."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.reason = message
        self.line = line
        self.column = column


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str, line: int, column: int) -> List[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN.match(text, position)
        if not match:
            offset = len(text[position:]) - len(text[position:].lstrip())
            raise RingFileError(f"unexpected character {text[position + offset]!r}", line, column + position + offset)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), start))
        position = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over + - * / ^, parentheses and juxtaposition."""

    def __init__(self, text: str, variables: Sequence[str], field: FieldDescriptor, line: int = 1, column: int = 1):
        self.text = text
        self.variables = list(variables)
        self.field = field
        self.line = line
        self.column = column
        self.tokens = _tokenize(text, line, column)
        self.position = 0
        self.zero_key = (0,) * len(self.variables)

    # token helpers

    @property
    def current(self) -> _Token:
        return self.tokens[self.position]

    def error(self, message: str, token: Optional[_Token] = None) -> RingFileError:
        token = token or self.current
        return RingFileError(message, self.line, self.column + token.offset)

    def advance(self) -> _Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def expect(self, text: str) -> _Token:
        if self.current.text != text:
            raise self.error(f"expected {text!r}, found {self.current.text or 'end of input'!r}")
        return self.advance()

    def expect_end(self):
        if self.current.kind != "end":
            raise self.error(f"unexpected {self.current.text!r}")

    # polynomial arithmetic on term dictionaries

    def constant(self, c: RationalScalar) -> Poly:
        return {self.zero_key: c} if c else {}

    def add(self, a: Poly, b: Poly, sign: int = 1) -> Poly:
        result = dict(a)
        for m, c in b.items():
            c = c if sign > 0 else -c
            value = result[m] + c if m in result else c
            if value:
                result[m] = value
            else:
                result.pop(m, None)
        return result

    def mul(self, a: Poly, b: Poly) -> Poly:
        result: Poly = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                value = result[m] + c1 * c2 if m in result else c1 * c2
                if value:
                    result[m] = value
                else:
                    result.pop(m, None)
        return result

    def power(self, a: Poly, n: int) -> Poly:
        result = self.constant(self.field.one())
        for _ in range(n):
            result = self.mul(result, a)
        return result

    def as_scalar(self, a: Poly, token: _Token, what: str) -> RationalScalar:
        if any(m != self.zero_key for m in a):
            raise self.error(f"{what} must not involve ring variables", token)
        return a.get(self.zero_key, self.field.zero())

    # grammar

    def expression(self, allow_division: bool = True) -> Poly:
        result = self.term(allow_division)
        while self.current.text in ("+", "-"):
            sign = 1 if self.advance().text == "+" else -1
            result = self.add(result, self.term(allow_division), sign)
        return result

    def term(self, allow_division: bool = True) -> Poly:
        result = self.unary(allow_division)
        while True:
            token = self.current
            if token.text == "*":
                self.advance()
                result = self.mul(result, self.unary(allow_division))
            elif token.text == "/" and allow_division:
                self.advance()
                divisor_token = self.current
                divisor = self.as_scalar(self.unary(allow_division), divisor_token, "a divisor")
                if not divisor:
                    raise self.error("division by zero in K", divisor_token)
                result = self.mul(result, self.constant(divisor.inverse()))
            elif token.kind in ("int", "ident") or token.text == "(":
                result = self.mul(result, self.unary(allow_division))
            else:
                return result

    def unary(self, allow_division: bool = True) -> Poly:
        if self.current.text == "-":
            self.advance()
            return self.add({}, self.unary(allow_division), -1)
        if self.current.text == "+":
            self.advance()
            return self.unary(allow_division)
        return self.power_expr()

    def power_expr(self) -> Poly:
        base = self.atom()
        if self.current.text == "^":
            self.advance()
            token = self.current
            if token.kind != "int":
                raise self.error("exponent must be a nonnegative integer")
            self.advance()
            return self.power(base, int(token.text))
        return base

    def atom(self) -> Poly:
        token = self.current
        if token.kind == "int":
            self.advance()
            return self.constant(self.field.constant(int(token.text)))
        if token.kind == "ident":
            self.advance()
            if token.text in self.variables:
                exponents = [0] * len(self.variables)
                exponents[self.variables.index(token.text)] = 1
                return {tuple(exponents): self.field.one()}
            if token.text in self.field.params:
                return self.constant(self.field.param(token.text))
            raise self.error(f"unknown identifier {token.text!r}", token)
        if token.text == "(":
            self.advance()
            inner = self.expression()
            self.expect(")")
            return inner
        raise self.error(f"unexpected {token.text or 'end of input'!r}")


def parse_polynomial(text: str, variables: Sequence[str], field: FieldDescriptor,
                     line: int = 1, column: int = 1) -> Poly:
    """Term dictionary of a polynomial string; coefficients reduced mod p."""
    parser = _Parser(text, variables, field, line, column)
    try:
        result = parser.expression()
    except ScalarError as e:
        raise RingFileError(str(e), line, column) from e
    parser.expect_end()
    return result


def parse_class_expression(text: str, ring: RingPresentation) -> CechClass:
    """Read ``c*[poly / v1^a1 v2^a2 ...] + ...`` into a class of ``ring``."""
    parser = _Parser(text, ring.names, ring.field)
    unbound = [ring.names[i] for i in ring.unbound_indices]
    result = CechClass(ring)
    sign = 1
    if parser.current.text in ("+", "-"):
        sign = 1 if parser.advance().text == "+" else -1
    if parser.current.text == "0" and parser.tokens[parser.position + 1].kind == "end":
        return result
    while True:
        coefficient = ring.field.one()
        while parser.current.text != "[":
            token = parser.current
            if token.kind == "end":
                raise parser.error("expected '['")
            factor = parser.as_scalar(parser.unary(), token, "a class coefficient")
            coefficient = coefficient * factor
            if parser.current.text == "*":
                parser.advance()
        bracket = parser.advance()
        numerator = parser.expression(allow_division=False)
        parser.expect("/")
        powers: Dict[str, int] = {}
        while parser.current.text != "]":
            token = parser.current
            if token.kind != "ident" or token.text not in unbound:
                raise parser.error(f"denominator needs unbound variables, found {token.text or 'end of input'!r}")
            parser.advance()
            exponent = 1
            if parser.current.text == "^":
                parser.advance()
                if parser.current.kind != "int":
                    raise parser.error("exponent must be a nonnegative integer")
                exponent = int(parser.advance().text)
            powers[token.text] = powers.get(token.text, 0) + exponent
            if parser.current.text == "*":
                parser.advance()
        parser.expect("]")
        missing = [name for name in unbound if powers.get(name, 0) <= 0]
        if missing:
            raise parser.error(f"denominator must contain every unbound variable, missing {missing}", bracket)
        element = ring.element(numerator)
        term = normalize_class(element, [powers[name] for name in unbound])
        signed = coefficient if sign > 0 else -coefficient
        result = result + term.scale(signed)
        if parser.current.kind == "end":
            return result
        if parser.current.text not in ("+", "-"):
            raise parser.error(f"unexpected {parser.current.text!r}")
        sign = 1 if parser.advance().text == "+" else -1


def _locate(text: str, section: str, key: str) -> Tuple[int, int]:
    """Line and column of the value of ``key`` inside ``[section]``."""
    lines = text.splitlines()
    in_section = False
    pattern = re.compile(r'^\s*(?:"' + re.escape(key) + r'"|' + re.escape(key) + r')\s*=\s*')
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped.startswith("["):
            in_section = stripped == f"[{section}]"
            continue
        if in_section:
            match = pattern.match(line)
            if match:
                column = match.end() + 1
                if line[match.end():match.end() + 1] in ('"', "'"):
                    column += 1
                return number, column
    return 1, 1


def _decode_error_position(error: tomllib.TOMLDecodeError) -> Tuple[int, int]:
    line = getattr(error, "lineno", None)
    column = getattr(error, "colno", None)
    if line is None:
        match = re.search(r"line (\d+), column (\d+)", str(error))
        line, column = (int(match.group(1)), int(match.group(2))) if match else (1, 1)
    return line, column


def loads_ring(text: str) -> RingPresentation:
    """Build a presentation from ring-file text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        line, column = _decode_error_position(e)
        raise RingFileError(f"invalid TOML: {e}", line, column) from e

    field_data = data.get("field")
    if not isinstance(field_data, dict) or "p" not in field_data:
        raise RingFileError("missing [field] section with p", *_locate(text, "field", "p"))
    p = field_data["p"]
    if isinstance(p, bool) or not isinstance(p, int):
        raise RingFileError(f"p must be an integer, got {p!r}", *_locate(text, "field", "p"))
    params = field_data.get("params", [])
    if not isinstance(params, list) or not all(isinstance(x, str) for x in params):
        raise RingFileError("params must be a list of names", *_locate(text, "field", "params"))
    try:
        field = FieldDescriptor(p, tuple(params), field_data.get("root_depth", 0))
    except ScalarError as e:
        raise RingFileError(str(e), *_locate(text, "field", "p")) from e

    variables_data = data.get("variables")
    if not isinstance(variables_data, dict) or not variables_data:
        raise RingFileError("missing [variables] section")
    variables = []
    for name, degree in variables_data.items():
        valid = isinstance(degree, int) and not isinstance(degree, bool) or \
            isinstance(degree, list) and degree and all(isinstance(x, int) and not isinstance(x, bool) for x in degree)
        if not valid:
            raise RingFileError(f"degree of {name} must be an integer or a list of integers",
                                *_locate(text, "variables", name))
        variables.append((name, degree))
    names = [name for name, _ in variables]

    relations = []
    for bound, source in data.get("relations", {}).items():
        line, column = _locate(text, "relations", bound)
        if not isinstance(source, str):
            raise RingFileError(f"relation for {bound} must be a string", line, column)
        if bound not in names:
            raise RingFileError(f"relation bound to unknown variable {bound!r}", line, column)
        relations.append((bound, parse_polynomial(source, names, field, line, column)))

    flags = data.get("assumptions", {})
    assumptions = Assumptions(
        isolated_singularity_asserted=bool(flags.get("isolated_singularity", False)),
        normal_asserted=bool(flags.get("normal", False)),
    )
    return make_ring(field, variables, relations, assumptions)


def load_ring_file(path: Union[str, Path]) -> RingPresentation:
    """Read and build a ring file from disk."""
    path = Path(path)
    logger.info(f"Loading ring definition from {path}")
    return loads_ring(path.read_text(encoding="utf-8"))


def _toml_key(name: str) -> str:
    return name if _BARE_KEY.match(name) else f'"{name}"'


def write_ring_file(ring: RingPresentation, path: Optional[Union[str, Path]] = None) -> str:
    """TOML text that loads_ring reads back into an equal presentation."""
    field = ring.field
    lines = ["[field]", f"p = {field.p}", "params = [" + ", ".join(f'"{n}"' for n in field.params) + "]"]
    if field.root_depth:
        lines.append(f"root_depth = {field.root_depth}")
    lines += ["", "[variables]"]
    for name, degree in zip(ring.names, ring.degrees):
        value = str(degree[0]) if len(degree) == 1 else "[" + ", ".join(str(d) for d in degree) + "]"
        lines.append(f"{_toml_key(name)} = {value}")
    lines += ["", "[relations]"]
    for j, relation in enumerate(ring.relations):
        lines.append(f'{_toml_key(ring.names[relation.bound])} = "{ring.format_relation(j)}"')
    flags = ring.assumptions
    if flags.isolated_singularity_asserted or flags.normal_asserted:
        lines += ["", "[assumptions]",
                  f"isolated_singularity = {str(flags.isolated_singularity_asserted).lower()}",
                  f"normal = {str(flags.normal_asserted).lower()}"]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"Wrote ring definition to {path}")
    return text

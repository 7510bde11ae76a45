"""Tokenizer shared by the Turtle and SPARQL parsers."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass

from situkg.errors import ParseError

_PN_PREFIX = r"(?:[A-Za-z](?:[\w\-.]*[\w\-])?)?"
_PN_LOCAL = r"(?:[\w\-](?:[\w\-.]*[\w\-])?)?"
_IRI_CHAR = r"""(?:[^<>"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})"""

_RULES = [
    ("WS", r"\s+"),
    ("COMMENT", r"#[^\n\r]*"),
    ("IRIREF", rf"<{_IRI_CHAR}*>"),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"' + r"|'(?:[^'\\\n\r]|\\.)*'"),
    ("BNODE", rf"_:{_PN_LOCAL}"),
    ("VAR", r"[?$][A-Za-z_][\w]*"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("PNAME", rf"{_PN_PREFIX}:{_PN_LOCAL}"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("NAME", r"[A-Za-z_]\w*"),
    ("TEMPLATE", r"\{\{\w*\}\}"),
    ("OP", r"\^\^|&&|\|\||>=|<=|!=|[=<>!]"),
    ("PUNCT", r"[.;,{}()\[\]*]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _RULES))

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    def is_(self, kind: str, text: str | None = None) -> bool:
        return self.kind == kind and (text is None or self.text == text)

    def keyword(self, word: str) -> bool:
        return self.kind == "NAME" and self.text.upper() == word


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self._line_starts = [0] + [m.end() for m in re.finditer(r"\r\n|\n|\r", text)]

    def position(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self._line_starts, offset)
        return line, offset - self._line_starts[line - 1] + 1

    def tokens(self) -> tuple[list[Token], list[ParseError]]:
        out: list[Token] = []
        errors: list[ParseError] = []
        pos, n = 0, len(self.text)
        while pos < n:
            m = _MASTER.match(self.text, pos)
            if m is None:
                line, col = self.position(pos)
                ch = self.text[pos]
                if ch in "\"'":
                    end = self.text.find("\n", pos)
                    end = n if end < 0 else end
                    errors.append(ParseError(line, col, "unterminated string", self.text[pos:end]))
                    pos = end
                    continue
                errors.append(ParseError(line, col, "unexpected character", ch))
                pos += 1
                continue
            kind = m.lastgroup
            if kind not in ("WS", "COMMENT"):
                line, col = self.position(pos)
                out.append(Token(kind, m.group(), line, col))
            pos = m.end()
        line, col = self.position(n)
        out.append(Token("EOF", "", line, col))
        return out, errors


def unescape_string(body: str, token: Token) -> str:
    """Decode the escapes of a quoted string body (quotes already stripped)."""

    def repl(m: re.Match) -> str:
        esc = m.group(1)
        if esc[0] in "uU" and len(esc) > 1:
            return _codepoint(esc[1:], token)
        if esc in _ESCAPES:
            return _ESCAPES[esc]
        raise ValueError(f"invalid escape sequence \\{esc}")

    return _ESCAPE_RE.sub(repl, body)


def unescape_iri(body: str, token: Token) -> str:
    return re.sub(
        r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})",
        lambda m: _codepoint(m.group(1) or m.group(2), token),
        body,
    )


def _codepoint(hexdigits: str, token: Token) -> str:
    cp = int(hexdigits, 16)
    if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
        raise ValueError(f"invalid code point U+{cp:X}")
    return chr(cp)

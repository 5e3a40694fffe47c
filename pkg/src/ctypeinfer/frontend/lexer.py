"""Tokenizer for Java source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue
default do double else enum extends final finally float for goto if
implements import instanceof int interface long native new package private
protected public return short static strictfp super switch synchronized this
throw throws transient try void volatile while true false null
""".split())

PRIMITIVES = frozenset(
    ["boolean", "byte", "char", "short", "int", "long", "float", "double"])

# '>' is always emitted alone (or as '>='); the parser glues adjacent '>'
# tokens into shift operators so that nested generics close cleanly.
_OPERATORS = sorted("""
<<= ... -> :: ++ -- && || == != <= >= += -= *= /= &= |= ^= %= <<
( ) { } [ ] ; , . @ = > < ! ~ ? : + - * / & | ^ %
""".split(), key=len, reverse=True)

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\f\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<badcomment>/\*)
  | (?P<textblock>\"\"\"[ \t\f]*\r?\n(?:[^\\]|\\.)*?\"\"\")
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<char>'(?:[^'\\\n]|\\.)+')
  | (?P<number>
        0[xX][0-9a-fA-F_]*(?:\.[0-9a-fA-F_]*)?(?:[pP][+-]?[0-9_]+)?[lLfFdD]?
      | 0[bB][01_]+[lL]?
      | (?:[0-9][0-9_]*\.?[0-9_]*|\.[0-9][0-9_]*)(?:[eE][+-]?[0-9_]+)?[lLfFdD]?
    )
  | (?P<ident>[A-Za-z_$\u0080-\uffff][A-Za-z0-9_$\u0080-\uffff]*)
  | (?P<op>""" + "|".join(re.escape(op) for op in _OPERATORS) + r""")
""", re.VERBOSE | re.DOTALL)


class JavaSyntaxError(SyntaxError):
    """Parse failure carrying the offending line and column."""

    def __init__(self, msg, path="<string>", line=0, col=0):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.msg_text = msg
        self.path = path
        self.lineno = line
        self.offset = col
        self.filename = path


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, number, string, char, op, eof
    text: str
    line: int
    col: int
    start: int
    end: int


def tokenize(text: str, path: str = "<string>") -> list[Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise JavaSyntaxError(f"unexpected character {text[pos]!r}",
                                  path, line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "badcomment":
            raise JavaSyntaxError("unterminated comment", path, line,
                                  pos - line_start + 1)
        if kind not in ("ws", "comment"):
            if kind == "ident" and chunk in KEYWORDS:
                kind = "keyword"
            elif kind == "textblock":
                kind = "string"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1,
                                pos, m.end()))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, n, n))
    return tokens

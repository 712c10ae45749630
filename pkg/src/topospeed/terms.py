"""Canonical values (terms) used for inputs, outputs and views.

A term is one of

* an ``int`` or a ``str`` atom,
* a ``tuple`` of terms (ordered sequence),
* a ``frozenset`` of terms (canonical set).

Terms are hashable by structure.  :func:`term_key` gives the total order used
everywhere a deterministic ordering is needed: atoms sort by literal (all
integers before all strings), composites sort lexicographically on the keys of
their (sorted) members.
"""

import re
from functools import lru_cache

from .errors import ParseError

_INT, _STR, _TUPLE, _SET = 1, 2, 3, 4

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@lru_cache(maxsize=1 << 18)
def term_key(term):
    """Sort key realising the canonical total order on terms."""
    if isinstance(term, bool):
        raise TypeError("booleans are not terms; use 0/1")
    if isinstance(term, int):
        return (_INT, term)
    if isinstance(term, str):
        return (_STR, term)
    if isinstance(term, tuple):
        return (_TUPLE, tuple(term_key(t) for t in term))
    if isinstance(term, frozenset):
        return (_SET, tuple(sorted(term_key(t) for t in term)))
    raise TypeError(f"not a term: {term!r}")


def sorted_terms(terms):
    return sorted(terms, key=term_key)


def check_term(term):
    """Raise TypeError unless ``term`` is a well formed term."""
    term_key(term)
    return term


def format_term(term):
    """Canonical text rendering; inverse of :func:`parse_term`."""
    if isinstance(term, int) and not isinstance(term, bool):
        return str(term)
    if isinstance(term, str):
        if _IDENT.match(term):
            return term
        return '"' + term.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(term, tuple):
        inner = ", ".join(format_term(t) for t in term)
        if len(term) == 1:
            inner += ","
        return "(" + inner + ")"
    if isinstance(term, frozenset):
        return "{" + ", ".join(format_term(t) for t in sorted_terms(term)) + "}"
    raise TypeError(f"not a term: {term!r}")


class TermReader:
    """Small recursive-descent reader over one line of text.

    Positions are tracked so that errors can report a 1-based column.
    """

    def __init__(self, text, line=None, offset=0):
        self.text = text
        self.pos = 0
        self.line = line
        self.offset = offset

    def error(self, message):
        raise ParseError(message, self.line, self.offset + self.pos + 1)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def at_end(self):
        return self.peek() == ""

    def read_term(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            items, trailing = self._read_items(")")
            if len(items) == 1 and not trailing:
                self.error("one-element tuple needs a trailing comma")
            return tuple(items)
        if ch == "{":
            self.pos += 1
            items, _ = self._read_items("}")
            return frozenset(items)
        if ch == '"':
            return self._read_string()
        m = re.compile(r"-?[0-9]+|[A-Za-z_][A-Za-z0-9_]*").match(self.text, self.pos)
        if not m:
            self.error("expected a term")
        self.pos = m.end()
        tok = m.group(0)
        if tok[0] == "-" or tok[0].isdigit():
            return int(tok)
        return tok

    def _read_items(self, close):
        items = []
        trailing = False
        if self.peek() == close:
            self.pos += 1
            return items, trailing
        while True:
            items.append(self.read_term())
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                if self.peek() == close:
                    self.pos += 1
                    trailing = True
                    return items, trailing
                continue
            if ch == close:
                self.pos += 1
                return items, trailing
            self.error(f"expected ',' or {close!r}")

    def _read_string(self):
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text):
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if ch == '"':
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1
        self.error("unterminated string")


def parse_term(text, line=None, offset=0):
    reader = TermReader(text, line, offset)
    term = reader.read_term()
    if not reader.at_end():
        reader.error("trailing characters after term")
    return term

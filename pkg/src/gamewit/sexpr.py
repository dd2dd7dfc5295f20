"""S-expression reading and writing for terms, formulas and signatures.

Grammar:
    term    := x?ID | 0 | 1 | NAME | (f t1 ... tk) | (ite F t1 t2)
    formula := (imp a b) | (bot) | (and a b) | (or a b) | (not a)
             | (forall x a) | (exists x a)
             | (forall (<= x t) a) | (exists (<= x t) a) | (R t1 ... tk)

A bare NAME in term position is a constant if the signature declares it
as a nullary function, otherwise a variable whose id is assigned per
parse (same name, same variable).  ';' starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (App, Atom, Bot, Imp, And, Or, Not, Quant, Ite, Var,
                     BINARY)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


# ------------------------------------------------------------- signature

@dataclass
class Signature:
    """Function and relation symbols with arities.

    `0`, `1`, `leq` and `=` are always present.  With ``open_=True`` unknown
    symbols are admitted and recorded on first use.
    """
    funcs: dict = field(default_factory=dict)
    rels: dict = field(default_factory=dict)
    open_: bool = False

    def __post_init__(self):
        self.funcs = {"0": 0, "1": 0, **self.funcs}
        self.rels = {"leq": 2, "=": 2, **self.rels}
        clash = set(self.funcs) & set(self.rels)
        if clash:
            raise ValueError(f"symbol used as function and relation: {sorted(clash)}")

    @property
    def user_funcs(self) -> dict:
        return {k: v for k, v in self.funcs.items() if k not in ("0", "1")}

    @property
    def user_rels(self) -> dict:
        return {k: v for k, v in self.rels.items() if k not in ("leq", "=")}

    def check_func(self, name, arity, pos=(0, 0)):
        self._check(self.funcs, self.rels, "function", name, arity, pos)

    def check_rel(self, name, arity, pos=(0, 0)):
        self._check(self.rels, self.funcs, "relation", name, arity, pos)

    def _check(self, table, other, kind, name, arity, pos):
        if name in table:
            if table[name] != arity:
                raise ParseError(f"arity mismatch for {kind} {name}: "
                                 f"expected {table[name]}, got {arity}", *pos)
            return
        if not self.open_ or name in other:
            raise ParseError(f"unknown {kind} symbol {name}", *pos)
        table[name] = arity

    def extended(self, funcs=None, rels=None) -> "Signature":
        return Signature({**self.funcs, **(funcs or {})},
                         {**self.rels, **(rels or {})}, self.open_)

    def closed(self) -> "Signature":
        return Signature(dict(self.funcs), dict(self.rels), False)


# ------------------------------------------------------------- tokenizer

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


@dataclass
class Sx:
    """A parsed s-expression node with its source position."""
    value: object          # str for atoms, list for lists
    line: int
    col: int

    @property
    def is_atom(self) -> bool:
        return isinstance(self.value, str)


def read_sexprs(text: str) -> list[Sx]:
    stack: list[tuple[list, int, int]] = []
    out: list[Sx] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group(0)
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unexpected ')'", line, col)
            items, l0, c0 = stack.pop()
            node = Sx(items, l0, c0)
            (stack[-1][0] if stack else out).append(node)
        elif not tok[0].isspace() and tok[0] != ";":
            node = Sx(tok, line, col)
            (stack[-1][0] if stack else out).append(node)
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError("unbalanced '(' (missing ')')", l0, c0)
    return out


def read_one(text: str) -> Sx:
    items = read_sexprs(text)
    if len(items) != 1:
        raise ParseError(f"expected exactly one expression, found {len(items)}")
    return items[0]


# ---------------------------------------------------------------- parser

_VAR = re.compile(r"^([A-Za-z_][A-Za-z0-9_']*)\?(\d+)$")
KEYWORDS = {"imp", "bot", "and", "or", "not", "forall", "exists"}


class Reader:
    """Turns s-expressions into terms/formulas; shares a variable table."""

    def __init__(self, sig: Signature | None = None, text: str = ""):
        self.sig = sig if sig is not None else Signature(open_=True)
        self.names: dict[str, Var] = {}
        explicit = [int(m) for m in re.findall(r"\?(\d+)", text)]
        self._next = max(explicit, default=0) + 1

    def _named(self, name: str) -> Var:
        v = self.names.get(name)
        if v is None:
            v = Var(name, self._next)
            self._next += 1
            self.names[name] = v
        return v

    def var(self, sx: Sx) -> Var:
        if not sx.is_atom:
            raise ParseError("expected a variable", sx.line, sx.col)
        m = _VAR.match(sx.value)
        if m:
            v = Var(m.group(1), int(m.group(2)))
            self._next = max(self._next, v.id + 1)
            return v
        if sx.value in self.sig.funcs or not re.match(r"^[A-Za-z_]", sx.value):
            raise ParseError(f"expected a variable, got {sx.value}", sx.line, sx.col)
        return self._named(sx.value)

    def term(self, sx: Sx):
        if sx.is_atom:
            tok = sx.value
            if _VAR.match(tok):
                return self.var(sx)
            if tok in ("0", "1"):
                return App(tok)
            if self.sig.funcs.get(tok) == 0:
                return App(tok)
            if not re.match(r"^[A-Za-z_][A-Za-z0-9_']*$", tok):
                raise ParseError(f"bad term token {tok!r}", sx.line, sx.col)
            return self._named(tok)
        items = sx.value
        if not items:
            raise ParseError("empty term", sx.line, sx.col)
        head = items[0]
        if not head.is_atom:
            raise ParseError("term head must be a symbol", head.line, head.col)
        if head.value == "ite":
            if len(items) != 4:
                raise ParseError("ite takes a condition and two terms", sx.line, sx.col)
            return Ite(self.formula(items[1]), self.term(items[2]), self.term(items[3]))
        self.sig.check_func(head.value, len(items) - 1, (head.line, head.col))
        return App(head.value, tuple(self.term(a) for a in items[1:]))

    def formula(self, sx: Sx):
        if sx.is_atom:
            raise ParseError(f"expected a formula, got {sx.value!r}", sx.line, sx.col)
        items = sx.value
        if not items or not items[0].is_atom:
            raise ParseError("formula must start with a symbol", sx.line, sx.col)
        head = items[0].value
        pos = (items[0].line, items[0].col)
        nargs = len(items) - 1

        def need(n):
            if nargs != n:
                raise ParseError(f"{head} takes {n} argument(s), got {nargs}", *pos)

        if head == "bot":
            need(0)
            return Bot()
        if head in ("imp", "and", "or"):
            need(2)
            cls = {"imp": Imp, "and": And, "or": Or}[head]
            return cls(self.formula(items[1]), self.formula(items[2]))
        if head == "not":
            need(1)
            return Not(self.formula(items[1]))
        if head in ("forall", "exists"):
            need(2)
            binder = items[1]
            bound = None
            if not binder.is_atom:
                b = binder.value
                if len(b) != 3 or not b[0].is_atom or b[0].value != "<=":
                    raise ParseError("bounded binder must be (<= x t)", binder.line, binder.col)
                bound = self.term(b[2])
                binder = b[1]
            if not binder.is_atom:
                raise ParseError("expected a variable", binder.line, binder.col)
            if _VAR.match(binder.value):
                return Quant(head, self.var(binder), self.formula(items[2]), bound)
            # a bare binder name gets its own variable, scoped to the body
            name = binder.value
            if name in self.sig.funcs or not re.match(r"^[A-Za-z_]", name):
                raise ParseError(f"expected a variable, got {name}", binder.line, binder.col)
            saved = self.names.pop(name, None)
            v = self._named(name)
            body = self.formula(items[2])
            if saved is not None:
                self.names[name] = saved
            else:
                self.names.pop(name, None)
            return Quant(head, v, body, bound)
        rel = "leq" if head == "<=" else head
        self.sig.check_rel(rel, nargs, pos)
        return Atom(rel, tuple(self.term(a) for a in items[1:]))


def parse_formula(text: str, sig: Signature | None = None):
    return Reader(sig, text).formula(read_one(text))


def parse_term(text: str, sig: Signature | None = None):
    return Reader(sig, text).term(read_one(text))


# --------------------------------------------------------------- printer

def print_term(t) -> str:
    if isinstance(t, Var):
        return f"{t.name}?{t.id}"
    if isinstance(t, App):
        if not t.args:
            return t.fn if t.fn in ("0", "1") else f"({t.fn})"
        return f"({t.fn} {' '.join(print_term(a) for a in t.args)})"
    if isinstance(t, Ite):
        return f"(ite {print_formula(t.cond)} {print_term(t.then)} {print_term(t.other)})"
    raise TypeError(f"not a term: {t!r}")


def print_formula(f) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f"({f.rel})"
        return f"({f.rel} {' '.join(print_term(a) for a in f.args)})"
    if isinstance(f, Bot):
        return "(bot)"
    if isinstance(f, BINARY):
        tag = {Imp: "imp", And: "and", Or: "or"}[type(f)]
        return f"({tag} {print_formula(f.left)} {print_formula(f.right)})"
    if isinstance(f, Not):
        return f"(not {print_formula(f.body)})"
    if isinstance(f, Quant):
        v = print_term(f.var)
        binder = v if f.bound is None else f"(<= {v} {print_term(f.bound)})"
        return f"({f.kind} {binder} {print_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


# ------------------------------------------------------ signature blocks

def parse_signature(sx: Sx, open_: bool = False) -> Signature:
    """(signature (fun f 1) (rel P 2) ...)"""
    if sx.is_atom or not sx.value or sx.value[0].value != "signature":
        raise ParseError("expected (signature ...)", sx.line, sx.col)
    funcs, rels = {}, {}
    for item in sx.value[1:]:
        parts = item.value
        if item.is_atom or len(parts) != 3 or parts[0].value not in ("fun", "rel"):
            raise ParseError("signature entries are (fun NAME ARITY) or (rel NAME ARITY)",
                             item.line, item.col)
        try:
            ar = int(parts[2].value)
        except (TypeError, ValueError):
            raise ParseError("arity must be an integer", parts[2].line, parts[2].col) from None
        if ar < 0:
            raise ParseError("arity must be non-negative", parts[2].line, parts[2].col)
        (funcs if parts[0].value == "fun" else rels)[parts[1].value] = ar
    return Signature(funcs, rels, open_)


def print_signature(sig: Signature) -> str:
    parts = [f"(fun {k} {v})" for k, v in sorted(sig.user_funcs.items())]
    parts += [f"(rel {k} {v})" for k, v in sorted(sig.user_rels.items())]
    return "(signature" + "".join(" " + p for p in parts) + ")"


def parse_formula_file(text: str):
    """A formula file holds an optional signature block and one formula.

    Returns (signature, formula).
    """
    items = read_sexprs(text)
    sig = Signature(open_=True)
    if items and not items[0].is_atom and items[0].value and items[0].value[0].value == "signature":
        sig = parse_signature(items[0], open_=True)
        items = items[1:]
    if len(items) != 1:
        raise ParseError(f"expected one formula, found {len(items)} expressions")
    f = Reader(sig, text).formula(items[0])
    return sig.closed(), f


def print_formula_file(sig: Signature, f) -> str:
    return print_signature(sig) + "\n" + print_formula(f) + "\n"

"""First-order terms and formulas.

Variables carry a name (for printing) and an integer id (for identity).
Two variables are the same iff both agree; in practice ids are unique
per name so the id decides.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Union


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str
    id: int

    def __str__(self) -> str:
        return self.name if self.id == 0 else f"{self.name}{_sub(self.id)}"


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.fn
        return f"{self.fn}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Ite:
    """if cond then a else b; cond is quantifier-free."""
    cond: "Formula"
    then: "Term"
    other: "Term"

    def __str__(self) -> str:
        return f"ite({self.cond}, {self.then}, {self.other})"


Term = Union[Var, App, Ite]

ZERO = App("0")
ONE = App("1")


def _sub(n: int) -> str:
    return str(n).translate(str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉"))


# ------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple = ()

    def __str__(self) -> str:
        if self.rel == "leq" and len(self.args) == 2:
            return f"{self.args[0]}≤{self.args[1]}"
        if self.rel == "=" and len(self.args) == 2:
            return f"{self.args[0]}={self.args[1]}"
        if not self.args:
            return self.rel
        return f"{self.rel}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return "⊥"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left}→{self.right})"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left}∧{self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left}∨{self.right})"


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        return f"¬{self.body}"


@dataclass(frozen=True)
class Quant:
    """Quantifier; kind is 'forall' or 'exists'; bound is None when unbounded."""
    kind: str
    var: Var
    body: "Formula"
    bound: Term | None = None

    def __str__(self) -> str:
        q = "∀" if self.kind == "forall" else "∃"
        b = "" if self.bound is None else f"≤{self.bound}"
        return f"{q}{self.var}{b} {self.body}"


Formula = Union[Atom, Bot, Imp, And, Or, Not, Quant]
BINARY = (Imp, And, Or)


def forall(v: Var, body, bound=None) -> Quant:
    return Quant("forall", v, body, bound)


def exists(v: Var, body, bound=None) -> Quant:
    return Quant("exists", v, body, bound)


def leq(a: Term, b: Term) -> Atom:
    return Atom("leq", (a, b))


def neg(f) -> Imp:
    return Imp(f, Bot())


# ------------------------------------------------------------ fresh ids

class FreshIds:
    """Thread-safe monotone id source. Seed it above every id in scope."""

    def __init__(self, start: int = 1):
        self._it = itertools.count(start)
        self._lock = threading.Lock()

    @classmethod
    def above(cls, *things) -> "FreshIds":
        return cls(max_id(*things) + 1)

    def next_id(self) -> int:
        with self._lock:
            return next(self._it)

    def var(self, name: str) -> Var:
        return Var(name, self.next_id())


# ------------------------------------------------------ variable queries

def term_vars(t: Term, acc: set | None = None) -> set:
    acc = set() if acc is None else acc
    if isinstance(t, Var):
        acc.add(t)
    elif isinstance(t, App):
        for a in t.args:
            term_vars(a, acc)
    else:
        free_vars(t.cond, acc)
        term_vars(t.then, acc)
        term_vars(t.other, acc)
    return acc


def free_vars(f, acc: set | None = None) -> set:
    """Free variables of a formula (or a term)."""
    acc = set() if acc is None else acc
    if isinstance(f, (Var, App, Ite)):
        return term_vars(f, acc)
    if isinstance(f, Atom):
        for a in f.args:
            term_vars(a, acc)
    elif isinstance(f, BINARY):
        free_vars(f.left, acc)
        free_vars(f.right, acc)
    elif isinstance(f, Not):
        free_vars(f.body, acc)
    elif isinstance(f, Quant):
        inner = free_vars(f.body)
        inner.discard(f.var)
        acc |= inner
        if f.bound is not None:
            term_vars(f.bound, acc)
    return acc


def all_vars(x, acc: set | None = None) -> set:
    """Every variable occurring anywhere, bound or free."""
    acc = set() if acc is None else acc
    if isinstance(x, Var):
        acc.add(x)
    elif isinstance(x, (App, Atom)):
        for a in x.args:
            all_vars(a, acc)
    elif isinstance(x, Ite):
        all_vars(x.cond, acc)
        all_vars(x.then, acc)
        all_vars(x.other, acc)
    elif isinstance(x, BINARY):
        all_vars(x.left, acc)
        all_vars(x.right, acc)
    elif isinstance(x, Not):
        all_vars(x.body, acc)
    elif isinstance(x, Quant):
        acc.add(x.var)
        all_vars(x.body, acc)
        if x.bound is not None:
            all_vars(x.bound, acc)
    elif isinstance(x, (list, tuple, set, frozenset)):
        for y in x:
            all_vars(y, acc)
    return acc


def max_id(*things) -> int:
    vs = all_vars(list(things))
    return max((v.id for v in vs), default=0)


def is_quantifier_free(f) -> bool:
    if isinstance(f, (Atom, Bot)):
        return True
    if isinstance(f, BINARY):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    return False


def subterms(x, acc: list | None = None) -> list:
    """All subterms, outermost first, without duplicates."""
    acc = [] if acc is None else acc
    if isinstance(x, (Var, App, Ite)):
        if x not in acc:
            acc.append(x)
        if isinstance(x, App):
            for a in x.args:
                subterms(a, acc)
        elif isinstance(x, Ite):
            subterms(x.then, acc)
            subterms(x.other, acc)
    elif isinstance(x, Atom):
        for a in x.args:
            subterms(a, acc)
    elif isinstance(x, BINARY):
        subterms(x.left, acc)
        subterms(x.right, acc)
    elif isinstance(x, Not):
        subterms(x.body, acc)
    elif isinstance(x, Quant):
        if x.bound is not None:
            subterms(x.bound, acc)
        subterms(x.body, acc)
    return acc


def term_height(t: Term) -> int:
    if isinstance(t, Var) or (isinstance(t, App) and not t.args):
        return 0
    if isinstance(t, App):
        return 1 + max(term_height(a) for a in t.args)
    return 1 + max(term_height(t.then), term_height(t.other))


def term_size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(term_size(a) for a in t.args)
    if isinstance(t, Ite):
        return 1 + term_size(t.then) + term_size(t.other)
    return 1


# ----------------------------------------------------------- substitution

def subst_term(t: Term, m: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, App):
        if not t.args:
            return t
        return App(t.fn, tuple(subst_term(a, m) for a in t.args))
    return Ite(subst(t.cond, m), subst_term(t.then, m), subst_term(t.other, m))


def subst(f, m: Mapping[Var, Term], fresh: FreshIds | None = None):
    """Simultaneous capture-avoiding substitution on a formula or term."""
    if not m:
        return f
    if isinstance(f, (Var, App, Ite)):
        return subst_term(f, m)
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(subst_term(a, m) for a in f.args))
    if isinstance(f, Bot):
        return f
    if isinstance(f, BINARY):
        return type(f)(subst(f.left, m, fresh), subst(f.right, m, fresh))
    if isinstance(f, Not):
        return Not(subst(f.body, m, fresh))
    bound = None if f.bound is None else subst_term(f.bound, m)
    inner = {v: t for v, t in m.items() if v != f.var}
    body_fv = free_vars(f.body)
    inner = {v: t for v, t in inner.items() if v in body_fv}
    if not inner:
        return Quant(f.kind, f.var, f.body, bound)
    incoming = set()
    for t in inner.values():
        term_vars(t, incoming)
    v = f.var
    if v in incoming:
        if fresh is None:
            fresh = FreshIds.above(f, list(m.values()), list(m.keys()))
        nv = fresh.var(v.name)
        inner[v] = nv
        v = nv
    return Quant(f.kind, v, subst(f.body, inner, fresh), bound)


def substitute(f, v: Var, t: Term):
    """f with every free occurrence of v replaced by t."""
    return subst(f, {v: t})


# --------------------------------------------------------- alpha equality

_AKEY: dict = {}


def alpha_key(f, env: tuple = ()):
    """Hashable key identifying a formula up to renaming of bound variables."""
    if not env:
        k = _AKEY.get(f)
        if k is None:
            if len(_AKEY) > 500_000:
                _AKEY.clear()
            k = _AKEY[f] = _alpha_key(f, ())
        return k
    return _alpha_key(f, env)


def _alpha_key(f, env: tuple):
    if isinstance(f, Var):
        for depth, v in enumerate(reversed(env)):
            if v == f:
                return ("b", depth)
        return ("v", f.id, f.name)
    if isinstance(f, App):
        return ("f", f.fn, tuple(_alpha_key(a, env) for a in f.args))
    if isinstance(f, Ite):
        return ("ite", _alpha_key(f.cond, env), _alpha_key(f.then, env), _alpha_key(f.other, env))
    if isinstance(f, Atom):
        return ("R", f.rel, tuple(_alpha_key(a, env) for a in f.args))
    if isinstance(f, Bot):
        return ("bot",)
    if isinstance(f, BINARY):
        return (type(f).__name__, _alpha_key(f.left, env), _alpha_key(f.right, env))
    if isinstance(f, Not):
        return ("not", _alpha_key(f.body, env))
    b = None if f.bound is None else _alpha_key(f.bound, env)
    return ("Q", f.kind, b, _alpha_key(f.body, env + (f.var,)))


def alpha_equal(a, b) -> bool:
    return a == b or alpha_key(a) == alpha_key(b)


def rename_bound(f, fresh: FreshIds):
    """Copy of f with every bound variable renamed to a fresh one."""
    if isinstance(f, (Atom, Bot)):
        return f
    if isinstance(f, BINARY):
        return type(f)(rename_bound(f.left, fresh), rename_bound(f.right, fresh))
    if isinstance(f, Not):
        return Not(rename_bound(f.body, fresh))
    nv = fresh.var(f.var.name)
    body = subst(rename_bound(f.body, fresh), {f.var: nv})
    return Quant(f.kind, nv, body, f.bound)


# --------------------------------------------------------- addressing

def children(f) -> tuple:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Not, Quant)):
        return (f.body,)
    return ()


def at_path(f, path: Iterable[int]):
    for i in path:
        ch = children(f)
        if not 0 <= i < len(ch):
            raise IndexError(f"invalid subformula address {tuple(path)}")
        f = ch[i]
    return f


def replace_at(f, path: tuple, new):
    if not path:
        return new
    i, rest = path[0], path[1:]
    ch = children(f)
    if not 0 <= i < len(ch):
        raise IndexError(f"invalid subformula address step {i}")
    if isinstance(f, BINARY):
        if i == 0:
            return type(f)(replace_at(f.left, rest, new), f.right)
        return type(f)(f.left, replace_at(f.right, rest, new))
    if isinstance(f, Not):
        return Not(replace_at(f.body, rest, new))
    return Quant(f.kind, f.var, replace_at(f.body, rest, new), f.bound)


# frozen dataclasses rehash their whole subtree on every lookup; cache it
def _install_cached_hash(cls):
    names = tuple(f for f in cls.__dataclass_fields__)

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((cls.__name__,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__


for _cls in (Var, App, Ite, Atom, Bot, Imp, And, Or, Not, Quant):
    _install_cached_hash(_cls)

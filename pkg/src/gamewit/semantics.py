"""Finite structures, evaluation and boards."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Iterator

from .sexpr import Signature
from .syntax import (And, App, Atom, Bot, Imp, Ite, Not, Or, Quant, Var,
                     free_vars, is_quantifier_free)

DEFAULT_CAP = 10 ** 7


class UnassignedVariable(KeyError):
    pass


class CapExceeded(RuntimeError):
    pass


def _index(args, d: int) -> int:
    i = 0
    for a in args:
        i = i * d + a
    return i


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """Domain {0..d-1} with flattened function/relation tables.

    Tables are tuples indexed by the base-d number spelled by the arguments,
    first argument most significant.
    """
    d: int
    funcs: dict = field(default_factory=dict)
    rels: dict = field(default_factory=dict)
    arity: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("domain size must be at least 1")
        for tables in (self.funcs, self.rels):
            for name, tab in tables.items():
                if len(tab) != self.d ** self.arity[name]:
                    raise ValueError(f"table for {name} is not total")

    def func(self, name: str, args) -> int:
        try:
            tab = self.funcs[name]
        except KeyError:
            raise KeyError(f"function {name} not interpreted") from None
        return tab[_index(args, self.d)]

    def rel(self, name: str, args) -> bool:
        try:
            tab = self.rels[name]
        except KeyError:
            raise KeyError(f"relation {name} not interpreted") from None
        return tab[_index(args, self.d)]

    def key(self) -> tuple:
        return (self.d, tuple(sorted(self.funcs.items())), tuple(sorted(self.rels.items())))

    def __eq__(self, other):
        return isinstance(other, FiniteStructure) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def signature(self) -> Signature:
        return Signature({k: self.arity[k] for k in self.funcs},
                         {k: self.arity[k] for k in self.rels})

    def expand(self, funcs=None, rels=None) -> "FiniteStructure":
        """Copy with extra (or replaced) tables; values are (arity, table)."""
        f = dict(self.funcs)
        r = dict(self.rels)
        ar = dict(self.arity)
        for name, (a, tab) in (funcs or {}).items():
            f[name], ar[name] = tuple(tab), a
        for name, (a, tab) in (rels or {}).items():
            r[name], ar[name] = tuple(bool(x) for x in tab), a
        return FiniteStructure(self.d, f, r, ar)


def builtin_tables(d: int):
    one = min(1, d - 1)
    funcs = {"0": (0,), "1": (one,)}
    rels = {
        "leq": tuple(a <= b for a in range(d) for b in range(d)),
        "=": tuple(a == b for a in range(d) for b in range(d)),
    }
    return funcs, rels


def make_structure(d: int, funcs=None, rels=None, sig: Signature | None = None) -> FiniteStructure:
    """Build a structure; tables may be dicts (args tuple -> value), callables
    or flat sequences.  Builtins default to 0, 1, the natural order and identity."""
    bf, br = builtin_tables(d)
    arity = {"0": 0, "1": 0, "leq": 2, "=": 2}
    if sig is not None:
        arity.update(sig.funcs)
        arity.update(sig.rels)
    ftabs, rtabs = dict(bf), dict(br)
    for name, spec in (funcs or {}).items():
        ftabs[name] = _table(spec, d, arity, name, int)
    for name, spec in (rels or {}).items():
        rtabs[name] = _table(spec, d, arity, name, bool)
    if sig is not None:
        missing = [n for n in list(sig.funcs) + list(sig.rels) if n not in ftabs and n not in rtabs]
        if missing:
            raise ValueError(f"no table for {missing}")
    return FiniteStructure(d, ftabs, rtabs, {k: arity[k] for k in list(ftabs) + list(rtabs)})


def _table(spec, d, arity, name, conv):
    if callable(spec):
        ar = arity.get(name)
        if ar is None:
            raise ValueError(f"arity of {name} unknown")
        return tuple(conv(spec(*args)) for args in itertools.product(range(d), repeat=ar))
    if isinstance(spec, dict):
        ar = arity.get(name)
        if ar is None:
            ar = len(next(iter(spec))) if spec else 0
            arity[name] = ar
        return tuple(conv(spec[args]) for args in itertools.product(range(d), repeat=ar))
    tab = tuple(conv(x) for x in spec)
    if name not in arity:
        ar = 0
        while d ** ar < len(tab):
            ar += 1
        arity[name] = ar
    return tab


@dataclass(frozen=True)
class Board:
    structure: FiniteStructure
    n0: int

    def __post_init__(self):
        if not 0 <= self.n0 < self.structure.d:
            raise ValueError("n0 outside the domain")


# ----------------------------------------------------------- evaluation

def eval_term(s: FiniteStructure, t, a) -> int:
    if isinstance(t, Var):
        try:
            return a[t]
        except KeyError:
            raise UnassignedVariable(f"unassigned variable {t}") from None
    if isinstance(t, App):
        return s.func(t.fn, [eval_term(s, x, a) for x in t.args])
    if isinstance(t, Ite):
        return eval_term(s, t.then if eval_formula(s, t.cond, a) else t.other, a)
    raise TypeError(f"not a term: {t!r}")


def eval_formula(s: FiniteStructure, f, a) -> bool:
    if isinstance(f, Atom):
        return s.rel(f.rel, [eval_term(s, x, a) for x in f.args])
    if isinstance(f, Bot):
        return False
    if isinstance(f, Imp):
        return (not eval_formula(s, f.left, a)) or eval_formula(s, f.right, a)
    if isinstance(f, And):
        return eval_formula(s, f.left, a) and eval_formula(s, f.right, a)
    if isinstance(f, Or):
        return eval_formula(s, f.left, a) or eval_formula(s, f.right, a)
    if isinstance(f, Not):
        return not eval_formula(s, f.body, a)
    if isinstance(f, Quant):
        rng = quant_range(s, f.bound, a)
        inner = dict(a)
        want = f.kind == "exists"
        for e in rng:
            inner[f.var] = e
            if eval_formula(s, f.body, inner) == want:
                return want
        return not want
    raise TypeError(f"not a formula: {f!r}")


def quant_range(s: FiniteStructure, bound, a):
    if bound is None:
        return range(s.d)
    b = eval_term(s, bound, a)
    return [e for e in range(s.d) if s.rel("leq", (e, b))]


def assignments(vars_, d: int) -> Iterator[dict]:
    vars_ = list(vars_)
    for vals in itertools.product(range(d), repeat=len(vars_)):
        yield dict(zip(vars_, vals))


def is_universal(f) -> bool:
    while isinstance(f, Quant):
        if f.kind != "forall":
            return False
        f = f.body
    return is_quantifier_free(f)


def check_universal_axioms(s: FiniteStructure, axioms) -> bool:
    for ax in axioms:
        if not is_universal(ax):
            raise ValueError(f"axiom is not universal: {ax}")
        fv = sorted(free_vars(ax), key=lambda v: v.id)
        for a in assignments(fv, s.d):
            if not eval_formula(s, ax, a):
                return False
    return True


def candidate_count(sig: Signature, d: int) -> int:
    n = prod(d ** (d ** ar) for ar in sig.user_funcs.values())
    return n * prod(2 ** (d ** ar) for ar in sig.user_rels.values())


def enumerate_structures(sig: Signature, d: int, axioms=(), cap: int = DEFAULT_CAP):
    """Yield every structure on {0..d-1} satisfying the axioms.

    Only user symbols are enumerated; 0, 1, leq and = keep their defaults.
    Order: lexicographic in the tables, function symbols (by name) first.
    """
    total = candidate_count(sig, d)
    if total > cap:
        raise CapExceeded(f"{total} candidate structures exceed cap {cap}")
    for ax in axioms:
        if not is_universal(ax):
            raise ValueError(f"axiom is not universal: {ax}")
    fnames = sorted(sig.user_funcs)
    rnames = sorted(sig.user_rels)
    bf, br = builtin_tables(d)
    arity = {"0": 0, "1": 0, "leq": 2, "=": 2, **sig.funcs, **sig.rels}
    fchoices = [itertools.product(range(d), repeat=d ** sig.funcs[n]) for n in fnames]
    rchoices = [itertools.product((False, True), repeat=d ** sig.rels[n]) for n in rnames]
    spaces = [list(c) for c in fchoices + rchoices]
    for combo in itertools.product(*spaces):
        funcs = dict(bf)
        rels = dict(br)
        for n, tab in zip(fnames, combo):
            funcs[n] = tab
        for n, tab in zip(rnames, combo[len(fnames):]):
            rels[n] = tab
        s = FiniteStructure(d, funcs, rels, arity)
        if check_universal_axioms(s, axioms):
            yield s


# ---------------------------------------------------------- file format

def write_structure(s: FiniteStructure, n0: int | None = None) -> str:
    lines = [f"domain {s.d}"]
    if n0 is not None:
        lines.append(f"n0 {n0}")
    bf, br = builtin_tables(s.d)
    for name in sorted(s.funcs):
        if name in bf and s.funcs[name] == bf[name]:
            continue
        for args in itertools.product(range(s.d), repeat=s.arity[name]):
            lines.append(" ".join([name, *map(str, args), "->", str(s.func(name, args))]))
    for name in sorted(s.rels):
        if name in br and s.rels[name] == br[name]:
            continue
        for args in itertools.product(range(s.d), repeat=s.arity[name]):
            v = "true" if s.rel(name, args) else "false"
            lines.append(" ".join([name, *map(str, args), "->", v]))
    return "\n".join(lines) + "\n"


def read_structure(text: str, sig: Signature | None = None):
    """Parse a structure file.  Returns (structure, n0 or None)."""
    d = None
    n0 = None
    entries: dict[str, dict] = {}
    kinds: dict[str, type] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "domain" and len(parts) == 2:
            d = int(parts[1])
            continue
        if parts[0] == "n0" and len(parts) == 2:
            n0 = int(parts[1])
            continue
        if "->" not in parts or parts.index("->") != len(parts) - 2:
            raise ValueError(f"line {lineno}: expected 'NAME args... -> value'")
        name = parts[0]
        try:
            args = tuple(int(x) for x in parts[1:-2])
        except ValueError:
            raise ValueError(f"line {lineno}: arguments must be integers") from None
        val = parts[-1]
        if val in ("true", "false"):
            kind, v = bool, val == "true"
        else:
            try:
                kind, v = int, int(val)
            except ValueError:
                raise ValueError(f"line {lineno}: bad value {val!r}") from None
        if kinds.setdefault(name, kind) is not kind:
            raise ValueError(f"line {lineno}: {name} used both as function and relation")
        entries.setdefault(name, {})[args] = v
    if d is None:
        raise ValueError("missing 'domain d' header")
    funcs, rels = {}, {}
    for name, tab in entries.items():
        ar = {len(k) for k in tab}
        if len(ar) != 1:
            raise ValueError(f"inconsistent arity for {name}")
        for args in tab:
            if any(not 0 <= a < d for a in args):
                raise ValueError(f"{name}{args}: argument outside domain")
        if len(tab) != d ** ar.pop():
            raise ValueError(f"table for {name} is not total")
        if kinds[name] is int and any(not 0 <= v < d for v in tab.values()):
            raise ValueError(f"{name}: value outside domain")
        (funcs if kinds[name] is int else rels)[name] = tab
    s = make_structure(d, funcs, rels, sig)
    return s, n0

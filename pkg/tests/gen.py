"""Seeded generators for formulas, terms and structures used across tests."""
from __future__ import annotations

import random

from hypothesis import strategies as st

from gamewit.semantics import make_structure
from gamewit.sexpr import Signature
from gamewit.syntax import (ONE, ZERO, And, App, Atom, Bot, Imp, Not, Or, Quant, Var)

SIG = Signature({"f": 1, "c": 0}, {"P": 1, "R": 2})
X = Var("x", 1)
W = Var("w", 2)


class Ids:
    def __init__(self, start: int = 10):
        self.n = start

    def var(self, name: str) -> Var:
        self.n += 1
        return Var(name, self.n)


def random_term(rng: random.Random, vars_, depth: int = 1):
    if depth <= 0 or rng.random() < 0.5:
        pool = list(vars_) + [ZERO, ONE, App("c")]
        return rng.choice(pool)
    return App("f", (random_term(rng, vars_, depth - 1),))


def random_atom(rng, vars_):
    kind = rng.randrange(4)
    t = lambda: random_term(rng, vars_, 1)
    if kind == 0:
        return Atom("P", (t(),))
    if kind == 1:
        return Atom("R", (t(), t()))
    if kind == 2:
        return Atom("leq", (t(), t()))
    return Atom("=", (t(), t()))


def random_qf(rng, vars_, depth: int = 2):
    if depth <= 0 or rng.random() < 0.3:
        return Bot() if rng.random() < 0.05 else random_atom(rng, vars_)
    op = rng.randrange(4)
    if op == 0:
        return Not(random_qf(rng, vars_, depth - 1))
    cls = (And, Or, Imp)[op - 1]
    return cls(random_qf(rng, vars_, depth - 1), random_qf(rng, vars_, depth - 1))


def random_formula(rng, vars_=(X,), depth: int = 3, bounded: bool = True, ids: Ids | None = None):
    """Arbitrary nesting of connectives and (possibly bounded) quantifiers."""
    ids = ids or Ids()
    if depth <= 0 or rng.random() < 0.2:
        return random_atom(rng, vars_)
    op = rng.randrange(6)
    if op <= 1:
        v = ids.var(rng.choice("yzuv"))
        bound = random_term(rng, vars_, 1) if bounded and rng.random() < 0.5 else None
        body = random_formula(rng, tuple(vars_) + (v,), depth - 1, bounded, ids)
        return Quant("forall" if op == 0 else "exists", v, body, bound)
    if op == 2:
        return Not(random_formula(rng, vars_, depth - 1, bounded, ids))
    cls = (And, Or, Imp)[op - 3]
    return cls(random_formula(rng, vars_, depth - 1, bounded, ids),
               random_formula(rng, vars_, depth - 1, bounded, ids))


def random_prenex(rng, k: int, vars_=(X,), bounded: bool = True, ids: Ids | None = None,
                  alternating: bool = True):
    """∃y1 ∀z1 ... ∃yk ∀zk M, bounds drawn from earlier variables."""
    ids = ids or Ids()
    items = []
    scope = list(vars_)
    for j in range(k):
        kinds = ("exists", "forall") if alternating else (rng.choice(("exists", "forall")),) * 2
        for kind, name in zip(kinds, "yz"):
            v = ids.var(name)
            bound = None
            if bounded and rng.random() < 0.7:
                bound = random_term(rng, scope, 1)
            items.append((kind, v, bound))
            scope.append(v)
    f = random_qf(rng, scope, 2)
    for kind, v, bound in reversed(items):
        f = Quant(kind, v, f, bound)
    return f


def random_structure(rng, d: int, sig: Signature = SIG, extra_funcs=None):
    funcs = {n: [rng.randrange(d) for _ in range(d ** a)] for n, a in sig.user_funcs.items()}
    rels = {n: [rng.random() < 0.5 for _ in range(d ** a)] for n, a in sig.user_rels.items()}
    funcs.update(extra_funcs or {})
    return make_structure(d, funcs, rels, sig)


def seeds():
    return st.integers(min_value=0, max_value=2 ** 32 - 1)


# ---- a structural hypothesis strategy for syntax round trips

_vars = st.builds(Var, st.sampled_from(["x", "y", "z", "u"]), st.integers(1, 30))
terms = st.recursive(
    st.one_of(_vars, st.sampled_from([ZERO, ONE, App("c")])),
    lambda inner: st.builds(lambda a: App("f", (a,)), inner),
    max_leaves=4)
atoms = st.one_of(
    st.builds(lambda a: Atom("P", (a,)), terms),
    st.builds(lambda a, b: Atom("R", (a, b)), terms, terms),
    st.builds(lambda a, b: Atom("leq", (a, b)), terms, terms),
    st.just(Bot()))


def _quant(kind):
    return lambda inner: st.builds(lambda v, b, body: Quant(kind, v, body, b),
                                   _vars, st.one_of(st.none(), terms), inner)


formulas = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.builds(Imp, inner, inner), st.builds(And, inner, inner),
        st.builds(Or, inner, inner), st.builds(Not, inner),
        _quant("forall")(inner), _quant("exists")(inner)),
    max_leaves=6)

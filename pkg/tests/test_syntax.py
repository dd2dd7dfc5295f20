import pytest
from hypothesis import given

from gen import SIG, formulas, terms
from gamewit.sexpr import (ParseError, Reader, Signature, parse_formula, parse_formula_file,
                           parse_term, print_formula, print_formula_file, print_term, read_one)
from gamewit.syntax import (App, Atom, Quant, Var, alpha_equal, free_vars, subst,
                            substitute)


@given(terms)
def test_term_round_trip(t):
    assert parse_term(print_term(t), SIG) == t


@given(formulas)
def test_formula_round_trip(f):
    assert parse_formula(print_formula(f), SIG) == f


@given(formulas)
def test_formula_file_round_trip(f):
    sig, g = parse_formula_file(print_formula_file(SIG, f))
    assert g == f
    assert sig.funcs == SIG.funcs and sig.rels == SIG.rels


def test_bare_names_share_ids_within_one_parse():
    f = parse_formula("(forall y (R x y))", SIG)
    x = next(iter(free_vars(f)))
    assert x.name == "x"
    assert f.body.args[0] == x


def test_bounded_quantifier_syntax():
    f = parse_formula("(exists (<= y (f x)) (P y))", SIG)
    assert isinstance(f, Quant) and f.kind == "exists"
    assert f.bound == App("f", (free_vars(f).pop(),))


@pytest.mark.parametrize("text,msg", [
    ("(R x)", "arity mismatch"),
    ("(Q x)", "unknown relation"),
    ("(P (g x))", "unknown function"),
    ("(imp (P x)", "unbalanced"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ParseError) as e:
        parse_formula(text, SIG)
    assert msg in str(e.value).lower() or e.value.line


def test_error_position():
    with pytest.raises(ParseError) as e:
        parse_formula("(and (P x)\n  (R x))", SIG)
    assert e.value.line == 2


def test_open_signature_records_symbols():
    sig, f = parse_formula_file("(forall x (Q (g x) x))")
    assert sig.rels["Q"] == 2 and sig.funcs["g"] == 1


def test_alpha_equality_ignores_bound_names():
    a = parse_formula("(forall y?5 (R x?1 y?5))", SIG)
    b = parse_formula("(forall z?9 (R x?1 z?9))", SIG)
    c = parse_formula("(forall z?9 (R z?9 x?1))", SIG)
    assert alpha_equal(a, b)
    assert not alpha_equal(a, c)


def test_substitution_avoids_capture():
    f = parse_formula("(forall y?2 (R x?1 y?2))", SIG)
    g = substitute(f, Var("x", 1), Var("y", 2))
    assert isinstance(g, Quant)
    assert g.var != Var("y", 2)
    assert Var("y", 2) in free_vars(g)


def test_substitution_leaves_bound_occurrences():
    f = parse_formula("(and (P x?1) (forall x?1 (P x?1)))", SIG)
    g = subst(f, {Var("x", 1): App("c")})
    assert g.left == Atom("P", (App("c"),))
    assert g.right == f.right


def test_reader_names_table():
    rd = Reader(SIG, "y?7")
    rd.formula(read_one("(P x)"))
    assert rd.names["x"].id == 8


def test_signature_rejects_clash():
    with pytest.raises(ValueError):
        Signature({"P": 1}, {"P": 1})

"""Grounding of quantifiers over the finite entity domains of a signature."""

from __future__ import annotations

from ..errors import EmptyDomain, UnsortedVariable
from .ast import (
    And,
    App,
    Arith,
    Atom,
    BoolConst,
    Compare,
    Const,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Signature,
    SortKind,
    Term,
    Var,
    conj,
    disj,
)


def substitute_term(t: Term, var: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == var else t
    if isinstance(t, App):
        return App(t.func, tuple(substitute_term(a, var, value) for a in t.args))
    if isinstance(t, Arith):
        return Arith(t.op, tuple(substitute_term(a, var, value) for a in t.args))
    return t


def substitute(f: Formula, var: str, value: Term) -> Formula:
    """Replace free occurrences of ``var``; inner binders of the same name shadow it."""
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(substitute_term(a, var, value) for a in f.args))
    if isinstance(f, Compare):
        return Compare(f.op, substitute_term(f.left, var, value), substitute_term(f.right, var, value))
    if isinstance(f, Not):
        return Not(substitute(f.arg, var, value))
    if isinstance(f, And):
        return And(tuple(substitute(a, var, value) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(substitute(a, var, value) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(f.lhs, var, value), substitute(f.rhs, var, value))
    if isinstance(f, Iff):
        return Iff(substitute(f.lhs, var, value), substitute(f.rhs, var, value))
    if isinstance(f, (ForAll, Exists)):
        if f.var == var:
            return f
        return type(f)(f.var, f.sort, substitute(f.body, var, value))
    raise TypeError(f"not a formula: {f!r}")


def instantiate_quantifiers(f: Formula, sig: Signature) -> Formula:
    """Expand every quantifier into a finite conjunction or disjunction.

    A universal over sort S becomes the conjunction of its body at each
    entity of S, an existential the disjunction. Single-entity domains
    yield the body itself rather than a one-element connective.
    """
    if isinstance(f, (BoolConst, Atom, Compare)):
        return f
    if isinstance(f, Not):
        return Not(instantiate_quantifiers(f.arg, sig))
    if isinstance(f, And):
        return And(tuple(instantiate_quantifiers(a, sig) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(instantiate_quantifiers(a, sig) for a in f.args))
    if isinstance(f, Implies):
        return Implies(instantiate_quantifiers(f.lhs, sig), instantiate_quantifiers(f.rhs, sig))
    if isinstance(f, Iff):
        return Iff(instantiate_quantifiers(f.lhs, sig), instantiate_quantifiers(f.rhs, sig))
    if isinstance(f, (ForAll, Exists)):
        if f.sort.kind is not SortKind.UNINTERPRETED:
            raise EmptyDomain(f"cannot ground {f.var} over builtin sort {f.sort.name}")
        if f.sort not in sig.sorts:
            raise UnsortedVariable(f"variable {f.var} has undeclared sort {f.sort.name}")
        domain = sig.entities_of(f.sort)
        if not domain:
            raise EmptyDomain(f"sort {f.sort.name} has no entities")
        body = instantiate_quantifiers(f.body, sig)
        parts = [substitute(body, f.var, Const(e)) for e in domain]
        return conj(parts) if isinstance(f, ForAll) else disj(parts)
    raise TypeError(f"not a formula: {f!r}")


__all__ = ["instantiate_quantifiers", "substitute", "substitute_term"]

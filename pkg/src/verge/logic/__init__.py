"""Typed formulas, signatures and SMT-LIB2 conversion."""

from .ast import (
    BOOL,
    FALSE,
    INT,
    TRUE,
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
    FunctionDecl,
    Iff,
    Implies,
    IntLit,
    NamedAssertion,
    Not,
    Or,
    Origin,
    Signature,
    Sort,
    SortKind,
    Term,
    Var,
    check_sorts,
    conj,
    disj,
    is_quantifier_free,
    symbols,
)
from .instantiate import instantiate_quantifiers, substitute
from .smtlib import (
    Script,
    parse_smtlib_formula,
    parse_smtlib_script,
    render_assertion,
    render_declarations,
    render_formula,
    render_smtlib,
    render_term,
)

__all__ = [
    "instantiate_quantifiers",
    "substitute",
    "BOOL",
    "FALSE",
    "INT",
    "TRUE",
    "And",
    "App",
    "Arith",
    "Atom",
    "BoolConst",
    "Compare",
    "Const",
    "Exists",
    "ForAll",
    "Formula",
    "FunctionDecl",
    "Iff",
    "Implies",
    "IntLit",
    "NamedAssertion",
    "Not",
    "Or",
    "Origin",
    "Signature",
    "Sort",
    "SortKind",
    "Term",
    "Var",
    "check_sorts",
    "conj",
    "disj",
    "is_quantifier_free",
    "symbols",
    "Script",
    "parse_smtlib_formula",
    "parse_smtlib_script",
    "render_assertion",
    "render_declarations",
    "render_formula",
    "render_smtlib",
    "render_term",
]

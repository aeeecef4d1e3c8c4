"""Text form of promise models: lexer, parser, printer, resolver."""
from .ast_nodes import (
    AgentDecl,
    BodyNode,
    BundleDecl,
    BundleRef,
    CmpLiteralNode,
    ConditionNode,
    Decl,
    FlagDecl,
    FlagLiteralNode,
    IdentTerm,
    ModelAst,
    Name,
    NumberTerm,
    ParamTerm,
    PromiseDecl,
    StringTerm,
    TermNode,
    TypeDecl,
)
from .diagnostics import (
    Diagnostic,
    diagnostic_sort_key,
    ERROR,
    has_errors,
    point_span,
    SourceSpan,
    WARNING,
)
from .lexer import Token, tokenize
from .parser import parse, ParseResult
from .printer import print_model
from .resolver import resolve, ResolveResult

__all__ = [
    "AgentDecl",
    "BodyNode",
    "BundleDecl",
    "BundleRef",
    "CmpLiteralNode",
    "ConditionNode",
    "Decl",
    "Diagnostic",
    "diagnostic_sort_key",
    "ERROR",
    "FlagDecl",
    "FlagLiteralNode",
    "has_errors",
    "IdentTerm",
    "ModelAst",
    "Name",
    "NumberTerm",
    "ParamTerm",
    "parse",
    "ParseResult",
    "point_span",
    "print_model",
    "PromiseDecl",
    "resolve",
    "ResolveResult",
    "SourceSpan",
    "StringTerm",
    "TermNode",
    "Token",
    "tokenize",
    "TypeDecl",
    "WARNING",
]

"""Surface syntax tree.

Classifier expressions (types, kinds and signatures) share one syntactic
category, ``Cls``; the elaborator sorts them.  Every node carries a source
span, which never takes part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from modml.errors import Span

_span = field(default=None, compare=False, repr=False)


# -- classifiers ----------------------------------------------------------------


@dataclass(frozen=True)
class TyName:
    path: tuple[str, ...]
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TyType:
    """The kind of types, written ``type``."""

    span: Optional[Span] = _span


@dataclass(frozen=True)
class TyArrow:
    dom: "Cls"
    cod: "Cls"
    binder: Optional[str] = None
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TyProd:
    left: "Cls"
    right: "Cls"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TyEff:
    arg: "Cls"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TyRef:
    arg: "Cls"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class ModType:
    """``○A``; ``notation`` is one of ``modal``, ``ocaml``, ``moscow``."""

    sig: "Cls"
    notation: str = field(default="modal", compare=False)
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Exists:
    binder: str
    classifier: "Cls"
    body: "Cls"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Forall:
    binder: str
    classifier: "Cls"
    body: "Cls"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class SpecType:
    name: str
    manifest: Optional["Cls"] = None
    span: Optional[Span] = _span


@dataclass(frozen=True)
class SpecVal:
    name: str
    type: "Cls"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class SpecStructure:
    name: str
    sig: "Cls"
    span: Optional[Span] = _span


Spec = Union[SpecType, SpecVal, SpecStructure]


@dataclass(frozen=True)
class SigBody:
    specs: tuple[Spec, ...]
    span: Optional[Span] = _span


@dataclass(frozen=True)
class WithType:
    sig: "Cls"
    path: tuple[str, ...]
    manifest: "Cls"
    span: Optional[Span] = _span


Cls = Union[TyName, TyType, TyArrow, TyProd, TyEff, TyRef, ModType, Exists, Forall, SigBody, WithType]


# -- expressions ----------------------------------------------------------------


@dataclass(frozen=True)
class Name:
    name: str
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Proj:
    base: "Expr"
    field: str
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Literal:
    value: object
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Apply:
    fn: "Expr"
    arg: "Expr"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Param:
    name: str
    classifier: Optional[Cls] = None
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Fn:
    param: Param
    body: "Expr"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class FnCase:
    """``fn true => a | false => b``."""

    if_true: "Expr"
    if_false: "Expr"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class IfExpr:
    cond: "Expr"
    then: "Expr"
    else_: "Expr"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Tuple:
    items: tuple["Expr", ...]
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Annot:
    expr: "Expr"
    type: Cls
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Pack:
    """``pack <u, v> [as T]``: the existential introduction."""

    witness: "Expr"
    body: "Expr"
    type: Optional[Cls] = None
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Unpack:
    package: "Expr"
    witness: str
    body_name: str
    body: "Expr"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class EtaNotation:
    """``η[A] u`` (modal), ``(module u : A)`` (OCaml), ``[structure u as A]`` (MoscowML)."""

    expr: "Expr"
    sig: Optional[Cls]
    notation: str = field(default="modal", compare=False)
    span: Optional[Span] = _span


@dataclass(frozen=True)
class BindModule:
    """``bind X = u in e`` and its OCaml/MoscowML spellings (which annotate ``u``)."""

    name: str
    package: "Expr"
    body: "Expr"
    sig: Optional[Cls] = None
    notation: str = field(default="modal", compare=False)
    span: Optional[Span] = _span


@dataclass(frozen=True)
class BigLambda:
    param: Param
    body: "Expr"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TypeApp:
    fn: "Expr"
    arg: Cls
    span: Optional[Span] = _span


@dataclass(frozen=True)
class StructExpr:
    decls: tuple["Decl", ...]
    span: Optional[Span] = _span


@dataclass(frozen=True)
class LetVal:
    name: str
    value: "Expr"
    body: "Expr"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class ClsExpr:
    """A classifier used as a value, e.g. the manifest of ``type t = int``."""

    cls: Cls
    span: Optional[Span] = _span


Expr = Union[
    Name, Proj, Literal, Apply, Fn, FnCase, IfExpr, Tuple, Annot, Pack, Unpack, EtaNotation,
    BindModule, BigLambda, TypeApp, StructExpr, LetVal, ClsExpr,
]


# -- declarations ---------------------------------------------------------------


@dataclass(frozen=True)
class SignatureDecl:
    name: str
    body: Cls
    span: Optional[Span] = _span


@dataclass(frozen=True)
class StructureDecl:
    name: str
    ascription: Optional[Cls]
    body: Expr
    opaque: bool = False
    span: Optional[Span] = _span


@dataclass(frozen=True)
class FunctorDecl:
    name: str
    param: str
    param_sig: Cls
    result_sig: Optional[Cls]
    body: Expr
    span: Optional[Span] = _span


@dataclass(frozen=True)
class ValDecl:
    name: str
    type: Optional[Cls]
    expr: Expr
    span: Optional[Span] = _span


@dataclass(frozen=True)
class FunDecl:
    name: str
    params: tuple[Param, ...]
    result: Optional[Cls]
    body: Expr
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TypeDecl:
    name: str
    manifest: Optional[Cls] = None
    span: Optional[Span] = _span


Decl = Union[SignatureDecl, StructureDecl, FunctorDecl, ValDecl, FunDecl, TypeDecl]


def to_json(node):
    """A JSON-ready view of a surface tree: ``{"node": ClassName, field: ...}``, spans as ``[line, col]``."""
    from dataclasses import fields, is_dataclass

    if isinstance(node, Span):
        return [node.line, node.col]
    if is_dataclass(node):
        out = {"node": type(node).__name__}
        for f in fields(node):
            out[f.name] = to_json(getattr(node, f.name))
        return out
    if isinstance(node, (tuple, list)):
        return [to_json(x) for x in node]
    if node == ():
        return None
    return node

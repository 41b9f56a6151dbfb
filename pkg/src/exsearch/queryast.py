"""AST types shared by the boolean, sequential, and context query languages."""

from dataclasses import dataclass

FIELDS = ("word", "lemma", "tag", "entity")
FIELD_SHORT = {"w": "word", "l": "lemma", "t": "tag", "e": "entity"}
FIELD_ABBREV = {v: k for k, v in FIELD_SHORT.items()}

CONTEXT_FIELDS = ("title", "abstract", "paragraph", "authors", "venue",
                  "year", "mesh")

# word/lemma values compare case-insensitively; tag/entity exactly
CASE_FOLDED_FIELDS = ("word", "lemma")


@dataclass(frozen=True)
class FieldConstraint:
    field: str  # one of FIELDS
    values: tuple[str, ...] = ()  # exact-set alternatives
    regex: str | None = None  # mutually exclusive with values

    def __post_init__(self):
        assert self.field in FIELDS, self.field
        assert bool(self.values) != (self.regex is not None)


@dataclass(frozen=True)
class TermConstraint:
    conjuncts: tuple[FieldConstraint, ...]

    def by_field(self, name):
        for fc in self.conjuncts:
            if fc.field == name:
                return fc
        return None


@dataclass(frozen=True)
class Term:
    constraint: TermConstraint
    optional: bool = False
    capture: str | None = None
    expand: bool = False


@dataclass(frozen=True)
class Wildcard:
    capture: str | None = None


@dataclass(frozen=True)
class Gap:
    min: int = 0
    max: int | None = None  # None = up to end of sentence
    capture: str | None = None


@dataclass(frozen=True)
class Repetition:
    constraint: TermConstraint
    min: int = 0
    max: int | None = None  # None = unbounded


@dataclass(frozen=True)
class ContextClause:
    polarity: str  # "must" | "must_not" | "should"
    field: str  # one of CONTEXT_FIELDS
    kind: str  # "term" | "phrase" | "prefix" | "regex" | "range"
    value: str = ""
    low: int | None = None  # range bounds (year only)
    high: int | None = None


@dataclass(frozen=True)
class ContextQuery:
    clauses: tuple[ContextClause, ...]


@dataclass(frozen=True)
class BooleanQuery:
    terms: tuple[Term, ...]
    context: ContextQuery | None = None


@dataclass(frozen=True)
class SequentialQuery:
    elements: tuple[object, ...]  # Term | Wildcard | Gap | Repetition
    context: ContextQuery | None = None


@dataclass(frozen=True)
class QueryGraphNode:
    id: int
    constraint: TermConstraint | None = None  # None = unconstrained
    capture: str | None = None
    expand: bool = False


@dataclass(frozen=True)
class QueryGraph:
    nodes: tuple[QueryGraphNode, ...]
    edges: tuple[tuple[int, int, str], ...]  # (from node id, to node id, label)
    context: ContextQuery | None = None

    def node(self, node_id):
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


def capture_names(query):
    """Capture names of a query, in query order."""
    names = []
    if isinstance(query, BooleanQuery):
        items = query.terms
    elif isinstance(query, SequentialQuery):
        items = query.elements
    elif isinstance(query, QueryGraph):
        items = query.nodes
    else:
        raise TypeError(type(query))
    for item in items:
        cap = getattr(item, "capture", None)
        if cap is not None:
            names.append(cap)
    return names

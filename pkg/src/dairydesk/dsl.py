"""Dataframe-chain mini-language: grammar, parser, pretty-printer,
interpreter.

The language is a closed, decidable subset of the dataframe surface syntax
the NoSQL agent asks the model to emit:

    program := ident "=" "df" step*
    step    := ".select(" quotedcols ")" | ".filter(" pred ")"
             | ".distinct()" | ".groupBy(" quotedcols ").agg(" agg ")"
             | ".count()" | ".avg(" quotedcol ")"
             | ".orderBy(" quotedcol ["," "ascending=" bool] ")"
             | ".limit(" int ")"
    pred    := quotedcol cmp literal {("&" | "and") pred}
    cmp     := > | >= | < | <= | == | !=
    agg     := ("avg"|"sum"|"min"|"max"|"count") "(" quotedcol ")"

Whitespace-insensitive. This grammar is a public, versioned interface
documented for prompt authors.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from typing import Optional, Union

AGG_FUNCTIONS = ("avg", "sum", "min", "max", "count")
COMPARATORS = (">=", "<=", "==", "!=", ">", "<")

Literal = Union[int, float, str]


class DslError(Exception):
    pass


class DslSyntaxError(DslError):
    """Parse failure with the offending position."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class DslColumnError(DslSyntaxError):
    """Unknown column, with a nearest-name suggestion when one exists."""

    def __init__(self, name: str, position: int, known: tuple[str, ...]):
        close = difflib.get_close_matches(name, known, n=1)
        hint = f"; did you mean {close[0]!r}?" if close else ""
        super().__init__(f"unknown column {name!r}{hint}", position)


class DslExecutionError(DslError):
    pass


@dataclass(frozen=True)
class Condition:
    column: str
    op: str
    value: Literal


@dataclass(frozen=True)
class Select:
    columns: tuple[str, ...]


@dataclass(frozen=True)
class Filter:
    conditions: tuple[Condition, ...]


@dataclass(frozen=True)
class Distinct:
    pass


@dataclass(frozen=True)
class GroupByAgg:
    columns: tuple[str, ...]
    agg_fn: str
    agg_column: str


@dataclass(frozen=True)
class Count:
    pass


@dataclass(frozen=True)
class Avg:
    column: str


@dataclass(frozen=True)
class OrderBy:
    column: str
    ascending: bool = True


@dataclass(frozen=True)
class Limit:
    n: int


DslStep = Union[Select, Filter, Distinct, GroupByAgg, Count, Avg, OrderBy, Limit]


@dataclass(frozen=True)
class DslProgram:
    target: str
    steps: tuple[DslStep, ...]


_TOKEN_SPEC = [
    ("STRING", r'"[^"]*"'),
    ("NUMBER", r"-?\d+(?:\.\d+)?"),
    ("CMP", "|".join(re.escape(c) for c in COMPARATORS)),
    ("IDENT", r"[A-Za-z_][A-Za-z_0-9]*"),
    ("ASSIGN", r"="),
    ("DOT", r"\."),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("AMP", r"&"),
    ("WS", r"\s+"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if not match:
            raise DslSyntaxError(f"unexpected character {source[pos]!r}", pos)
        if match.lastgroup != "WS":
            tokens.append(_Token(match.lastgroup, match.group(), pos))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, source: str, columns: tuple[str, ...]):
        self.source = source
        self.columns = columns
        self.tokens = _tokenize(source)
        self.i = 0

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            raise DslSyntaxError("unexpected end of program", len(self.source))
        self.i += 1
        return tok

    def _expect(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self._next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind.lower()
            raise DslSyntaxError(f"expected {want}, found {tok.text!r}", tok.pos)
        return tok

    def _quoted_column(self) -> str:
        tok = self._expect("STRING")
        name = tok.text[1:-1]
        if name not in self.columns:
            raise DslColumnError(name, tok.pos, self.columns)
        return name

    def _quoted_columns(self) -> tuple[str, ...]:
        cols = [self._quoted_column()]
        while self._peek() and self._peek().kind == "COMMA":
            self._next()
            cols.append(self._quoted_column())
        return tuple(cols)

    def _literal(self) -> Literal:
        tok = self._next()
        if tok.kind == "STRING":
            return tok.text[1:-1]
        if tok.kind == "NUMBER":
            return float(tok.text) if "." in tok.text else int(tok.text)
        raise DslSyntaxError(f"expected a literal, found {tok.text!r}", tok.pos)

    def _predicate(self) -> tuple[Condition, ...]:
        conditions = [self._condition()]
        while True:
            tok = self._peek()
            if tok and (tok.kind == "AMP" or (tok.kind == "IDENT" and tok.text == "and")):
                self._next()
                conditions.append(self._condition())
            else:
                return tuple(conditions)

    def _condition(self) -> Condition:
        column = self._quoted_column()
        op = self._expect("CMP").text
        return Condition(column=column, op=op, value=self._literal())

    def _bool(self) -> bool:
        tok = self._expect("IDENT")
        if tok.text in ("True", "true"):
            return True
        if tok.text in ("False", "false"):
            return False
        raise DslSyntaxError(f"expected a boolean, found {tok.text!r}", tok.pos)

    def parse(self) -> DslProgram:
        target = self._expect("IDENT")
        self._expect("ASSIGN")
        df = self._expect("IDENT")
        if df.text != "df":
            raise DslSyntaxError(f"expected df, found {df.text!r}", df.pos)
        steps: list[DslStep] = []
        while self._peek() is not None:
            self._expect("DOT")
            steps.append(self._step())
        return DslProgram(target=target.text, steps=tuple(steps))

    def _step(self) -> DslStep:
        name_tok = self._expect("IDENT")
        name = name_tok.text
        self._expect("LPAREN")
        if name == "select":
            cols = self._quoted_columns()
            self._expect("RPAREN")
            return Select(cols)
        if name == "filter":
            pred = self._predicate()
            self._expect("RPAREN")
            return Filter(pred)
        if name == "distinct":
            self._expect("RPAREN")
            return Distinct()
        if name == "groupBy":
            cols = self._quoted_columns()
            self._expect("RPAREN")
            self._expect("DOT")
            agg_tok = self._expect("IDENT")
            if agg_tok.text != "agg":
                raise DslSyntaxError(f"expected agg, found {agg_tok.text!r}", agg_tok.pos)
            self._expect("LPAREN")
            fn_tok = self._expect("IDENT")
            if fn_tok.text not in AGG_FUNCTIONS:
                raise DslSyntaxError(
                    f"unknown aggregate {fn_tok.text!r}", fn_tok.pos
                )
            self._expect("LPAREN")
            agg_col = self._quoted_column()
            self._expect("RPAREN")
            self._expect("RPAREN")
            return GroupByAgg(cols, fn_tok.text, agg_col)
        if name == "count":
            self._expect("RPAREN")
            return Count()
        if name == "avg":
            col = self._quoted_column()
            self._expect("RPAREN")
            return Avg(col)
        if name == "orderBy":
            col = self._quoted_column()
            ascending = True
            if self._peek() and self._peek().kind == "COMMA":
                self._next()
                key = self._expect("IDENT")
                if key.text != "ascending":
                    raise DslSyntaxError(
                        f"expected ascending=, found {key.text!r}", key.pos
                    )
                self._expect("ASSIGN")
                ascending = self._bool()
            self._expect("RPAREN")
            return OrderBy(col, ascending)
        if name == "limit":
            tok = self._expect("NUMBER")
            if "." in tok.text or int(tok.text) < 0:
                raise DslSyntaxError("limit takes a non-negative integer", tok.pos)
            self._expect("RPAREN")
            return Limit(int(tok.text))
        raise DslSyntaxError(f"unsupported step {name!r}", name_tok.pos)


def parse_dsl(source: str, columns: tuple[str, ...]) -> DslProgram:
    parser = _Parser(source, columns)
    program = parser.parse()
    if not program.steps:
        return program
    return program


def _render_literal(value: Literal) -> str:
    if isinstance(value, str):
        return f'"{value}"'
    return repr(value)


def pretty_print(program: DslProgram) -> str:
    """Canonical source; re-parsing yields an equal program."""
    parts = [f"{program.target} = df"]
    for step in program.steps:
        if isinstance(step, Select):
            cols = ", ".join(f'"{c}"' for c in step.columns)
            parts.append(f".select({cols})")
        elif isinstance(step, Filter):
            pred = " & ".join(
                f'"{c.column}" {c.op} {_render_literal(c.value)}'
                for c in step.conditions
            )
            parts.append(f".filter({pred})")
        elif isinstance(step, Distinct):
            parts.append(".distinct()")
        elif isinstance(step, GroupByAgg):
            cols = ", ".join(f'"{c}"' for c in step.columns)
            parts.append(f'.groupBy({cols}).agg({step.agg_fn}("{step.agg_column}"))')
        elif isinstance(step, Count):
            parts.append(".count()")
        elif isinstance(step, Avg):
            parts.append(f'.avg("{step.column}")')
        elif isinstance(step, OrderBy):
            if step.ascending:
                parts.append(f'.orderBy("{step.column}")')
            else:
                parts.append(f'.orderBy("{step.column}", ascending=False)')
        elif isinstance(step, Limit):
            parts.append(f".limit({step.n})")
    return "".join(parts)


# ---------------------------------------------------------------------------
# Interpreter


@dataclass(frozen=True)
class Frame:
    """An intermediate table: named columns over row tuples."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def _compare(column: str, op: str, cell, literal: Literal) -> bool:
    if cell is None:
        return False  # null semantics: comparisons drop the row
    numeric_literal = isinstance(literal, (int, float))
    numeric_cell = isinstance(cell, (int, float))
    if numeric_literal != numeric_cell:
        raise DslExecutionError(
            f"type mismatch: column {column!r} value {cell!r} vs literal {literal!r}"
        )
    if op == ">":
        return cell > literal
    if op == ">=":
        return cell >= literal
    if op == "<":
        return cell < literal
    if op == "<=":
        return cell <= literal
    if op == "==":
        return cell == literal
    if op == "!=":
        return cell != literal
    raise DslExecutionError(f"unknown comparator {op!r}")


def _column_index(frame: Frame, column: str) -> int:
    try:
        return frame.columns.index(column)
    except ValueError:
        raise DslExecutionError(
            f"column {column!r} not present after earlier steps"
        ) from None


def _aggregate(fn: str, values: list) -> Union[int, float]:
    if fn == "count":
        return len([v for v in values if v is not None])
    present = [v for v in values if v is not None]
    if not present:
        raise DslExecutionError(f"{fn} over all-null values")
    if fn == "avg":
        return sum(present) / len(present)
    if fn == "sum":
        return sum(present)
    if fn == "min":
        return min(present)
    if fn == "max":
        return max(present)
    raise DslExecutionError(f"unknown aggregate {fn!r}")


def _apply_step(frame: Frame, step: DslStep) -> Frame:
    if isinstance(step, Select):
        idx = [_column_index(frame, c) for c in step.columns]
        return Frame(step.columns, tuple(tuple(r[i] for i in idx) for r in frame.rows))
    if isinstance(step, Filter):
        kept = []
        for row in frame.rows:
            if all(
                _compare(c.column, c.op, row[_column_index(frame, c.column)], c.value)
                for c in step.conditions
            ):
                kept.append(row)
        return Frame(frame.columns, tuple(kept))
    if isinstance(step, Distinct):
        seen: dict[tuple, None] = {}
        for row in frame.rows:
            seen.setdefault(row, None)
        return Frame(frame.columns, tuple(seen))
    if isinstance(step, GroupByAgg):
        key_idx = [_column_index(frame, c) for c in step.columns]
        agg_idx = _column_index(frame, step.agg_column)
        groups: dict[tuple, list] = {}
        for row in frame.rows:
            groups.setdefault(tuple(row[i] for i in key_idx), []).append(row[agg_idx])
        out_columns = step.columns + (f"{step.agg_fn}({step.agg_column})",)
        out_rows = tuple(
            key + (_aggregate(step.agg_fn, values),) for key, values in groups.items()
        )
        return Frame(out_columns, out_rows)
    if isinstance(step, Count):
        return Frame(("count",), ((len(frame.rows),),))
    if isinstance(step, Avg):
        idx = _column_index(frame, step.column)
        values = [r[idx] for r in frame.rows]
        bad = [v for v in values if v is not None and not isinstance(v, (int, float))]
        if bad:
            raise DslExecutionError(
                f"type mismatch: avg over non-numeric column {step.column!r}"
            )
        return Frame(
            (f"avg({step.column})",), ((_aggregate("avg", values),),)
        )
    if isinstance(step, OrderBy):
        idx = _column_index(frame, step.column)
        non_null = [r for r in frame.rows if r[idx] is not None]
        nulls = [r for r in frame.rows if r[idx] is None]
        types = {type(r[idx]) in (int, float) for r in non_null}
        if len(types) > 1:
            raise DslExecutionError(
                f"type mismatch: cannot order mixed types in {step.column!r}"
            )
        ordered = sorted(non_null, key=lambda r: r[idx], reverse=not step.ascending)
        return Frame(frame.columns, tuple(ordered) + tuple(nulls))
    if isinstance(step, Limit):
        return Frame(frame.columns, frame.rows[: step.n])
    raise DslExecutionError(f"unknown step {step!r}")


def execute_dsl(program: DslProgram, frame: Frame) -> Frame:
    """Apply steps left to right; nulls are dropped by filters and ignored
    by aggregates."""
    for step in program.steps:
        frame = _apply_step(frame, step)
    return frame

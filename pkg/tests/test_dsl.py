from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from dairydesk.dsl import (
    Avg,
    Condition,
    Count,
    Distinct,
    DslColumnError,
    DslError,
    DslExecutionError,
    DslProgram,
    DslSyntaxError,
    Filter,
    Frame,
    GroupByAgg,
    Limit,
    OrderBy,
    Select,
    execute_dsl,
    parse_dsl,
    pretty_print,
)

COLUMNS = ("Animal", "Herd", "Event", "Parity", "Yield")


# ---------------------------------------------------------------------------
# Independent reference evaluator over list-of-dict rows. Written against
# the documented semantics, not the interpreter, so agreement is evidence.


class RefError(Exception):
    pass


def _ref_compare(cell, op, literal):
    if cell is None:
        return False
    if isinstance(literal, (int, float)) != isinstance(cell, (int, float)):
        raise RefError("type mismatch")
    return {
        ">": cell > literal,
        ">=": cell >= literal,
        "<": cell < literal,
        "<=": cell <= literal,
        "==": cell == literal,
        "!=": cell != literal,
    }[op]


def _ref_agg(fn, values):
    if fn == "count":
        return len([v for v in values if v is not None])
    present = [v for v in values if v is not None]
    if not present:
        raise RefError("all null")
    if fn == "avg":
        return sum(present) / len(present)
    return {"sum": sum, "min": min, "max": max}[fn](present)


def reference_execute(program: DslProgram, columns, dict_rows):
    cols = list(columns)
    rows = [dict(r) for r in dict_rows]
    for step in program.steps:
        if isinstance(step, Select):
            cols = list(step.columns)
            rows = [{c: r[c] for c in cols} for r in rows]
        elif isinstance(step, Filter):
            rows = [
                r
                for r in rows
                if all(_ref_compare(r[c.column], c.op, c.value) for c in step.conditions)
            ]
        elif isinstance(step, Distinct):
            seen, out = set(), []
            for r in rows:
                key = tuple(r[c] for c in cols)
                if key not in seen:
                    seen.add(key)
                    out.append(r)
            rows = out
        elif isinstance(step, GroupByAgg):
            out_col = f"{step.agg_fn}({step.agg_column})"
            order, groups = [], {}
            for r in rows:
                key = tuple(r[c] for c in step.columns)
                if key not in groups:
                    groups[key] = []
                    order.append(key)
                groups[key].append(r[step.agg_column])
            cols = list(step.columns) + [out_col]
            rows = [
                {**dict(zip(step.columns, key)), out_col: _ref_agg(step.agg_fn, groups[key])}
                for key in order
            ]
        elif isinstance(step, Count):
            cols, rows = ["count"], [{"count": len(rows)}]
        elif isinstance(step, Avg):
            values = [r[step.column] for r in rows]
            if any(v is not None and not isinstance(v, (int, float)) for v in values):
                raise RefError("non-numeric avg")
            out_col = f"avg({step.column})"
            cols, rows = [out_col], [{out_col: _ref_agg("avg", values)}]
        elif isinstance(step, OrderBy):
            non_null = [r for r in rows if r[step.column] is not None]
            nulls = [r for r in rows if r[step.column] is None]
            kinds = {isinstance(r[step.column], (int, float)) for r in non_null}
            if len(kinds) > 1:
                raise RefError("mixed types")
            rows = sorted(
                non_null, key=lambda r: r[step.column], reverse=not step.ascending
            ) + nulls
        elif isinstance(step, Limit):
            rows = rows[: step.n]
    return cols, [tuple(r[c] for c in cols) for r in rows]


def _cells_equal(a, b):
    if isinstance(a, float) and isinstance(b, float):
        return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)
    return a == b


# ---------------------------------------------------------------------------
# Random program generation over a typed schema


def _random_rows(rng, n=60):
    rows = []
    for i in range(n):
        rows.append(
            {
                "Animal": f"A{rng.randint(1, 20):02d}",
                "Herd": rng.choice(["H1", "H2", "H3", None]),
                "Event": rng.choice(["Calving", "Heat", "DryOff", "Sold"]),
                "Parity": rng.choice([1, 2, 3, 4, 5, None]),
                "Yield": rng.choice([None, round(rng.uniform(10, 50), 2)]),
            }
        )
    return rows


_COLUMN_TYPES = {
    "Animal": str,
    "Herd": str,
    "Event": str,
    "Parity": int,
    "Yield": float,
}


def _random_condition(rng, cols):
    col = rng.choice(cols)
    op = rng.choice([">", ">=", "<", "<=", "==", "!="])
    t = _COLUMN_TYPES[col]
    if t is str:
        value = rng.choice(["H1", "Calving", "A05", "zzz"])
        op = rng.choice(["==", "!="]) if rng.random() < 0.7 else op
    elif t is int:
        value = rng.randint(0, 6)
    else:
        value = round(rng.uniform(10, 50), 1)
    return Condition(column=col, op=op, value=value)


def random_program(rng) -> DslProgram:
    cols = list(COLUMNS)
    steps = []
    for _ in range(rng.randint(0, 5)):
        kind = rng.choice(["select", "filter", "distinct", "orderBy", "limit", "groupBy"])
        if kind == "select":
            keep = rng.sample(cols, rng.randint(1, len(cols)))
            steps.append(Select(tuple(keep)))
            cols = keep
        elif kind == "filter":
            conds = tuple(_random_condition(rng, cols) for _ in range(rng.randint(1, 2)))
            steps.append(Filter(conds))
        elif kind == "distinct":
            steps.append(Distinct())
        elif kind == "orderBy":
            steps.append(OrderBy(rng.choice(cols), ascending=rng.random() < 0.5))
        elif kind == "limit":
            steps.append(Limit(rng.randint(0, 30)))
        elif kind == "groupBy":
            numeric = [c for c in cols if _COLUMN_TYPES[c] in (int, float)]
            if not numeric:
                continue
            keys = rng.sample(cols, rng.randint(1, min(2, len(cols))))
            fn = rng.choice(["avg", "sum", "min", "max", "count"])
            agg_col = rng.choice(numeric)
            steps.append(GroupByAgg(tuple(keys), fn, agg_col))
            cols = list(keys) + [f"{fn}({agg_col})"]
            break  # aggregated schema: stop adding schema-dependent steps
    if steps and isinstance(steps[-1], GroupByAgg):
        pass
    elif rng.random() < 0.3:
        numeric = [c for c in cols if c in _COLUMN_TYPES and _COLUMN_TYPES[c] in (int, float)]
        if rng.random() < 0.5 or not numeric:
            steps.append(Count())
        else:
            steps.append(Avg(rng.choice(numeric)))
    return DslProgram(target="result", steps=tuple(steps))


class TestParser:
    def test_documented_programs_parse(self):
        cases = [
            'result = df.select("Event").distinct()',
            'result = df.filter("Parity" == 3).select("Animal").distinct().count()',
            'result = df.filter("Parity" > 2).avg("Yield")',
            'result = df.orderBy("Yield", ascending=False).select("Animal", "Yield").limit(1)',
            'result = df.groupBy("Herd").agg(avg("Yield"))',
            'result = df.filter("Parity" > 1 & "Yield" >= 20.5)',
            'result = df.filter("Parity" > 1 and "Yield" >= 20.5)',
            "result = df",
        ]
        for source in cases:
            program = parse_dsl(source, COLUMNS)
            assert program.target == "result"

    def test_whitespace_insensitive(self):
        a = parse_dsl('result=df.select("Animal")', COLUMNS)
        b = parse_dsl('result  =  df . select( "Animal" )', COLUMNS)
        assert a == b

    def test_syntax_error_carries_position(self):
        with pytest.raises(DslSyntaxError) as exc:
            parse_dsl('result = df.select("Animal"', COLUMNS)
        assert exc.value.position == len('result = df.select("Animal"')

    def test_unexpected_character_position(self):
        source = 'result = df.select("Animal")#'
        with pytest.raises(DslSyntaxError) as exc:
            parse_dsl(source, COLUMNS)
        assert exc.value.position == source.index("#")

    def test_unknown_column_suggests_nearest(self):
        with pytest.raises(DslColumnError, match="did you mean 'Parity'"):
            parse_dsl('result = df.select("Partiy")', COLUMNS)

    def test_unknown_step_rejected(self):
        with pytest.raises(DslSyntaxError, match="unsupported step"):
            parse_dsl('result = df.explode("Animal")', COLUMNS)

    def test_unknown_aggregate_rejected(self):
        with pytest.raises(DslSyntaxError, match="unknown aggregate"):
            parse_dsl('result = df.groupBy("Herd").agg(median("Yield"))', COLUMNS)

    def test_negative_limit_rejected(self):
        with pytest.raises(DslSyntaxError):
            parse_dsl("result = df.limit(-1)", COLUMNS)

    def test_python_code_rejected(self):
        with pytest.raises(DslSyntaxError):
            parse_dsl("import os; os.system('rm -rf /')", COLUMNS)
        with pytest.raises(DslSyntaxError):
            parse_dsl("result = df.map(lambda r: r)", COLUMNS)


class TestPrettyPrintRoundTrip:
    def test_random_programs_round_trip(self):
        rng = random.Random(101)
        for _ in range(300):
            program = random_program(rng)
            assert parse_dsl(pretty_print(program), COLUMNS) == program

    def test_canonical_examples(self):
        source = 'result = df.filter("Parity" > 2).avg("Yield")'
        program = parse_dsl(source, COLUMNS)
        assert pretty_print(program) == source


class TestFuzzParserNeverCrashes:
    def test_10000_fuzzed_inputs(self):
        """The parser may reject, but must never raise anything other than
        a DslSyntaxError on arbitrary input."""
        rng = random.Random(202)
        charset = 'abcdef ._()"=<>!&123,result df select filter\n\t#$%\\\''
        seeds = [
            'result = df.select("Animal")',
            'result = df.filter("Parity" == 3).count()',
            'result = df.orderBy("Yield", ascending=False)',
            'result = df.groupBy("Herd").agg(avg("Yield"))',
        ]
        for i in range(10_000):
            if i % 2 == 0:
                source = "".join(rng.choices(charset, k=rng.randint(0, 60)))
            else:  # mutate a valid program
                base = list(rng.choice(seeds))
                for _ in range(rng.randint(1, 4)):
                    pos = rng.randrange(len(base))
                    base[pos] = rng.choice(charset)
                source = "".join(base)
            try:
                parse_dsl(source, COLUMNS)
            except DslSyntaxError:
                pass  # rejection is fine; any other exception fails the test

    @given(st.text(max_size=80))
    def test_hypothesis_fuzz(self, source):
        try:
            parse_dsl(source, COLUMNS)
        except DslSyntaxError:
            pass


class TestInterpreterAgainstReference:
    def test_1000_random_programs_agree(self):
        rng = random.Random(303)
        dict_rows = _random_rows(rng)
        frame = Frame(COLUMNS, tuple(tuple(r[c] for c in COLUMNS) for r in dict_rows))
        agreements = 0
        for _ in range(1000):
            program = random_program(rng)
            # Round-trip through the concrete syntax on every sample.
            program = parse_dsl(pretty_print(program), COLUMNS)
            try:
                expected_cols, expected_rows = reference_execute(
                    program, COLUMNS, dict_rows
                )
            except RefError:
                with pytest.raises(DslExecutionError):
                    execute_dsl(program, frame)
                continue
            result = execute_dsl(program, frame)
            assert list(result.columns) == expected_cols
            assert len(result.rows) == len(expected_rows)
            for got, want in zip(result.rows, expected_rows):
                assert all(_cells_equal(g, w) for g, w in zip(got, want))
            agreements += 1
        assert agreements > 500  # the majority of programs must execute

    def test_null_semantics(self):
        frame = Frame(("x",), ((1,), (None,), (3,)))
        filtered = execute_dsl(
            parse_dsl('result = df.filter("x" > 0)', ("x",)), frame
        )
        assert filtered.rows == ((1,), (3,))
        avg = execute_dsl(parse_dsl('result = df.avg("x")', ("x",)), frame)
        assert avg.rows == ((2.0,),)

    def test_avg_all_null_errors(self):
        frame = Frame(("x",), ((None,), (None,)))
        with pytest.raises(DslExecutionError):
            execute_dsl(parse_dsl('result = df.avg("x")', ("x",)), frame)

    def test_avg_non_numeric_errors(self):
        frame = Frame(("x",), (("a",),))
        with pytest.raises(DslExecutionError):
            execute_dsl(parse_dsl('result = df.avg("x")', ("x",)), frame)

    def test_filter_type_mismatch_errors(self):
        frame = Frame(("x",), (("a",),))
        with pytest.raises(DslExecutionError):
            execute_dsl(parse_dsl('result = df.filter("x" > 3)', ("x",)), frame)

    def test_orderby_nulls_last_and_stable(self):
        frame = Frame(("x", "y"), ((2, "b"), (None, "n"), (1, "a"), (2, "c")))
        out = execute_dsl(parse_dsl('result = df.orderBy("x")', ("x", "y")), frame)
        assert out.rows == ((1, "a"), (2, "b"), (2, "c"), (None, "n"))

    def test_select_then_missing_column_errors(self):
        frame = Frame(("x", "y"), ((1, 2),))
        program = parse_dsl('result = df.select("x").avg("y")', ("x", "y"))
        with pytest.raises(DslExecutionError, match="not present"):
            execute_dsl(program, frame)

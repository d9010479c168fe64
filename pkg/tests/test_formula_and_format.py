import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from codecubature.fileformat import HEADER_KEYS, FormatError, emit, parse, write_atomic
from codecubature.formula import CubatureFormula, FormulaError, merge_points
from codecubature.moments import MeasureSpec
from codecubature.verify import verify_exhaustive


def test_merge_points_keeps_first_occurrence_and_signed_zero():
    pts = np.array([[1.0, 0.0], [0.5, 0.5], [1.0, -0.0], [0.5, 0.5]])
    merged, w = merge_points(pts, np.full(4, 0.25))
    assert merged.tolist() == [[1.0, 0.0], [0.5, 0.5]]
    assert w.tolist() == [0.5, 0.5]


def test_formula_validation_and_flags():
    m = MeasureSpec("cube", 1)
    f = CubatureFormula(m, [[-0.5], [0.5]], [0.5, 0.5], 1)
    assert f.flags == {"equal-weight": True, "positive": True, "support": "interior", "support-general": "interior"}
    with pytest.raises(FormulaError):
        CubatureFormula(m, [[0.0]], [0.9], 1)
    with pytest.raises(FormulaError):
        CubatureFormula(m, [[0.0, 0.0]], [1.0], 1)
    s = CubatureFormula(MeasureSpec("sphere", 2), [[1.0, 0.0], [-1.0, 0.0]], [0.5, 0.5], 1)
    assert (s.support, s.support_general) == ("interior", "boundary")


def _demo():
    return CubatureFormula(MeasureSpec("cube", 2), [[0.1, -0.3], [-0.1, 0.3]], [0.5, 0.5], 1)


def test_emit_header_order_and_parse():
    text = emit(_demo(), [verify_exhaustive(_demo())], {"region": "cube", "seed": 0})
    lines = text.splitlines()
    assert lines[0] == "codecubature-formula 1"
    assert [ln.split(":")[0] for ln in lines[1 : 1 + len(HEADER_KEYS)]] == list(HEADER_KEYS)
    ff = parse(text)
    assert ff.header["points"] == "2"
    assert np.array_equal(ff.formula().points, _demo().points)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (5, 3), elements=st.floats(-1e6, 1e6, allow_nan=False, width=64)))
def test_round_trip_is_bit_exact(pts):
    f = CubatureFormula(MeasureSpec("gaussian", 3), pts, np.full(5, 0.2), 0)
    back = parse(emit(f)).formula()
    assert back.points.tobytes() == f.points.tobytes()
    assert back.weights.tobytes() == f.weights.tobytes()


@pytest.mark.parametrize("mutate,line", [
    (lambda ls: ls[:1] + ["garbage"] + ls[2:], 2),
    (lambda ls: ls[:-1], None),
    (lambda ls: ls[:-1] + ["0.5 0.1 abc"], 17),
    (lambda ls: ls[:-1] + ["0.5 0.1"], 17),
    (lambda ls: ["codecubature-formula 9"] + ls[1:], 1),
])
def test_parse_errors_report_lines(mutate, line):
    lines = emit(_demo()).splitlines()
    with pytest.raises(FormatError) as err:
        parse("\n".join(mutate(lines)) + "\n")
    if line is not None:
        assert err.value.line == line


def test_write_atomic(tmp_path):
    path = tmp_path / "f.cub"
    write_atomic(str(path), "abc\n")
    write_atomic(str(path), "def\n")
    assert path.read_text() == "def\n"
    assert [p.name for p in tmp_path.iterdir()] == ["f.cub"]

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starlattice.model import (
    BadCharacter,
    BadRowLength,
    EdgeProfile,
    GeometryParams,
    HeightMap,
    LatticeEncoding,
    LatticeError,
    MalformedHeader,
    NegativeHeight,
    RaggedRows,
    SymbolicOffset,
    format_symbolic,
    parse_encoding,
    parse_heightmap,
    parse_symbolic,
    serialize_encoding,
    serialize_heightmap,
)


def test_parse_small():
    enc = parse_encoding("2 2\n10\n01")
    assert enc.bits == ((1, 0), (0, 1))
    assert enc.shape == (2, 2)


def test_parse_single():
    assert parse_encoding("1 1\n1").bits == ((1,),)


def test_parse_short_row():
    with pytest.raises(BadRowLength) as info:
        parse_encoding("2 2\n10\n0")
    assert info.value.row == 2


def test_parse_missing_row():
    with pytest.raises(BadRowLength):
        parse_encoding("3 2\n10\n01")


def test_parse_bad_char():
    with pytest.raises(BadCharacter) as info:
        parse_encoding("2 3\n101\n0x1")
    assert (info.value.row, info.value.col) == (2, 2)


@pytest.mark.parametrize("text", ["", "2\n10", "a b\n1", "0 3\n", "2 2 2\n10\n01"])
def test_parse_bad_header(text):
    with pytest.raises(MalformedHeader):
        parse_encoding(text)


def test_parse_comments_and_trailing_newline():
    text = "# a comment\n2 2\n# between\n10\n01\n"
    assert parse_encoding(text).bits == ((1, 0), (0, 1))


def test_serialize():
    assert serialize_encoding(LatticeEncoding(((1, 0), (0, 1)))) == "2 2\n10\n01"
    assert serialize_encoding(LatticeEncoding(((1,),))) == "1 1\n1"


def test_roundtrip_random_6x4():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        enc = LatticeEncoding.from_array(rng.integers(0, 2, size=(6, 4)))
        assert parse_encoding(serialize_encoding(enc)) == enc


@settings(max_examples=200)
@given(st.integers(1, 9), st.integers(1, 9), st.data())
def test_roundtrip_property(a, b, data):
    bits = data.draw(st.lists(st.lists(st.integers(0, 1), min_size=b, max_size=b), min_size=a, max_size=a))
    enc = LatticeEncoding(tuple(map(tuple, bits)))
    assert parse_encoding(serialize_encoding(enc)) == enc


def test_encoding_invariants():
    with pytest.raises(LatticeError):
        LatticeEncoding(((1, 2),))
    with pytest.raises(LatticeError):
        LatticeEncoding(((1, 0), (1,)))
    with pytest.raises(LatticeError):
        LatticeEncoding(())


def test_columns_and_transpose():
    enc = LatticeEncoding.from_columns([[1, 0, 1], [0, 0, 1]])
    assert enc.shape == (3, 2)
    assert enc.column(0) == (1, 0, 1)
    assert enc.transposed().shape == (2, 3)
    assert enc.flipped().column(1) == (1, 1, 0)


def test_geometry_defaults_and_checks():
    g = GeometryParams()
    assert (g.s1, g.s2, g.crossbar_l, g.compression_c) == (10.0, 20.0, 20.0, 0.0)
    with pytest.raises(LatticeError):
        GeometryParams(s1=0)
    with pytest.raises(LatticeError):
        GeometryParams(compression_c=40.0)
    with pytest.raises(LatticeError):
        GeometryParams(compression_c=-1.0)


@pytest.mark.parametrize(
    "text,value",
    [("0", (0, 0)), ("a", (0, 1)), ("-a", (0, -1)), ("1L", (1, 0)), ("2L-2a", (2, -2)),
     ("3L+3a", (3, 3)), ("1L−a", (1, -1))],
)
def test_symbolic_parse(text, value):
    assert parse_symbolic(text) == value


@given(st.integers(-5, 5), st.integers(-9, 9))
def test_symbolic_roundtrip(lam, alpha):
    assert parse_symbolic(format_symbolic((lam, alpha))) == (lam, alpha)


def test_symbolic_arithmetic():
    assert SymbolicOffset(2, -2) - SymbolicOffset(1, -2) == (1, 0)
    assert str(SymbolicOffset(1, 0) + (0, -1)) == "1L-a"


def test_symbolic_rejects_junk():
    with pytest.raises(ValueError):
        parse_symbolic("2Lx")


def test_edge_profile():
    e = EdgeProfile.parse("+-+-")
    assert e.slopes == (1, -1, 1, -1)
    assert e.bits == (1, 0, 1, 0)
    assert str(EdgeProfile.from_bits([0, 1])) == "-+"
    with pytest.raises(LatticeError):
        EdgeProfile.parse("+0")
    with pytest.raises(LatticeError):
        EdgeProfile((1, 2))


def test_heightmap_parse():
    hm = parse_heightmap("0 1\n1 0")
    assert (hm.rows_r, hm.layers_s) == (2, 2)
    assert hm.layer(1) == (1, 0)
    assert parse_heightmap("0 0\n0 0").heights == ((0, 0), (0, 0))
    assert serialize_heightmap(hm) == "0 1\n1 0"


def test_heightmap_errors():
    with pytest.raises(NegativeHeight):
        parse_heightmap("1 -2")
    with pytest.raises(RaggedRows):
        parse_heightmap("1 2\n3")
    with pytest.raises(LatticeError):
        HeightMap(())

import pytest
from golden import CORE_ENTRIES, CTYPE_METHOD_COUNTS

from ctypeinfer.registry import (CTYPES, LABEL_ORDER, CType, DuplicateEntry, FormatError,
                                 Registry, RegistryEntry, bundled_path, load_registry,
                                 lookup, parse_registry)
from ctypeinfer.resolve import MethodId


def test_labels_and_carriers():
    assert [c.label for c in LABEL_ORDER] == [
        "PATH", "URL", "SQL", "HOST", "PORT", "XCOORD", "YCOORD",
        "WIDTH", "HEIGHT", "YEAR", "MONTH", "DAY", "OTHER"]
    assert len(CTYPES) == 12
    text = {c.label for c in CTYPES if c.carrier == "String"}
    assert text == {"PATH", "URL", "SQL", "HOST"}
    assert all(c.carrier == "int" for c in CTYPES if c.label not in text)
    assert CType.parse("port") is CType.PORT
    with pytest.raises(ValueError):
        CType.parse("COLOR")


def test_single_row():
    reg = parse_registry("java.io.File.<init>(LString;)V 0=PATH\n")
    entry = reg[MethodId.parse("java.io.File.<init>(LString;)V")]
    assert dict(entry.arg_ctypes) == {0: CType.PATH}
    assert entry.label_for(1) is CType.OTHER


def test_two_positions():
    reg = parse_registry("java.awt.Dimension.<init>(II)V 0=WIDTH 1=HEIGHT")
    (entry,) = reg.values()
    assert dict(entry.arg_ctypes) == {0: CType.WIDTH, 1: CType.HEIGHT}


@pytest.mark.parametrize("text,line", [
    ("# header\njava.io.File.<init>(LString;)V 2=PATH\n", 2),
    ("java.io.File.<init>(LString;)V\n", 1),
    ("\n\njava.io.File.<init>(LString;)V 0=COLOR\n", 3),
    ("java.io.File.<init>(LString;)V 0:PATH\n", 1),
    ("java.io.File.<init>(LString;V 0=PATH\n", 1),
    ("a.B.m(I)V 0=OTHER\n", 1),
    ("a.B.m(II)V 0=XCOORD 0=YCOORD\n", 1),
])
def test_format_errors_carry_line(text, line):
    with pytest.raises(FormatError) as info:
        parse_registry(text)
    assert info.value.line == line


def test_duplicate_entry():
    text = "a.B.m(I)V 0=PORT\n# c\na.B.m(I)V 0=PORT\n"
    with pytest.raises(DuplicateEntry) as info:
        parse_registry(text)
    assert info.value.line == 3


def test_entry_invariants():
    mid = MethodId.parse("a.B.m(I)V")
    with pytest.raises(ValueError):
        RegistryEntry(mid, {})
    with pytest.raises(ValueError):
        RegistryEntry(mid, {1: CType.PORT})


def test_lookup_rules():
    reg = parse_registry("Y.m(I)V 0=PORT\nZ.m(I)V 0=YEAR\n")
    x, y, z = (MethodId.parse(f"{c}.m(I)V") for c in "XYZ")
    assert lookup(reg, {x, y}).method == y
    assert reg.lookup({z, y, x}).method == y  # smallest text wins
    assert lookup(reg, {x}) is None
    assert lookup(reg, set()) is None


def test_bundled_registry_covers_core_entries(registry):
    for text, mapping in CORE_ENTRIES.items():
        entry = registry.get(MethodId.parse(text))
        assert entry is not None, text
        assert {p: c.label for p, c in entry.arg_ctypes.items()} == mapping


def test_bundled_registry_roundtrip(registry):
    text = bundled_path("registry.txt").read_text(encoding="utf-8")
    assert registry.dump() == text
    again = parse_registry(registry.dump())
    assert set(again.entries()) == set(registry.entries())


def test_bundled_counts(registry):
    counts = {c.label: n for c, n in registry.ctype_counts().items()}
    assert counts == CTYPE_METHOD_COUNTS
    assert sum(counts.values()) == 218


def test_load_from_path(tmp_path):
    p = tmp_path / "r.txt"
    p.write_text("a.B.open(LString;)V 0=PATH  # trailing comment\n")
    reg = load_registry(p)
    assert isinstance(reg, Registry) and len(reg) == 1


def test_registry_is_immutable(registry):
    with pytest.raises(TypeError):
        registry[MethodId.parse("a.B.m(I)V")] = None

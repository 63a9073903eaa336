import pytest

from basketforge.core import step_unpack, volume
from basketforge.fixtures import FixtureError, fixture_dir, load_tablec


def test_tablec_shape(tablec):
    assert len(tablec.rows) == 63
    assert sum(len(r.subrows) for r in tablec.rows) == 57
    assert len(tablec.excluded) == 20


def test_printed_volumes_recompute(tablec):
    for r in tablec.rows:
        assert volume(r.formal) == r.k3, r.no
        for s in r.subrows:
            assert volume(s.formal) == s.k3, s.label


def test_printed_from_side_inside_row(tablec):
    # the printed left-hand side of each packing unpacks into the row basket
    n = 0
    for r in tablec.rows:
        for s in r.subrows:
            if s.source is not None:
                r.basket - step_unpack(s.source, 12, 11)
                n += 1
    assert n > 40


def test_subrow_baskets_unpack_to_row(tablec):
    for r in tablec.rows:
        for s in r.subrows:
            assert step_unpack(s.basket, 12, 11) == r.basket, s.label


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("BASKETFORGE_FIXTURES", str(tmp_path))
    assert fixture_dir() == tmp_path
    with pytest.raises(FixtureError):
        load_tablec()

import numpy as np
import pytest

import wsp.fields as F
import wsp.fixtures as X
import wsp.fldio as IO
import wsp.kernels as KK
from wsp.errors import FormatError
from wsp.fields import Grid, ScalarField, TensorField, TimeSeriesField, VectorField


def _bit_equal(a, b):
    return a.tobytes() == b.tobytes()


def test_scalar_round_trip_is_bit_exact(tmp_path, grid2, rng):
    f = ScalarField(grid2, rng.standard_normal(grid2.shape), time=0.75)
    path = tmp_path / "f.fld"
    IO.write_field(path, f)
    back = IO.read_field(path)
    assert back.grid == grid2
    assert back.time == 0.75
    assert _bit_equal(back.values, f.values)


def test_static_field_round_trip(tmp_path, grid2):
    f = X.gaussian_scalar(grid2)
    path = tmp_path / "f.fld"
    IO.write_field(path, f)
    assert IO.read_field(path).time is None


def test_vector_round_trip(tmp_path, grid3, rng):
    v = VectorField.from_arrays(grid3, [rng.standard_normal(grid3.shape) for _ in range(3)])
    path = tmp_path / "v.fld"
    IO.write_field(path, v)
    back = IO.read_field(path)
    assert isinstance(back, VectorField)
    for k in range(3):
        assert _bit_equal(back.component(k).values, v.component(k).values)


def test_tensor_round_trip(tmp_path, grid2):
    T = X.gaussian_tensor(grid2, seed=4)
    path = tmp_path / "t.fld"
    IO.write_field(path, T)
    back = IO.read_field(path)
    assert isinstance(back, TensorField)
    for i in range(2):
        for j in range(2):
            assert _bit_equal(back.component(i, j).values, T.component(i, j).values)


def test_series_round_trip(tmp_path, grid2):
    times = [0.0, 0.5, 1.25]
    series = TimeSeriesField(tuple(X.swirl_velocity(Grid(2, 4.0, 32), t) for t in times))
    path = tmp_path / "u.fld"
    IO.write_series(path, series)
    back = IO.read_series(path)
    assert len(back) == 3
    assert np.allclose(back.times, times)
    for k in range(3):
        assert _bit_equal(back[k].array(), series[k].array())


def test_kernel_table_round_trip(tmp_path):
    g = Grid(2, 2.0, 16)
    table = KK.hessian_table(g, 0, 1)
    path = tmp_path / "k01.fld"
    table.save(path)
    back = KK.KernelTable.load(path)
    assert back.kernel_id == KK.KERNEL_HESSIAN
    assert back.index == (0, 1)
    assert back.singular_center
    assert _bit_equal(back.values.values, table.values.values)


def test_kernel_table_not_readable_as_plain_field(tmp_path):
    g = Grid(2, 2.0, 16)
    path = tmp_path / "k.fld"
    KK.far_table(g, 0, 0).save(path)
    with pytest.raises(FormatError):
        IO.read_field(path)


def test_plain_field_not_readable_as_kernel_table(tmp_path, grid2):
    path = tmp_path / "f.fld"
    IO.write_field(path, X.gaussian_scalar(grid2))
    with pytest.raises(FormatError):
        IO.read_kernel_table(path)


def test_bad_magic_reports_offset_zero(tmp_path):
    path = tmp_path / "junk.fld"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(FormatError) as exc:
        IO.read_field(path)
    assert exc.value.offset == 0
    assert "magic" in str(exc.value)


def test_truncated_payload_reports_offset(tmp_path, grid2):
    path = tmp_path / "cut.fld"
    IO.write_field(path, X.gaussian_scalar(grid2))
    whole = path.read_bytes()
    path.write_bytes(whole[: len(whole) // 2])
    with pytest.raises(FormatError) as exc:
        IO.read_field(path)
    assert exc.value.offset is not None
    assert "payload" in str(exc.value)


def test_trailing_bytes_rejected_for_single_record(tmp_path, grid2):
    path = tmp_path / "extra.fld"
    IO.write_field(path, X.gaussian_scalar(grid2))
    path.write_bytes(path.read_bytes() + b"\x00" * 7)
    with pytest.raises(FormatError) as exc:
        IO.read_field(path)
    assert "trailing" in str(exc.value)


def test_corrupt_header_fields(tmp_path, grid2):
    path = tmp_path / "h.fld"
    IO.write_field(path, X.gaussian_scalar(grid2))
    buf = bytearray(path.read_bytes())
    buf[8:12] = (9).to_bytes(4, "little")  # dim = 9
    path.write_bytes(bytes(buf))
    with pytest.raises(FormatError) as exc:
        IO.read_field(path)
    assert exc.value.offset == 8


def test_pack_unpack_index_round_trip():
    for idx in [(0, 1), (2, 2), (1, 0, 2), (0,)]:
        assert IO.unpack_index(IO.pack_index(idx), len(idx)) == idx
    with pytest.raises(FormatError):
        IO.pack_index((16, 0))


def test_read_series_single_stamped_record(tmp_path, grid2):
    f = X.gaussian_scalar(grid2, time=0.0)
    path = tmp_path / "one.fld"
    IO.write_field(path, f)
    series = IO.read_series(path)
    assert len(series) == 1
    assert series.times[0] == 0.0

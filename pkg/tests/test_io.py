import json

import numpy as np
import pytest

from app import io
from app.exceptions import DomainError
from app.spectral import Region


def test_csv_table_keeps_full_precision(tmp_path):
    path = io.write_csv(tmp_path / "table.csv", ["a", "b"], [(np.pi, 1), (np.e, 2)], header={"xi": -8.0})
    header, rows = io.read_table(path)
    assert header == {"xi": "-8.0"}
    assert rows[0, 0] == np.pi
    assert rows[1, 0] == np.e
    assert path.read_text().splitlines()[1] == "a,b"


def test_initial_csv_needs_header_keys(tmp_path):
    x = np.linspace(-5, 5, 11)
    path = io.write_csv(tmp_path / "initial.csv", ["x", "q0"], zip(x, np.ones(11)), header={"sigma": -1})
    with pytest.raises(DomainError, match="q_minus"):
        io.read_initial_csv(path)
    path = io.write_csv(tmp_path / "initial.csv", ["x", "q0"], zip(x, np.ones(11)),
                        header={"sigma": -1, "q_minus": 1.0})
    datum = io.read_initial_csv(path)
    assert datum.sigma == -1
    assert datum.q_minus == 1.0


def test_field_csv(tmp_path):
    x = np.linspace(-2, 2, 41)
    q = 1 + 0.1j * np.exp(-x ** 2)
    path = io.write_field_csv(tmp_path / "field.csv", x, q, t=0.25, sigma=-1, q_minus=1.0)
    grid, t, sigma = io.read_field_csv(path)
    assert t == 0.25
    assert sigma == -1
    assert grid.q_plus == 1.0
    assert np.array_equal(grid.values, q)


def test_field_csv_needs_sigma(tmp_path):
    x = np.linspace(-2, 2, 41)
    path = io.write_csv(tmp_path / "field.csv", ["x", "re_q"], zip(x, np.ones(41)))
    with pytest.raises(DomainError):
        io.read_field_csv(path)
    grid, t, sigma = io.read_field_csv(path, sigma=1)
    assert t == 0.0
    assert grid.q_plus == -1.0


def test_missing_files(tmp_path):
    with pytest.raises(DomainError):
        io.read_json(tmp_path / "absent.json")
    with pytest.raises(DomainError):
        io.read_table(tmp_path / "absent.csv")


def test_to_jsonable():
    payload = {"z": 1 + 2j, "n": np.int64(3), "values": np.array([0.5, 1.5]), "region": Region.I,
               "points": (np.complex128(-1j),)}
    data = json.loads(json.dumps(io.to_jsonable(payload)))
    assert data == {"z": [1.0, 2.0], "n": 3, "values": [0.5, 1.5], "region": "I", "points": [[-0.0, -1.0]]}


def test_parsers():
    assert np.allclose(io.parse_range("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    assert io.parse_complex_list("2+1i, 0.5,-1j") == [2 + 1j, 0.5, -1j]
    assert io.parse_grid("101x51") == (101, 51)
    assert io.parse_window("-3,3,-2,2") == (-3.0, 3.0, -2.0, 2.0)
    for parser, text in ((io.parse_range, "0:1"), (io.parse_complex_list, "a,b"),
                         (io.parse_grid, "101"), (io.parse_window, "1,2,3")):
        with pytest.raises(DomainError):
            parser(text)

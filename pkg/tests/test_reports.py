import json
import os
from fractions import Fraction

import numpy as np
import pytest

from statward.numeric import Approx, sqrt
from statward.reports import envelope, strip_timestamp, to_csv, to_json, to_table, write_atomic


def test_json_keeps_rationals_exact():
    text = to_json(envelope("demo", {"tol": Fraction(1, 1000)},
                            {"x": Fraction(-2, 3), "n": np.int64(5), "ok": np.bool_(True),
                             "arr": np.arange(3), "pair": (1, 2), "r": sqrt(Fraction(2))}))
    data = json.loads(text)
    assert data["schema"] == 1 and data["command"] == "demo"
    assert data["result"]["x"] == "-2/3"
    assert data["result"]["n"] == 5 and data["result"]["ok"] is True
    assert data["result"]["arr"] == [0, 1, 2] and data["result"]["pair"] == [1, 2]
    assert data["result"]["r"].startswith("1.41421356237309504880")
    assert data["config"]["tol"] == "1/1000"


def test_timestamp_is_the_only_volatile_field():
    a = to_json(envelope("demo", {}, {"v": 1}))
    b = json.loads(a)
    b["timestamp"] = "1999-01-01T00:00:00+00:00"
    assert strip_timestamp(a) == strip_timestamp(json.dumps(b))
    assert "timestamp" not in json.loads(strip_timestamp(a))


def test_csv_and_table():
    rows = [[1, Fraction(1, 3), Approx(Fraction(1, 2))], [10, Fraction(2), "x"]]
    text = to_csv(("n", "q", "v"), rows)
    assert text.splitlines() == ["n,q,v", "1,1/3,0.5", "10,2,x"]
    table = to_table(("n", "q", "v"), rows).splitlines()
    assert table[0].split() == ["n", "q", "v"]
    assert set(table[1].replace(" ", "")) == {"-"}
    assert table[2].split() == ["1", "1/3", "0.5"]


def test_write_atomic_replaces_and_cleans_up(tmp_path):
    target = tmp_path / "r.txt"
    write_atomic(str(target), "one\n")
    write_atomic(str(target), "two\n")
    assert target.read_text() == "two\n"
    assert os.listdir(tmp_path) == ["r.txt"]


def test_write_atomic_failure_leaves_old_file(tmp_path, monkeypatch):
    target = tmp_path / "r.txt"
    target.write_text("keep\n")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        write_atomic(str(target), "new\n")
    assert target.read_text() == "keep\n"
    assert os.listdir(tmp_path) == ["r.txt"]

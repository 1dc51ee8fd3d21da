import json
import struct

import numpy as np
import pytest

from output import CSV_COLUMNS, LIBRARY_VERSION, ResultEnvelope, ResultWriter, csv_text, dumps, pack_fields, read_fields, unpack_fields
from output.svg import render_loops, render_pivotals
from percolation.coloring import BoundaryCondition, sample_percolation
from percolation.loops import loop_ensemble
from pivotal.measures import pivotal_measure


def test_dumps_sorts_keys():
    assert dumps({"b": 1, "a": np.int64(2), "c": np.arange(2)}) == '{"a":2,"b":1,"c":[0,1]}'


def test_envelope_stamp():
    envelope = ResultEnvelope("embed", {"z": 1, "a": [1.5]}, {"constants": {"c_T": 1.0}})
    envelope.stamp({"seed": 1}, ["embed", "--samples", "10"], 0.25, {"embed": {"master": 1}})
    assert envelope.payload_json() == '{"a":[1.5],"z":1}'
    data = json.loads(envelope.to_json())
    assert data["command"] == "embed"
    assert data["metadata"]["library_version"] == LIBRARY_VERSION
    assert data["metadata"]["constants"] == {"c_T": 1.0}
    assert data["metadata"]["argv"] == ["embed", "--samples", "10"]


def test_csv_text():
    rows = [{"x": 0.5, "y": 1.0, "mass": 2.0, "extra": "ignored"}]
    text = csv_text("occupation", rows)
    assert text.splitlines() == [",".join(CSV_COLUMNS["occupation"]), "0.5,1.0,2.0"]
    with pytest.raises(ValueError, match="Unknown CSV command"):
        csv_text("teleport", rows)


def test_fields_layout():
    values = np.arange(6, dtype=np.float64).reshape(2, 3)
    data = pack_fields({"kind": "gff"}, values)
    (length,) = struct.unpack_from("<Q", data, 0)
    header = json.loads(data[8:8 + length])
    assert header["shape"] == [2, 3] and header["dtype"] == "<f8"
    assert len(data) == 8 + length + 6 * 8
    back_header, back = unpack_fields(data)
    assert back_header["kind"] == "gff"
    assert np.array_equal(back, values)


def test_writer_stages_until_commit(tmp_path):
    writer = ResultWriter()
    writer.add_text(tmp_path / "a.txt", "hello\n")
    writer.add_lines(tmp_path / "sub" / "events.jsonl", {"horizon": 1.0}, ['{"t":0.5}'])
    writer.add_fields(tmp_path / "fields.bin", {"kind": "gff"}, np.ones(3))
    assert len(writer) == 3
    assert not any(p.exists() for p in writer.paths)

    written = writer.commit()
    assert len(written) == 3 and len(writer) == 0
    assert (tmp_path / "a.txt").read_text() == "hello\n"
    assert (tmp_path / "sub" / "events.jsonl").read_text().splitlines() == ['{"horizon":1.0}', '{"t":0.5}']
    header, values = read_fields(tmp_path / "fields.bin")
    assert values.tolist() == [1.0, 1.0, 1.0]


def test_svg_is_deterministic(rhombus):
    coloring = sample_percolation(rhombus, BoundaryCondition.blue(), np.random.default_rng(3))
    loops = loop_ensemble(rhombus, coloring)
    first = render_loops(rhombus, coloring, loops)
    assert first.lstrip().startswith("<?xml")
    assert first == render_loops(rhombus, coloring, loops)

    pivotal = pivotal_measure(rhombus, coloring, 0.0)
    assert render_pivotals(rhombus, coloring, pivotal) == render_pivotals(rhombus, coloring, pivotal)

"""
Result envelopes and the staged file writer.

Every command returns a ResultEnvelope: the command-specific payload plus
metadata (config echo, wall time, seeds, normalization constants, library
version). Only the metadata may differ between identical invocations; the
payload is serialized with sorted keys so reruns are byte-identical.

Files are staged in memory and written together by ResultWriter.commit(),
so a command that fails part-way leaves nothing behind.
"""

import csv
import io
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from output.mapping import CSV_COLUMNS, LIBRARY_VERSION, SCHEMA_VERSION


def _plain(value):
    """json.dumps fallback for numpy scalars/arrays and Fractions."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_plain, separators=(",", ":"))


@dataclass
class ResultEnvelope:
    command:   str
    payload:   dict
    metadata:  dict = field(default_factory=dict)

    def stamp(self, config: dict, argv: list[str], wall_time: float, seeds: dict | None = None) -> None:
        """Fill the run metadata; normalization constants set by the command are kept."""
        self.metadata.setdefault("constants", {})
        self.metadata.update({
            "schema_version":  SCHEMA_VERSION,
            "library_version": LIBRARY_VERSION,
            "argv":            list(argv),
            "config":          config,
            "wall_time":       wall_time,
            "seeds":           seeds or {},
        })

    def payload_json(self) -> str:
        return dumps(self.payload)

    def to_json(self) -> str:
        return dumps({"command": self.command, "payload": self.payload, "metadata": self.metadata})


def csv_text(command: str, rows) -> str:
    columns = CSV_COLUMNS.get(command)
    if columns is None:
        raise ValueError(f"Unknown CSV command: '{command}'. Valid options: {', '.join(CSV_COLUMNS)}")
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in columns})
    return buffer.getvalue()


def pack_fields(header: dict, values: np.ndarray) -> bytes:
    """
    fields.bin layout: u64 little-endian header length, UTF-8 JSON header,
    then the values as a flat little-endian f64 array in row-major order.
    """
    values = np.ascontiguousarray(values, dtype="<f8")
    head = dumps({**header, "shape": list(values.shape), "dtype": "<f8"}).encode("utf-8")
    return struct.pack("<Q", len(head)) + head + values.tobytes()


def unpack_fields(data: bytes) -> tuple[dict, np.ndarray]:
    (length,) = struct.unpack_from("<Q", data, 0)
    header = json.loads(data[8:8 + length].decode("utf-8"))
    values = np.frombuffer(data, dtype="<f8", offset=8 + length).reshape(header["shape"])
    return header, values


def read_fields(path) -> tuple[dict, np.ndarray]:
    return unpack_fields(Path(path).read_bytes())


class ResultWriter:
    """
    Collects output files for one command and writes them on commit().

    Each staged file maps a path to its full contents; nothing touches the
    filesystem before commit().
    """

    def __init__(self, verbose: bool = False):
        self.verbose = verbose
        self._staged: dict[Path, bytes] = {}

    def __len__(self):
        return len(self._staged)

    @property
    def paths(self) -> list[Path]:
        return list(self._staged)

    def add_text(self, path, text: str) -> None:
        self._staged[Path(path)] = text.encode("utf-8")

    def add_bytes(self, path, data: bytes) -> None:
        self._staged[Path(path)] = data

    def add_envelope(self, path, envelope: ResultEnvelope) -> None:
        self.add_text(path, envelope.to_json() + "\n")

    def add_csv(self, path, command: str, rows) -> None:
        self.add_text(path, csv_text(command, rows))

    def add_lines(self, path, header: dict, lines) -> None:
        """JSONL: a header object on the first line, then one record per line."""
        self.add_text(path, "\n".join([dumps(header), *lines]) + "\n")

    def add_fields(self, path, header: dict, values: np.ndarray) -> None:
        self.add_bytes(path, pack_fields(header, values))

    def commit(self) -> list[Path]:
        written = []
        for path, data in self._staged.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
            written.append(path)
            if self.verbose:
                print(f"[ResultWriter] Wrote {path} ({len(data)} bytes)")
        self._staged.clear()
        return written

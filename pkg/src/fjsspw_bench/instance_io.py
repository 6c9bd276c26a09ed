"""Reading and writing the FJSSP and FJSSP-W text formats.

FJSSP files::

    n m [avg_machines_per_op]
    n_i  m_i1 k T k T ...  m_i2 k T ...          (one line per job)

Machine indices are 1-based.

FJSSP-W files::

    n m w
    n_i  m_i1 k c s T s T ...  k c s T ...        (one line per job)

where ``c`` is the number of admissible workers for the (operation, machine)
option. Machine and worker ids are 0-based in FJSSP-W files.
"""

from __future__ import annotations

import csv
import logging
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Union

from .model import (
    Characteristics,
    Instance,
    Job,
    MachineOption,
    ModelError,
    Operation,
    WorkerInstance,
    WorkerOption,
    compute_characteristics,
)

log = logging.getLogger(__name__)

_INT_RE = re.compile(r"^[+-]?\d+$")
_NUM_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class ParseError(ValueError):
    """Malformed instance text. ``line`` and ``token`` are 1-based."""

    def __init__(self, message: str, line: int = 0, token: int = 0, source: str = ""):
        self.line = line
        self.token = token
        self.source = source
        self.reason = message
        where = f"{source or '<text>'}:{line}:{token}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class RawInstanceText:
    body: str
    source: str = ""
    format: str = "auto"  # fjssp | fjssp-w | auto


class _Tokens:
    """Whitespace token stream that remembers (line, column) of every token."""

    def __init__(self, lines: list[str], source: str, first_line: int = 1):
        self.items: list[tuple[str, int, int]] = []
        for offset, line in enumerate(lines):
            for col, tok in enumerate(line.split(), start=1):
                self.items.append((tok, first_line + offset, col))
        self.pos = 0
        self.source = source

    def error(self, message: str, index: Optional[int] = None) -> ParseError:
        index = self.pos if index is None else index
        if index < len(self.items):
            _, line, col = self.items[index]
        elif self.items:
            _, line, col = self.items[-1]
            col += 1
        else:
            line, col = 0, 0
        return ParseError(message, line, col, self.source)

    def next_int(self, what: str) -> int:
        if self.pos >= len(self.items):
            raise self.error(f"unexpected end of input, expected {what}")
        tok = self.items[self.pos][0]
        if not _INT_RE.match(tok):
            raise self.error(f"expected integer {what}, got {tok!r}")
        self.pos += 1
        return int(tok)

    def at_end(self) -> bool:
        return self.pos >= len(self.items)


def _split_header(text: RawInstanceText) -> tuple[list[str], int, list[str]]:
    lines = text.body.splitlines()
    for idx, line in enumerate(lines):
        if line.strip():
            return line.split(), idx + 1, lines[idx + 1:]
    raise ParseError("empty instance text", 0, 0, text.source)


def _header_int(tok: str, line: int, col: int, source: str, what: str) -> int:
    if not _INT_RE.match(tok):
        raise ParseError(f"expected integer {what}, got {tok!r}", line, col, source)
    value = int(tok)
    if value < 1:
        raise ParseError(f"{what} must be >= 1, got {value}", line, col, source)
    return value


def _finish(tokens: _Tokens, lenient: bool = False):
    if tokens.at_end():
        return
    if lenient:
        log.warning("%s: ignoring %d tokens after the last job", tokens.source or "<text>",
                    len(tokens.items) - tokens.pos)
        return
    raise tokens.error(f"trailing token {tokens.items[tokens.pos][0]!r} after last job")


def parse_fjssp(text: Union[RawInstanceText, str], instance_id: str = "", lenient: bool = False) -> Instance:
    """Parse the FJSSP format; ``lenient`` as for :func:`parse_fjsspw`."""
    if isinstance(text, str):
        text = RawInstanceText(text)
    header, line_no, rest = _split_header(text)
    src = text.source
    if len(header) not in (2, 3) and not (lenient and len(header) > 3):
        raise ParseError(f"FJSSP header needs 2 or 3 tokens, got {len(header)}", line_no, 1, src)
    n = _header_int(header[0], line_no, 1, src, "job count")
    m = _header_int(header[1], line_no, 2, src, "machine count")
    if len(header) == 3 and not _NUM_RE.match(header[2]):
        raise ParseError(f"malformed average-machines token {header[2]!r}", line_no, 3, src)

    tokens = _Tokens(rest, src, line_no + 1)
    jobs = []
    for _ in range(n):
        n_ops = tokens.next_int("operation count")
        if n_ops < 1:
            raise tokens.error("operation count must be >= 1", tokens.pos - 1)
        ops = []
        for _ in range(n_ops):
            n_opt = tokens.next_int("machine option count")
            if n_opt < 1:
                raise tokens.error("machine option count must be >= 1", tokens.pos - 1)
            options = []
            seen = set()
            for _ in range(n_opt):
                k = tokens.next_int("machine index")
                if not 1 <= k <= m:
                    raise tokens.error(f"machine index {k} outside [1, {m}]", tokens.pos - 1)
                if k in seen:
                    raise tokens.error(f"duplicate machine {k} within one operation", tokens.pos - 1)
                seen.add(k)
                d = tokens.next_int("duration")
                if d < 1:
                    raise tokens.error(f"duration must be >= 1, got {d}", tokens.pos - 1)
                options.append(MachineOption(k, d))
            ops.append(Operation(tuple(options)))
        jobs.append(Job(tuple(ops)))
    _finish(tokens, lenient)
    return Instance(tuple(jobs), m, instance_id)


def parse_fjsspw(text: Union[RawInstanceText, str], instance_id: str = "", lenient: bool = False,
                 machine_base: Optional[int] = None) -> WorkerInstance:
    """Parse the FJSSP-W format.

    Worker ids are always 0-based. Machine ids are 0-based unless the file
    uses id ``m`` and never id 0, which only a 1-based file can do; pass
    ``machine_base`` to force either reading.

    ``lenient=True`` tolerates extra header tokens and ignores tokens after
    the last job (with a warning).
    """
    if isinstance(text, str):
        text = RawInstanceText(text)
    header, line_no, rest = _split_header(text)
    src = text.source
    if len(header) != 3 and not (lenient and len(header) > 3):
        raise ParseError(f"FJSSP-W header needs 3 tokens, got {len(header)}", line_no, 1, src)
    n = _header_int(header[0], line_no, 1, src, "job count")
    m = _header_int(header[1], line_no, 2, src, "machine count")
    w = _header_int(header[2], line_no, 3, src, "worker count")

    if machine_base is None:
        machine_base = _infer_machine_base(rest, src, line_no, n, m)

    tokens = _Tokens(rest, src, line_no + 1)
    jobs = []
    for _ in range(n):
        n_ops = tokens.next_int("operation count")
        if n_ops < 1:
            raise tokens.error("operation count must be >= 1", tokens.pos - 1)
        ops = []
        for _ in range(n_ops):
            n_opt = tokens.next_int("machine option count")
            if n_opt < 1:
                raise tokens.error("machine option count must be >= 1", tokens.pos - 1)
            options = []
            seen_m = set()
            for _ in range(n_opt):
                k = tokens.next_int("machine id") - machine_base
                if not 0 <= k < m:
                    raise tokens.error(f"machine id {k + machine_base} outside the admissible range", tokens.pos - 1)
                if k in seen_m:
                    raise tokens.error(f"duplicate machine id {k + machine_base} within one operation", tokens.pos - 1)
                seen_m.add(k)
                n_workers = tokens.next_int("worker count")
                if n_workers < 1:
                    raise tokens.error(f"worker count must be >= 1, got {n_workers}", tokens.pos - 1)
                seen_w = set()
                workers = []
                for _ in range(n_workers):
                    s = tokens.next_int("worker id")
                    if not 0 <= s < w:
                        raise tokens.error(f"worker id {s} outside [0, {w})", tokens.pos - 1)
                    if s in seen_w:
                        raise tokens.error(f"duplicate worker id {s} within one machine option", tokens.pos - 1)
                    seen_w.add(s)
                    d = tokens.next_int("duration")
                    if d < 1:
                        raise tokens.error(f"duration must be >= 1, got {d}", tokens.pos - 1)
                    workers.append(WorkerOption(s + 1, d))
                options.append(MachineOption(k + 1, None, tuple(workers)))
            ops.append(Operation(tuple(options)))
        jobs.append(Job(tuple(ops)))
    _finish(tokens, lenient)
    return WorkerInstance(tuple(jobs), m, instance_id, w)


def _infer_machine_base(rest: list[str], src: str, line_no: int, n: int, m: int) -> int:
    tokens = _Tokens(rest, src, line_no + 1)
    machine_ids = []
    try:
        for _ in range(n):
            for _ in range(tokens.next_int("operation count")):
                for _ in range(tokens.next_int("machine option count")):
                    machine_ids.append(tokens.next_int("machine id"))
                    for _ in range(tokens.next_int("worker count")):
                        tokens.next_int("worker id")
                        tokens.next_int("duration")
    except ParseError:
        return 0
    if machine_ids and 0 not in machine_ids and m in machine_ids:
        return 1
    return 0


def detect_format(body: str, lenient: bool = False) -> str:
    """Guess ``"fjssp"`` or ``"fjssp-w"`` from the header and the job rows."""
    header = next((line.split() for line in body.splitlines() if line.strip()), [])
    if len(header) == 2:
        return "fjssp"
    if len(header) >= 3 and not _INT_RE.match(header[2]):
        return "fjssp"
    if len(header) == 3 or (lenient and len(header) > 3):
        try:
            parse_fjsspw(body, lenient=lenient)
            return "fjssp-w"
        except (ParseError, ModelError):
            return "fjssp"
    raise ParseError(f"cannot detect format from a header with {len(header)} tokens", 1, 1)


def parse_instance(text: Union[RawInstanceText, str], instance_id: str = "", lenient: bool = False) -> Instance:
    if isinstance(text, str):
        text = RawInstanceText(text)
    fmt = text.format
    if fmt == "auto":
        try:
            fmt = detect_format(text.body, lenient)
        except ParseError as exc:
            raise ParseError(exc.reason, exc.line, exc.token, text.source) from None
    if fmt == "fjssp":
        return parse_fjssp(text, instance_id, lenient)
    if fmt == "fjssp-w":
        return parse_fjsspw(text, instance_id, lenient=lenient)
    raise ValueError(f"unknown format {fmt!r}")


def read_instance(path: Union[str, Path], fmt: str = "auto", instance_id: Optional[str] = None,
                  lenient: bool = False) -> Instance:
    path = Path(path)
    raw = RawInstanceText(path.read_text(), str(path), fmt)
    return parse_instance(raw, path.stem if instance_id is None else instance_id, lenient)


def write_fjssp(instance: Instance) -> str:
    if instance.has_workers:
        raise ValueError("write_fjssp needs a plain FJSSP instance; use write_fjsspw")
    lines = [f"{instance.n} {instance.m}"]
    for job in instance.jobs:
        row = [len(job.operations)]
        for op in job.operations:
            row.append(len(op.machine_options))
            for mo in op.machine_options:
                row.extend((mo.machine, mo.duration))
        lines.append(" ".join(map(str, row)))
    return "\n".join(lines) + "\n"


def write_fjsspw(instance: WorkerInstance) -> str:
    if not instance.has_workers:
        raise ValueError("write_fjsspw needs a WorkerInstance; use write_fjssp")
    lines = [f"{instance.n} {instance.m} {instance.workers}"]
    for job in instance.jobs:
        row = [len(job.operations)]
        for op in job.operations:
            row.append(len(op.machine_options))
            for mo in op.machine_options:
                row.extend((mo.machine - 1, len(mo.worker_options)))
                for wo in mo.worker_options:
                    row.extend((wo.worker - 1, wo.duration))
        lines.append(" ".join(map(str, row)))
    return "\n".join(lines) + "\n"


def write_instance(instance: Instance) -> str:
    return write_fjsspw(instance) if instance.has_workers else write_fjssp(instance)


# ---------------------------------------------------------------- catalog

@dataclass(frozen=True)
class CatalogEntry:
    id: str
    source: str
    instance: Instance
    characteristics: Characteristics
    path: str = ""


@dataclass
class Catalog:
    entries: list[CatalogEntry] = field(default_factory=list)
    diagnostics: list[ParseError] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CatalogEntry]:
        return iter(self.entries)

    def get(self, ident: str) -> CatalogEntry:
        for entry in self.entries:
            if entry.id == ident:
                return entry
        raise KeyError(ident)

    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def rows(self) -> list[tuple[str, str, Characteristics]]:
        return [(e.id, e.source, e.characteristics) for e in self.entries]


def _load_one(root: Path, path: Path, fmt: str, lenient: bool, omega_mode: str):
    rel = path.relative_to(root)
    source = rel.parts[0] if len(rel.parts) > 1 else ""
    ident = rel.with_suffix("").as_posix()
    try:
        inst = parse_instance(RawInstanceText(path.read_text(errors="replace"), str(path), fmt), ident, lenient)
    except ParseError as exc:
        return exc
    except ModelError as exc:
        return ParseError(str(exc), 0, 0, str(path))
    return CatalogEntry(ident, source, inst, compute_characteristics(inst, omega_mode), str(path))


def load_catalog(root: Union[str, Path], fmt: str = "auto", lenient: bool = False, jobs: int = 1,
                 omega_mode: str = "pairs", report=sys.stderr) -> Catalog:
    """Parse every file below ``root``; the first directory level names the source.

    Unparseable files are collected in ``Catalog.diagnostics`` and printed to
    ``report`` as ``file:line:token: reason``.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"catalog directory {root} does not exist")
    paths = sorted(p for p in root.rglob("*") if p.is_file() and not p.name.startswith("."))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(lambda p: _load_one(root, p, fmt, lenient, omega_mode), paths))
    else:
        results = [_load_one(root, p, fmt, lenient, omega_mode) for p in paths]
    catalog = Catalog()
    for result in results:
        if isinstance(result, ParseError):
            catalog.diagnostics.append(result)
            if report is not None:
                print(str(result), file=report)
        else:
            catalog.entries.append(result)
    return catalog


CSV_COLUMNS = ("id", "source", "n", "m", "w", "N", "ops_per_job", "T_min", "T_max", "duration_span",
               "T_mean", "T_std", "beta", "dv")


def characteristics_row(ident: str, source: str, chars: Characteristics) -> list[str]:
    def f(x):
        return f"{x:.6f}"
    return [ident, source, str(chars.n), str(chars.m), str(chars.w), str(chars.N), f(chars.ops_per_job),
            str(chars.t_min), str(chars.t_max), str(chars.duration_span), f(chars.t_mean), f(chars.t_std),
            f(chars.beta), f(chars.dv)]


def write_characteristics_csv(rows, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for ident, source, chars in rows:
        writer.writerow(characteristics_row(ident, source, chars))


def source_summary(catalog: Catalog) -> dict[str, dict[str, float]]:
    """Per-source means of instance count, n, N, N/n, m, beta and dv."""
    groups: dict[str, list[Characteristics]] = {}
    for entry in catalog:
        groups.setdefault(entry.source, []).append(entry.characteristics)
    summary = {}
    for source, chars in sorted(groups.items()):
        k = len(chars)
        summary[source] = {
            "count": k,
            "n": sum(c.n for c in chars) / k,
            "N": sum(c.N for c in chars) / k,
            "ops_per_job": sum(c.ops_per_job for c in chars) / k,
            "m": sum(c.m for c in chars) / k,
            "beta": sum(c.beta for c in chars) / k,
            "dv": sum(c.dv for c in chars) / k,
        }
    return summary

"""Big-M MILP model in LP text format, plus a parser and a substitution checker.

Variables (1-based indices, ``ip``/``jp`` denote the second operation of a pair):

* ``Y_i_j_k`` (FJSSP) or ``Y_i_j_k_s`` (FJSSP-W): mode selection, binary
* ``X_i_j_ip_jp``: 1 if O_ij runs after O_ipjp on their common machine, binary
* ``U_i_j_ip_jp``: 1 if O_ij runs after O_ipjp for their common worker, binary
* ``C_i_j``: completion time, continuous >= 0
* ``Cmax``: makespan

Disjunctive pairs are generated for operations of different jobs only
(``ip > i``); operations of one job are ordered by the job chain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..model import Instance
from ..schedule import Schedule


@dataclass
class Constraint:
    name: str
    terms: list[tuple[int, str]]  # (coefficient, variable)
    sense: str  # ">=", "<=", "="
    rhs: int

    def lhs(self, values: dict) -> float:
        return sum(c * values.get(v, 0) for c, v in self.terms)

    def satisfied(self, values: dict, tol: float = 1e-6) -> bool:
        lhs = self.lhs(values)
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        return abs(lhs - self.rhs) <= tol


@dataclass
class MilpModel:
    name: str
    objective: list[tuple[int, str]]
    constraints: list[Constraint] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)
    continuous: list[str] = field(default_factory=list)
    big_m: int = 0

    def variables(self) -> list[str]:
        return self.continuous + self.binaries

    def count(self, prefix: str) -> int:
        return sum(1 for v in self.variables() if v.split("_")[0] == prefix)

    def to_lp(self) -> str:
        out = [f"\\ {self.name}", f"\\ big-M L = {self.big_m}", "Minimize", " obj: " + _terms(self.objective),
               "Subject To"]
        for con in self.constraints:
            out.append(f" {con.name}: {_terms(con.terms)} {con.sense} {con.rhs}")
        out.append("Bounds")
        for v in self.continuous:
            out.append(f" {v} >= 0")
        out.append("Binaries")
        for q in range(0, len(self.binaries), 8):
            out.append(" " + " ".join(self.binaries[q:q + 8]))
        out.append("End")
        return "\n".join(out) + "\n"


def _terms(terms: list[tuple[int, str]], per_line: int = 8) -> str:
    chunks = []
    for q, (c, v) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        piece = f"{sign} {v}" if mag == 1 else f"{sign} {mag} {v}"
        if q == 0 and c > 0:
            piece = piece[2:]
        if q and q % per_line == 0:
            piece = "\n   " + piece
        chunks.append(piece)
    return " ".join(chunks)


def _ops(instance: Instance):
    """(i, j, flat index, {machine: {worker: duration}}) for every operation."""
    ops = []
    for p, modes in enumerate(instance.op_modes):
        table: dict = {}
        for k, s, d in modes:
            table.setdefault(k, {})[s] = d
        ops.append((instance.op_job[p], p - instance.op_offsets[instance.op_job[p] - 1] + 1, p, table))
    return ops


def export_milp(instance: Instance) -> MilpModel:
    workers = instance.has_workers
    ops = _ops(instance)
    big_m = sum(max(d for _, _, d in modes) for modes in instance.op_modes)

    def y(i, j, k, s):
        return f"Y_{i}_{j}_{k}_{s}" if workers else f"Y_{i}_{j}_{k}"

    def c(i, j):
        return f"C_{i}_{j}"

    model = MilpModel(instance.id or "fjssp", [(1, "Cmax")], big_m=big_m)
    model.continuous = [c(i, j) for i, j, _, _ in ops] + ["Cmax"]
    for i, j, _, table in ops:
        for k in sorted(table):
            for s in sorted(table[k], key=lambda v: v or 0):
                model.binaries.append(y(i, j, k, s))

    def duration_terms(i, j, table):
        return [(-table[k][s], y(i, j, k, s)) for k in sorted(table) for s in sorted(table[k], key=lambda v: v or 0)]

    cons = model.constraints
    for i, j, _, table in ops:
        cons.append(Constraint(f"assign_{i}_{j}", [(1, y(i, j, k, s)) for k in sorted(table)
                                                   for s in sorted(table[k], key=lambda v: v or 0)], "=", 1))
    for i, j, _, table in ops:
        terms = [(1, c(i, j))]
        if j > 1:
            terms.append((-1, c(i, j - 1)))
        cons.append(Constraint(f"job_{i}_{j}", terms + duration_terms(i, j, table), ">=", 0))

    L = big_m
    for a_idx, (i, j, _, ta) in enumerate(ops):
        for ip, jp, _, tb in ops[a_idx + 1:]:
            if ip <= i:
                continue
            shared = sorted(set(ta) & set(tb))
            x = f"X_{i}_{j}_{ip}_{jp}"
            if shared:
                model.binaries.append(x)
            for k in shared:
                for s in sorted(ta[k], key=lambda v: v or 0):
                    for sp in sorted(tb[k], key=lambda v: v or 0):
                        ya, yb = y(i, j, k, s), y(ip, jp, k, sp)
                        tag = f"{i}_{j}_{ip}_{jp}_{k}" + (f"_{s}_{sp}" if workers else "")
                        cons.append(Constraint(f"mach_a_{tag}", [(1, c(i, j)), (-1, c(ip, jp)), (-L, x), (-L, ya),
                                                                 (-L, yb)], ">=", ta[k][s] - 3 * L))
                        cons.append(Constraint(f"mach_b_{tag}", [(1, c(ip, jp)), (-1, c(i, j)), (L, x), (-L, ya),
                                                                 (-L, yb)], ">=", tb[k][sp] - 2 * L))
            if not workers:
                continue
            u = f"U_{i}_{j}_{ip}_{jp}"
            worker_pairs = [(k, kp, s) for k in sorted(ta) for kp in sorted(tb)
                            for s in sorted(set(ta[k]) & set(tb[kp]))]
            if worker_pairs:
                model.binaries.append(u)
            for k, kp, s in worker_pairs:
                ya, yb = y(i, j, k, s), y(ip, jp, kp, s)
                tag = f"{i}_{j}_{ip}_{jp}_{k}_{kp}_{s}"
                cons.append(Constraint(f"work_a_{tag}", [(1, c(i, j)), (-1, c(ip, jp)), (-L, u), (-L, ya),
                                                         (-L, yb)], ">=", ta[k][s] - 3 * L))
                cons.append(Constraint(f"work_b_{tag}", [(1, c(ip, jp)), (-1, c(i, j)), (L, u), (-L, ya),
                                                         (-L, yb)], ">=", tb[kp][s] - 2 * L))
    for i, size in enumerate(instance.job_sizes, start=1):
        cons.append(Constraint(f"mk_{i}", [(1, "Cmax"), (-1, c(i, size))], ">=", 0))
    return model


def export_milp_text(instance: Instance) -> str:
    return export_milp(instance).to_lp()


# ---------------------------------------------------------------- LP parsing

_SECTION = {"minimize": "obj", "maximize": "obj", "subject to": "st", "such that": "st", "st": "st",
            "s.t.": "st", "bounds": "bounds", "binaries": "bin", "binary": "bin", "end": "end"}


def parse_lp(text: str) -> MilpModel:
    """Parse the LP subset written by :meth:`MilpModel.to_lp`."""
    sections: dict[str, list[str]] = {"obj": [], "st": [], "bounds": [], "bin": []}
    current = None
    name = ""
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("\\"):
            if not name:
                name = line[1:].strip()
            continue
        key = _SECTION.get(line.lower())
        if key:
            current = key
            continue
        if line and current in sections:
            sections[current].append(line)
    model = MilpModel(name, [])
    obj_tokens = " ".join(sections["obj"]).split()
    if obj_tokens and obj_tokens[0].endswith(":"):
        obj_tokens = obj_tokens[1:]
    model.objective, _ = _read_terms(obj_tokens, 0)
    tokens = " ".join(sections["st"]).split()
    pos = 0
    while pos < len(tokens):
        label = tokens[pos]
        if not label.endswith(":"):
            raise ValueError(f"expected constraint name, got {label!r}")
        terms, pos = _read_terms(tokens, pos + 1)
        sense = tokens[pos]
        rhs = float(tokens[pos + 1])
        model.constraints.append(Constraint(label[:-1], terms, "=" if sense == "=" else sense,
                                            int(rhs) if rhs.is_integer() else rhs))
        pos += 2
    for line in sections["bounds"]:
        model.continuous.append(line.split()[0])
    for line in sections["bin"]:
        model.binaries.extend(line.split())
    return model


def _read_terms(tokens: list[str], pos: int) -> tuple[list, int]:
    terms = []
    sign = 1
    coef = None
    while pos < len(tokens) and tokens[pos] not in (">=", "<=", "=", "=>", "=<"):
        tok = tokens[pos]
        if tok in "+-":
            sign = -1 if tok == "-" else 1
        elif re.fullmatch(r"[0-9.eE+-]+", tok):
            coef = float(tok)
        else:
            value = sign * (coef if coef is not None else 1)
            terms.append((int(value) if float(value).is_integer() else value, tok))
            sign, coef = 1, None
        pos += 1
    return terms, pos


# ---------------------------------------------------------------- substitution

def schedule_assignment(model: MilpModel, instance: Instance, schedule: Schedule) -> dict[str, float]:
    """Variable values representing ``schedule``; ordering binaries follow start times."""
    values = {v: 0 for v in model.variables()}
    for p in range(instance.num_operations):
        i = instance.op_job[p]
        j = p - instance.op_offsets[i - 1] + 1
        values[f"C_{i}_{j}"] = schedule.end[p]
        k, s = schedule.machine[p], schedule.worker[p]
        values[f"Y_{i}_{j}_{k}_{s}" if s is not None else f"Y_{i}_{j}_{k}"] = 1
    values["Cmax"] = schedule.makespan
    for v in model.binaries:
        head, *idx = v.split("_")
        if head in ("X", "U"):
            i, j, ip, jp = map(int, idx)
            a = instance.flat_index(i, j)
            b = instance.flat_index(ip, jp)
            values[v] = 1 if schedule.start[a] >= schedule.end[b] else 0
    return values


def check_assignment(model: MilpModel, values: dict, tol: float = 1e-6) -> list[str]:
    """Names of violated constraints and bound/integrality breaches."""
    bad = [con.name for con in model.constraints if not con.satisfied(values, tol)]
    for v in model.binaries:
        if values.get(v, 0) not in (0, 1):
            bad.append(f"binary {v}")
    for v in model.continuous:
        if values.get(v, 0) < -tol:
            bad.append(f"bound {v}")
    return bad


def check_schedule(model: MilpModel, instance: Instance, schedule: Schedule) -> list[str]:
    return check_assignment(model, schedule_assignment(model, instance, schedule))

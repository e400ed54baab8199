#!/usr/bin/env python3
"""Solver adapter for gleeok-milp backed by scipy's HiGHS interface.

    scipy_adapter.py optimize  model.lp solutions.txt
    scipy_adapter.py enumerate model.lp solutions.txt CAP

Exit status: 0 solved, 2 infeasible, 1 error. Enumeration adds a no-good
cut over the binary variables after each solution, so it only lists
solutions that differ in some binary variable.
"""

import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

SECTIONS = {
    "minimize": "obj",
    "subject to": "rows",
    "bounds": "bounds",
    "binary": "bin",
    "binaries": "bin",
    "generals": "gen",
    "end": "end",
}


def parse_terms(text):
    tokens = re.findall(r"[+-]|[^\s+-]+", text)
    terms, sign, coeff = [], 1, None
    for tok in tokens:
        if tok in "+-":
            sign = -1 if tok == "-" else 1
        elif re.fullmatch(r"\d+(\.\d*)?", tok):
            coeff = float(tok)
        else:
            terms.append((sign * (1.0 if coeff is None else coeff), tok))
            sign, coeff = 1, None
    return terms


def read_lp(path):
    section, logical = None, []
    for raw in open(path):
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line.lower() in SECTIONS:
            section = SECTIONS[line.lower()]
            continue
        if raw.startswith("   ") and logical and logical[-1][0] == section:
            logical[-1][1] += " " + line
        else:
            logical.append([section, line])
    names, index = [], {}

    def var(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    objective, rows, bounds, integers = [], [], {}, set()
    for section, line in logical:
        if section == "obj":
            objective = parse_terms(line.split(":", 1)[1])
        elif section == "rows":
            body = line.split(":", 1)[1]
            lhs, op, rhs = re.split(r"(>=|<=|=)", body)
            rows.append((parse_terms(lhs), op, float(rhs)))
        elif section == "bounds":
            parts = re.split(r"\s*(<=|=)\s*", line)
            if len(parts) == 5:
                bounds[parts[2]] = (float(parts[0]), float(parts[4]))
            elif parts[1] == "=":
                bounds[parts[0]] = (float(parts[2]),) * 2
            else:
                bounds[parts[0]] = (0.0, float(parts[2]))
        elif section in ("bin", "gen"):
            for name in line.split():
                integers.add(name)
                if section == "bin":
                    bounds[name] = (0.0, 1.0)
    for terms, _, _ in rows:
        for _, v in terms:
            var(v)
    for _, v in objective:
        var(v)
    for v in bounds:
        var(v)
    return names, index, objective, rows, bounds, integers


def build(names, index, objective, rows, bounds):
    n = len(names)
    c = np.zeros(n)
    for coef, v in objective:
        c[index[v]] += coef
    a = np.zeros((len(rows), n))
    lo, hi = np.full(len(rows), -np.inf), np.full(len(rows), np.inf)
    for k, (terms, op, rhs) in enumerate(rows):
        for coef, v in terms:
            a[k, index[v]] += coef
        if op in (">=", "="):
            lo[k] = rhs
        if op in ("<=", "="):
            hi[k] = rhs
    lb = np.array([bounds.get(v, (0.0, np.inf))[0] for v in names])
    ub = np.array([bounds.get(v, (0.0, np.inf))[1] for v in names])
    return c, a, lo, hi, lb, ub


def solve(c, a, lo, hi, lb, ub):
    constraints = [LinearConstraint(a, lo, hi)] if len(lo) else []
    res = milp(c, constraints=constraints, integrality=np.ones(len(c)), bounds=Bounds(lb, ub))
    if res.status == 2:
        return None
    if res.x is None:
        raise RuntimeError(res.message)
    return np.round(res.x).astype(int)


def main(argv):
    if len(argv) < 4 or argv[1] not in ("optimize", "enumerate"):
        print(__doc__, file=sys.stderr)
        return 1
    mode, lp, out = argv[1], argv[2], argv[3]
    cap = int(argv[4]) if mode == "enumerate" and len(argv) > 4 else 1
    names, index, objective, rows, bounds, _ = read_lp(lp)
    c, a, lo, hi, lb, ub = build(names, index, objective, rows, bounds)
    binaries = [i for i, v in enumerate(names) if bounds.get(v) == (0.0, 1.0)]
    found, truncated = [], False
    while True:
        x = solve(c, a, lo, hi, lb, ub)
        if x is None:
            break
        if len(found) == cap:
            truncated = True
            break
        found.append(x)
        if mode == "optimize":
            break
        row = np.zeros(len(names))
        ones = 0
        for i in binaries:
            row[i] = -1.0 if x[i] == 1 else 1.0
            ones += x[i]
        a = np.vstack([a, row])
        lo = np.append(lo, 1 - ones)
        hi = np.append(hi, np.inf)
    if not found and mode == "optimize":
        return 2
    with open(out, "w") as f:
        if truncated:
            f.write("# truncated\n")
        for k, x in enumerate(found):
            if k:
                f.write("\n")
            for name, value in zip(names, x):
                f.write(f"{name} {value}\n")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main(sys.argv))
    except Exception as e:  # noqa: BLE001
        print(e, file=sys.stderr)
        sys.exit(1)

#!/usr/bin/env python3
"""Solve an exported LP model with scipy and print the optimal objective.

Reads the deterministic LP subset written by the exporter (named rows with
+/- unit or integer/decimal coefficients, a Bounds section with box or
fixed bounds, and a Binaries section), builds the matrices for
scipy.optimize.milp (HiGHS) and prints one line:

    optimal <objective>
    infeasible

Exit status 0 on either verdict, 1 on parse or solver errors.  Used by the
documented cross-check that compares the external solver's minimum vehicle
count against the in-repo exhaustive search.
"""

import sys
import re

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, Bounds, milp


TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?)?\s*([A-Za-z]\w*)")


def parse_terms(expr):
    """[(coef, var)] from a linear expression like 'a_0_0 - a_1_0 + 400.0 x_0_1_0_0'."""
    out = []
    for sign, coef, var in TERM.findall(expr):
        value = float(coef) if coef else 1.0
        if sign == "-":
            value = -value
        out.append((value, var))
    return out


def parse_lp(text):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("\\")]
    section = None
    objective = []
    rows = []           # (terms, op, rhs)
    bounds = []         # (var, lo, hi)
    binaries = set()
    for ln in lines:
        low = ln.lower()
        if low == "minimize":
            section = "obj"
            continue
        if low == "subject to":
            section = "rows"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low == "binaries":
            section = "bin"
            continue
        if low == "end":
            break
        if section == "obj":
            expr = ln.split(":", 1)[1] if ":" in ln else ln
            objective.extend(parse_terms(expr))
        elif section == "rows":
            name, body = ln.split(":", 1)
            m = re.search(r"(<=|>=|=)", body)
            if not m:
                raise ValueError(f"row without relation: {name}")
            op = m.group(1)
            lhs, rhs = body.split(op, 1)
            rows.append((parse_terms(lhs), op, float(rhs)))
        elif section == "bounds":
            if "<=" in ln:
                lo, var, hi = re.match(r"(\S+)\s*<=\s*(\S+)\s*<=\s*(\S+)", ln).groups()
                bounds.append((var, float(lo), float(hi)))
            else:
                var, value = re.match(r"(\S+)\s*=\s*(\S+)", ln).groups()
                bounds.append((var, float(value), float(value)))
        elif section == "bin":
            binaries.update(ln.split())
    return objective, rows, bounds, binaries


def solve(text):
    objective, rows, bounds, binaries = parse_lp(text)
    names = {}

    def var(name):
        if name not in names:
            names[name] = len(names)
        return names[name]

    for _, v in objective:
        var(v)
    for terms, _, _ in rows:
        for _, v in terms:
            var(v)
    for v, _, _ in bounds:
        var(v)
    for v in sorted(binaries):
        var(v)

    nvar = len(names)
    c = np.zeros(nvar)
    for coef, v in objective:
        c[var(v)] += coef

    data, ri, ci, lo, hi = [], [], [], [], []
    for r, (terms, op, rhs) in enumerate(rows):
        for coef, v in terms:
            data.append(coef)
            ri.append(r)
            ci.append(var(v))
        lo.append(rhs if op in ("=", ">=") else -np.inf)
        hi.append(rhs if op in ("=", "<=") else np.inf)
    a = sparse.csc_matrix((data, (ri, ci)), shape=(len(rows), nvar))

    lb = np.zeros(nvar)
    ub = np.full(nvar, np.inf)
    for v in binaries:
        ub[var(v)] = 1.0
    for v, vlo, vhi in bounds:
        lb[var(v)] = vlo
        ub[var(v)] = vhi
    integrality = np.zeros(nvar)
    for v in binaries:
        integrality[var(v)] = 1

    # HiGHS presolve (as vendored by scipy) mis-proves a too-high dual bound
    # on these big-M sequencing models; the models are tiny, so solving
    # without presolve is both exact and fast.
    res = milp(
        c=c,
        constraints=LinearConstraint(a, lo, hi),
        bounds=Bounds(lb, ub),
        integrality=integrality,
        options={"presolve": False},
    )
    if res.status == 2:
        return "infeasible"
    if not res.success:
        raise RuntimeError(f"solver: {res.message}")
    return f"optimal {res.fun:.6f}"


def main():
    if len(sys.argv) != 2:
        print("usage: milp_check.py MODEL.lp", file=sys.stderr)
        return 1
    with open(sys.argv[1]) as fh:
        text = fh.read()
    try:
        print(solve(text))
    except Exception as exc:  # parse or solver failure
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

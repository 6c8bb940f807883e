#!/usr/bin/env python3
"""Solve an SDPA sparse (.dat-s) problem with cvxpy and write the result in
the CSDP solution layout (first line: the vector x).

Usage: sdpa_solve.py INPUT.dat-s OUTPUT.sol
"""
import sys

import cvxpy as cp
import numpy as np
import scipy.sparse as sp


def read_sdpa(path):
    with open(path) as fh:
        lines = [l.strip() for l in fh]
    lines = [l for l in lines if l and l[0] not in '"*']
    tok = lambda l: l.replace(",", " ").replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ").split()
    m = int(tok(lines[0])[0])
    nb = int(tok(lines[1])[0])
    blocks = [int(t) for t in tok(lines[2])[:nb]]
    c = np.array([float(t) for t in tok(lines[3])[:m]])
    entries = [tok(l) for l in lines[4:]]
    return m, blocks, c, entries


def main():
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    m, blocks, c, entries = read_sdpa(sys.argv[1])
    rows = [[[], [], []] for _ in blocks]
    f0 = [np.zeros(abs(s) * abs(s)) for s in blocks]
    for e in entries:
        k, b, i, j, v = int(e[0]), int(e[1]) - 1, int(e[2]) - 1, int(e[3]) - 1, float(e[4])
        s = abs(blocks[b])
        cells = {(i, j), (j, i)}
        for (r, q) in cells:
            if k == 0:
                f0[b][r * s + q] += v
            else:
                rows[b][0].append(r * s + q)
                rows[b][1].append(k - 1)
                rows[b][2].append(v)
    x = cp.Variable(m)
    cons = []
    for b, s in enumerate(blocks):
        n = abs(s)
        a = sp.csr_matrix((rows[b][2], (rows[b][0], rows[b][1])), shape=(n * n, m))
        if s < 0:
            diag = [r * n + r for r in range(n)]
            cons.append(a[diag] @ x >= f0[b][diag])
        else:
            z = cp.Variable((n, n), symmetric=True)
            cons.append(z >> 0)
            cons.append(cp.vec(z, order="C") == a @ x - f0[b])
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    if x.value is None:
        sys.exit(f"solver status: {prob.status}")
    with open(sys.argv[2], "w") as out:
        out.write(" ".join(repr(float(v)) for v in x.value) + "\n")
    print(f"status {prob.status} objective {prob.value!r}", file=sys.stderr)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Interior-point solver for problems in the sparse SDPA interchange format.

Usage: solve_sdpa.py problem.dat-s [problem.sol]

Solves, in csdp's notation,
    (P) max tr(C X)   s.t. tr(A_i X) = a_i,  X psd
    (D) min a^T y     s.t. sum_i y_i A_i - C = Z psd
where the file supplies C (matrix 0), the A_i and the vector a.  Prints a
csdp-style summary on stdout and, when a second argument is given, writes a
csdp-style solution file: the y vector on the first line, then entries
"1 blk i j v" for Z and "2 blk i j v" for X.

Backed by cvxopt's conelp.  Runs single threaded for reproducibility.
"""

import os
import sys

os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")

from cvxopt import matrix, solvers, sparse, spmatrix  # noqa: E402


def parse_sdpa(path):
    lines = []
    with open(path) as fh:
        for line in fh:
            if line.startswith(("*", '"')):
                continue
            line = line.replace(",", " ").replace("(", " ").replace(")", " ").replace("{", " ")
            line = line.replace("}", " ")
            if line.strip():
                lines.append(line.split())

    m = int(lines[0][0])
    nblocks = int(lines[1][0])
    sizes = [int(t) for t in lines[2][:nblocks]]
    rhs = [float(t) for t in lines[3][:m]]
    entries = []
    for toks in lines[4:]:
        if len(toks) < 5:
            continue
        entries.append((int(toks[0]), int(toks[1]), int(toks[2]), int(toks[3]), float(toks[4])))
    return m, sizes, rhs, entries


def build_cone_problem(m, sizes, rhs, entries):
    lin_slots = []  # (block, slot) pairs of the diagonal blocks, in order
    psd_blocks = [b for b, s in enumerate(sizes, start=1) if s > 0]
    slot_of = {}
    for b, s in enumerate(sizes, start=1):
        if s < 0:
            for i in range(1, -s + 1):
                slot_of[(b, i)] = len(lin_slots)
                lin_slots.append((b, i))
    psd_index = {b: k for k, b in enumerate(psd_blocks)}

    nl = len(lin_slots)
    # cvxopt form: minimize c'y subject to s = h - G y in the cone, so
    # s equals Z when h = -vec(C) and G[:, i] = -vec(A_i).
    Gl_I, Gl_J, Gl_V = [], [], []
    hl = [0.0] * nl
    nk = len(psd_blocks)
    Gs_I = [[] for _ in range(nk)]
    Gs_J = [[] for _ in range(nk)]
    Gs_V = [[] for _ in range(nk)]
    hs_cells = [{} for _ in range(nk)]

    for matno, b, i, j, v in entries:
        if sizes[b - 1] < 0:
            if i != j:
                raise ValueError("off-diagonal entry in a diagonal block")
            r = slot_of[(b, i)]
            if matno == 0:
                hl[r] += -v
            else:
                Gl_I.append(r)
                Gl_J.append(matno - 1)
                Gl_V.append(-v)
        else:
            k = psd_index[b]
            n = sizes[b - 1]
            cells = [(i - 1) * n + (j - 1)]
            if i != j:
                cells.append((j - 1) * n + (i - 1))
            for cell in cells:
                if matno == 0:
                    hs_cells[k][cell] = hs_cells[k].get(cell, 0.0) - v
                else:
                    Gs_I[k].append(cell)
                    Gs_J[k].append(matno - 1)
                    Gs_V[k].append(-v)

    G_parts = [spmatrix(Gl_V, Gl_I, Gl_J, (nl, m))]
    h_parts = [matrix(hl, (nl, 1)) if nl else matrix(0.0, (0, 1))]
    for k, b in enumerate(psd_blocks):
        n = sizes[b - 1]
        G_parts.append(spmatrix(Gs_V[k], Gs_I[k], Gs_J[k], (n * n, m)))
        h = [0.0] * (n * n)
        for cell, v in hs_cells[k].items():
            h[cell] = v
        h_parts.append(matrix(h, (n * n, 1)))

    G = sparse(G_parts)
    h = matrix([h_parts[i][j] for i in range(len(h_parts)) for j in range(h_parts[i].size[0])],
               (G.size[0], 1))
    dims = {"l": nl, "q": [], "s": [sizes[b - 1] for b in psd_blocks]}
    return matrix(rhs), G, h, dims, lin_slots, psd_blocks


def main():
    if len(sys.argv) < 2:
        print("usage: solve_sdpa.py problem.dat-s [problem.sol]", file=sys.stderr)
        return 2
    m, sizes, rhs, entries = parse_sdpa(sys.argv[1])
    c, G, h, dims, lin_slots, psd_blocks = build_cone_problem(m, sizes, rhs, entries)

    solvers.options["show_progress"] = False
    solvers.options["maxiters"] = 200
    solvers.options["refinement"] = 2
    sol = None
    for abstol, reltol, feastol in ((1e-10, 1e-10, 1e-9), (1e-8, 1e-8, 1e-8)):
        solvers.options["abstol"] = abstol
        solvers.options["reltol"] = reltol
        solvers.options["feastol"] = feastol
        try:
            sol = solvers.conelp(c, G, h, dims)
        except (ValueError, ArithmeticError) as exc:
            print("Failure: conelp raised %s" % exc)
            return 1
        if sol["status"] == "optimal":
            break

    y = sol["x"]
    if y is None:
        print("Failure: SDP could not be solved (status: %s)" % sol["status"])
        return 1

    dual_obj = sum(c[i] * y[i] for i in range(m))
    if sol["status"] == "optimal":
        print("Success: SDP solved")
    else:
        print("Partial success: status %s" % sol["status"])
    print("Primal objective value: %.10e" % dual_obj)
    print("Dual objective value: %.10e" % dual_obj)
    print("Relative primal infeasibility: %.2e" % (sol["primal infeasibility"] or 0.0))
    print("Relative dual infeasibility: %.2e" % (sol["dual infeasibility"] or 0.0))
    print("XZ Relative Gap: %.3e" % (sol["relative gap"] if sol["relative gap"] is not None else 0.0))

    if len(sys.argv) >= 3:
        s_vec = sol["s"]  # = Z stacked
        z_vec = sol["z"]  # = X stacked (multipliers)
        nl = dims["l"]
        with open(sys.argv[2], "w") as out:
            out.write(" ".join("%.16e" % y[i] for i in range(m)) + "\n")
            for r, (b, i) in enumerate(lin_slots):
                out.write("1 %d %d %d %.16e\n" % (b, i, i, s_vec[r]))
                out.write("2 %d %d %d %.16e\n" % (b, i, i, z_vec[r]))
            off = nl
            for b in psd_blocks:
                n = sizes[b - 1]
                for i in range(n):
                    for j in range(i, n):
                        out.write("1 %d %d %d %.16e\n" % (b, i + 1, j + 1, s_vec[off + i * n + j]))
                        out.write("2 %d %d %d %.16e\n" % (b, i + 1, j + 1, z_vec[off + i * n + j]))
                off += n * n

    return 0 if sol["status"] == "optimal" else 1


if __name__ == "__main__":
    sys.exit(main())

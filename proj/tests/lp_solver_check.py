# Copyright 2026 The fpgatris Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Solves emitted LP files with an external MILP solver (scipy / HiGHS) and
compares the optimum against the exact search on tiny random instances.

Usage: lp_solver_check.py <fpgatris-cli> <workdir>
Exit 77 when scipy is unavailable so ctest reports a skip.
"""

import os
import random
import re
import subprocess
import sys

try:
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix
except ImportError:
    print("scipy not available; skipping")
    sys.exit(77)

SENSES = {"<=", ">=", "="}


def parse_terms(tokens):
    """[sign] [coef] name ... -> list of (coef, name)."""
    out = []
    sign, coef = 1, None
    for tok in tokens:
        if tok in "+-":
            sign = -1 if tok == "-" else 1
        elif re.fullmatch(r"\d+", tok):
            coef = int(tok)
        else:
            out.append((sign * (1 if coef is None else coef), tok))
            sign, coef = 1, None
    return out


def parse_lp(text):
    section = None
    objective = []
    rows = []  # (name, terms, sense, rhs)
    binaries = []
    pending = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Minimize", "Subject To", "Binary", "End"):
            section = line
            continue
        tokens = line.split()
        if section == "Minimize":
            if tokens[0].endswith(":"):
                tokens = tokens[1:]
            objective += parse_terms(tokens)
        elif section == "Subject To":
            if tokens[0].endswith(":"):
                pending = [tokens[0][:-1], []]
                tokens = tokens[1:]
            pending[1] += tokens
            if len(pending[1]) >= 2 and pending[1][-2] in SENSES:
                body = pending[1]
                rows.append((pending[0], parse_terms(body[:-2]), body[-2], int(body[-1])))
                pending = None
        elif section == "Binary":
            binaries += tokens
    return objective, rows, binaries


def solve(text):
    objective, rows, binaries = parse_lp(text)
    index = {name: k for k, name in enumerate(binaries)}
    n = len(binaries)
    c = np.zeros(n)
    for coef, name in objective:
        c[index[name]] += coef
    r, col, val, lo, hi = [], [], [], [], []
    for k, (_, terms, sense, rhs) in enumerate(rows):
        for coef, name in terms:
            r.append(k)
            col.append(index[name])
            val.append(coef)
        lo.append(rhs if sense in (">=", "=") else -np.inf)
        hi.append(rhs if sense in ("<=", "=") else np.inf)
    a = coo_matrix((val, (r, col)), shape=(len(rows), n)).tocsr()
    res = milp(c, constraints=LinearConstraint(a, lo, hi), integrality=np.ones(n),
               bounds=Bounds(0, 1))
    if res.status != 0:
        return None, None
    return round(res.fun), {binaries[k]: round(v) for k, v in enumerate(res.x)}


def run(cli, *args):
    p = subprocess.run([cli, *args], capture_output=True, text=True)
    return p.returncode, p.stdout


def random_instance(rng):
    width = rng.randint(2, 4)
    modules = []
    for _ in range(rng.randint(1, 3)):
        while True:
            sizes = [rng.choice([-1, 1]) * rng.randint(1, min(3, width))
                     for _ in range(rng.randint(1, 2))]
            lo = max([1] + [-s for s in sizes if s < 0])
            hi = min([width] + [width - s + 1 for s in sizes if s > 0])
            if lo <= hi:
                break
        modules.append(sizes)
    lines = ["fpgatris 1", f"N {width} M {len(modules)}"]
    lines += [f"module {i + 1} {len(m)} " + " ".join(map(str, m))
              for i, m in enumerate(modules)]
    return "\n".join(lines) + "\n"


def main():
    cli, workdir = sys.argv[1], sys.argv[2]
    os.makedirs(workdir, exist_ok=True)
    rng = random.Random(12345)
    failures = 0
    checked = 0
    # Two fixed instances first: one where delays pay off, one at its bound.
    fixed = [
        "fpgatris 1\nN 3 M 2\nmodule 1 3 -3 -1 -3\nmodule 2 2 -1 1\n",
        "fpgatris 1\nN 4 M 3\nmodule 1 2 3 2\nmodule 2 1 -2\nmodule 3 2 2 4\n",
    ]
    for k in range(40):
        inst = os.path.join(workdir, f"inst{k}.txt")
        with open(inst, "w") as f:
            f.write(fixed[k] if k < len(fixed) else random_instance(rng))
        status, out = run(cli, "exact", "--instance", inst, "--out", os.devnull)
        opt = int(re.search(r"optimum (\d+)", out).group(1))
        # A horizon with slack so the model is not forced to the optimum.
        horizon = opt + 2
        lp = os.path.join(workdir, f"inst{k}.lp")
        status, _ = run(cli, "emit-ilp", "--instance", inst, "--horizon", str(horizon),
                        "--out", lp)
        with open(lp) as f:
            value, x = solve(f.read())
        checked += 1
        expected = opt * (opt + 1) // 2
        if value != expected:
            failures += 1
            print(f"{inst}: solver objective {value}, oracle optimum {opt} -> {expected}")
            continue
        sol = os.path.join(workdir, f"inst{k}.sol")
        with open(sol, "w") as f:
            f.writelines(f"{name} {v}\n" for name, v in x.items() if v)
        status, out = run(cli, "check", "--instance", inst, "--solution", sol,
                          "--horizon", str(horizon))
        if status != 0 or out.strip() != f"ilp: ok objective {expected}":
            failures += 1
            print(f"{inst}: solver solution rejected: {out.strip()}")
    print(f"{checked} models solved, {failures} disagreements")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

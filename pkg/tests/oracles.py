"""Independent reference computations used only by the tests.

Nothing here imports from the package: frequencies are read straight from the
bundled JSON and every program is re-derived over ORDERED haplotype pairs.
"""

import itertools
import json
import math
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "tasteleak" / "data"
ETH = ("African", "Asian", "European", "American")


def phi(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def frequencies():
    doc = json.loads((DATA / "population.json").read_text())
    out = {}
    for gene in ("TAS2R38", "TAS2R16"):
        rows = []
        for e in ETH:
            row = doc["frequencies"][e][gene]
            s = sum(row)
            rows.append([x / s for x in row])
        out[gene] = rows
    return out


def default_milli_weights():
    doc = json.loads((DATA / "weights.json").read_text())
    hw = doc["haplotype_weights"]
    return list(hw["TAS2R38"].values()), list(hw["TAS2R16"].values())


def phenotype_r38(a, b, c, d):
    return "non-taster" if a == 1 and b == 1 else "taster"


def phenotype_r16(a, b, c, d):
    return "non-taster" if c == 0 and d == 0 else "taster"


def make_linear(w38=None, w16=None):
    if w38 is None:
        w38, w16 = default_milli_weights()

    def linear(a, b, c, d):
        milli = w38[a] + w38[b] + w16[c] + w16[d]
        return (milli + 5) // 10  # non-negative weights only

    return linear


def brute_force_joint(program, freqs=None):
    """{output: [p(e, output) for e]} over 4 x 8 x 8 x 3 x 3 ordered atoms."""
    f = freqs or frequencies()
    r38, r16 = f["TAS2R38"], f["TAS2R16"]
    joint = {}
    for e in range(4):
        for a, b in itertools.product(range(8), repeat=2):
            for c, d in itertools.product(range(3), repeat=2):
                p = 0.25 * r38[e][a] * r38[e][b] * r16[e][c] * r16[e][d]
                joint.setdefault(program(a, b, c, d), [0.0] * 4)[e] += p
    return joint


def brute_force_vulnerability(joint):
    return sum(max(col) for col in joint.values())

#!/usr/bin/env python3
"""Regenerates the scripted-backend transcripts under tests/data.

    python3 tests/data/make_transcripts.py

explore_nmc811.jsonl   generation replies that reproduce the NMC811 run
                       (20 first-cycle and 100 second-cycle candidates)
explore_k2c2n3.jsonl   all-valid synthetic run for k=2, cycles=2, trees=3
voltage_nmc811.jsonl   voltage verdicts for the 20 complexity-stage
                       survivors, in the order a top-down merge sort asks

The merge-sort order is simulated here from first principles (charge and
capacity recomputed below), so the C++ ranking must ask exactly the same
questions in the same order or the scripted backend reports drift.
"""

import json
import math
import re
from pathlib import Path

HERE = Path(__file__).resolve().parent
SEED = "LiNi0.8Mn0.1Co0.1O2"

MASS = {
    "Li": 6.94, "B": 10.81, "C": 12.011, "O": 15.999, "Mg": 24.305, "Al": 26.9815385,
    "Si": 28.085, "Ca": 40.078, "Sc": 44.955908, "Ti": 47.867, "V": 50.9415, "Cr": 51.9961,
    "Mn": 54.938044, "Fe": 55.845, "Co": 58.933194, "Ni": 58.6934, "Zn": 65.38, "Sr": 87.62,
    "Y": 88.90584, "Zr": 91.224, "Sn": 118.710, "Ba": 137.327,
}
VALENCE = {
    "C": 4, "Si": 4, "Ge": 4, "Sn": 4, "Pb": 4, "Be": 2, "Mg": 2, "Ca": 2, "Sr": 2, "Ba": 2,
    "Sc": 3, "Ti": 4, "V": 3, "Cr": 3, "Mn": 3, "Fe": 3, "Co": 3, "Ni": 3, "Cu": 2, "Zn": 2,
    "Mo": 6, "Zr": 4, "Y": 3, "Li": 1, "O": -2, "Na": 1, "K": 1, "B": 3, "Al": 3, "Ga": 3,
}


def terms(formula):
    out = []
    for sym, num in re.findall(r"([A-Z][a-z]?)([0-9.]*)", formula):
        out.append((sym, float(num) if num else 1.0))
    return out


def fmt(c):
    if abs(c - 1.0) < 1e-12:
        return ""
    s = ("%.10f" % c).rstrip("0").rstrip(".")
    return s


def render(formula):
    merged = {}
    for sym, c in terms(formula):
        merged[sym] = merged.get(sym, 0.0) + c
    return "".join(sym + fmt(c) for sym, c in merged.items() if c != 0)


def composition(formula):
    merged = {}
    for sym, c in terms(formula):
        merged[sym] = round(merged.get(sym, 0.0) + c, 9)
    return tuple(sorted((s, c) for s, c in merged.items() if c != 0))


def capacity(formula):
    t = terms(formula)
    n = sum(c for s, c in t if s == "Li")
    m = sum(c * MASS[s] for s, c in t)
    return n * 96500 / (3.6 * m)


def charge(formula):
    return sum(c * VALENCE[s] for s, c in terms(formula))


def lines(name):
    return [l.strip() for l in (HERE / name).read_text().splitlines() if l.strip()]


def generation(template, material, formulas):
    reply = "Here are the proposed compositions:\n\n"
    reply += "".join("* %s: adjusted dopant ratio for a lighter lattice.\n" % f for f in formulas)
    return {"match": {"template": template, "bindings": {"material": material}}, "response": reply}


def exploration(trees, first, second, k):
    """first[t*k:(t+1)*k] answers tree t's first cycle; second[i*k:(i+1)*k]
    answers the task of first-cycle output i."""
    out = []
    for t in range(trees):
        block = first[t * k:(t + 1) * k]
        out.append(generation("initial_round_initial_cycle", SEED, block))
        for j, parent in enumerate(block):
            i = t * k + j
            out.append(generation("initial_round_subsequent_cycle", render(parent), second[i * k:(i + 1) * k]))
    return out


def synthetic(trees, k):
    first, second = [], []
    for t in range(trees):
        for j in range(k):
            ni = 0.8 - 0.02 * (t * k + j + 1)
            first.append("LiNi%sMn0.1Co0.1O2" % fmt(round(ni, 4)))
    for parent in first:
        ni = dict(terms(parent))["Ni"]
        for j in range(k):
            second.append("LiNi%sMn0.1Co0.1O2" % fmt(round(ni - 0.005 * (j + 1), 4)))
    return first, second


TOP3 = ["LiNi0.7Mn0.05Co0.05Si0.1Mg0.1O2", "LiNi0.65Mn0.1Co0.1Mg0.1B0.05O2", "LiNi0.65Mn0.1Co0.1Si0.1Ca0.05O2"]


def preference(formula):
    """Lower is higher voltage: the three named leaders, then Ni descending."""
    if formula in TOP3:
        return (0, TOP3.index(formula), "")
    return (1, -dict(terms(formula)).get("Ni", 0.0), formula)


def voltage_transcript():
    # Dedup keeps the first occurrence, so prompts carry that spelling.
    spelling = {}
    for f in lines("nmc811_cycle2.txt"):
        spelling.setdefault(composition(f), f)
    charged = [spelling[composition(l.split(",")[0])] for l in lines("nmc811_charge_top29.csv")[1:]]
    stage_a = sorted(charged, key=lambda f: (round(abs(charge(f)) * 1e9), -capacity(f), render(f)))
    stage_b = [f for f in sorted(stage_a, key=lambda f: len(terms(f))) if len(terms(f)) <= 7][:20]

    exchanges = []

    def first_wins(a, b):
        win = a if preference(a) < preference(b) else b
        reply = ("Comparing the two layered oxides, the dopant set of the winner raises the redox potential.\n"
                 "* %s has the higher voltage.\n" % win)
        exchanges.append({"match": {"template": "voltage_compare",
                                    "bindings": {"material_a": render(a), "material_b": render(b)}},
                          "response": reply})
        return win == a

    def sort(items):
        if len(items) < 2:
            return items
        mid = len(items) // 2
        left, right = sort(items[:mid]), sort(items[mid:])
        out, i, j = [], 0, 0
        while i < len(left) and j < len(right):
            if first_wins(left[i], right[j]):
                out.append(left[i]); i += 1
            else:
                out.append(right[j]); j += 1
        return out + left[i:] + right[j:]

    ordered = sort(stage_b)
    assert ordered[:3] == TOP3, ordered[:3]
    assert len(exchanges) <= 20 * math.ceil(math.log2(20))
    return exchanges


def write(name, exchanges):
    with open(HERE / name, "w") as fh:
        for e in exchanges:
            fh.write(json.dumps(e, sort_keys=True) + "\n")
    print("%s: %d exchanges" % (name, len(exchanges)))


if __name__ == "__main__":
    write("explore_nmc811.jsonl", exploration(4, lines("nmc811_cycle1.txt"), lines("nmc811_cycle2.txt"), 5))
    write("explore_k2c2n3.jsonl", exploration(3, *synthetic(3, 2), 2))
    write("voltage_nmc811.jsonl", voltage_transcript())

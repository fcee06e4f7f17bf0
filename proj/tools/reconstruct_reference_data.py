#!/usr/bin/env python3
"""Rebuild the bundled country-year reference dataset from published tables.

The published material gives country totals over 1995-2011 and annual
series only for regions (plus Germany). This script finds per-country
annual GDP, CAB and GGB values such that every published cell is
reproduced at its printed precision (6 significant digits), solving one
linear program. Where the published cells leave the split between
countries free, values follow a proportional prior.

Input: a JSON file of transcribed tables (see published_tables.json).
Output: gdp.csv, cab_pct.csv, ggb.csv in plain-csv (country,year,value).

Requires numpy and scipy.
"""
import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import lil_matrix

YEARS = list(range(1995, 2012))
NY = len(YEARS)

NAMES = {
    "Austria": "AT", "Belgium": "BE", "Bulgaria": "BG", "Cyprus": "CY",
    "CzechRep": "CZ", "Denmark": "DK", "Estonia": "EE", "Finland": "FI",
    "France": "FR", "Germany": "DE", "Greece": "EL", "Hungary": "HU",
    "Ireland": "IE", "Italy": "IT", "Latvia": "LV", "Lithuania": "LT",
    "Luxembourg": "LU", "Malta": "MT", "Netherlands": "NL", "Poland": "PL",
    "Portugal": "PT", "Romania": "RO", "Slovakia": "SK", "Slovenia": "SI",
    "Spain": "ES", "Sweden": "SE", "UK": "UK",
}
CODES = sorted(NAMES.values())
FIRST_YEAR = {"BG": 1998, "EL": 2000}

# Rough relative economic size, used only to split a region's GDP among
# members the published tables do not resolve.
GDP_WEIGHT = {
    "AT": 300, "BE": 370, "FI": 190, "LU": 42, "CY": 18, "EE": 16,
    "EL": 208, "IE": 160, "MT": 6.5, "PT": 171, "SK": 69, "SI": 36,
    "DK": 240, "SE": 390, "BG": 38, "CZ": 155, "HU": 100, "LV": 20,
    "LT": 31, "PL": 370, "RO": 131,
}


def load_regions(path):
    with open(path) as f:
        return {k: sorted(v) for k, v in json.load(f).items()}


def ulp6(text):
    v = float(text)
    if v == 0.0:
        return 1e-6
    return 10.0 ** (math.floor(math.log10(abs(v))) - 5)


def available(c, y):
    return y >= FIRST_YEAR.get(c, YEARS[0])


class Program:
    def __init__(self):
        self.nvar = 0
        self.names = []
        self.rows = []  # (coeffs dict, lo, hi, label)

    def var(self, name):
        self.names.append(name)
        self.nvar += 1
        return self.nvar - 1

    def interval(self, coeffs, lo, hi, label):
        self.rows.append((coeffs, lo, hi, label))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tables", required=True)
    ap.add_argument("--regions", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--margin", type=float, default=0.45,
                    help="fraction of one printed unit allowed on each side")
    args = ap.parse_args()

    tables = json.load(open(args.tables))
    regions = load_regions(args.regions)
    regions["Germany"] = ["DE"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    prog = Program()
    G = {(c, y): prog.var(f"G_{c}_{y}") for c in CODES for y in YEARS}
    X = {}
    for c in CODES:
        for y in YEARS:
            if c != "DE" and available(c, y):
                X[(c, y)] = prog.var(f"X_{c}_{y}")
    GT = {c: prog.var(f"GT_{c}") for c in CODES}

    de_pct = {}
    for row in tables["cab_ratio_four_regions"]["rows"]:
        de_pct[int(row[0])] = float(row[2])

    def gdp_expr(members, y, scale=1.0):
        return {G[(c, y)]: scale for c in members}

    def cab_expr(members, y, scale=1.0):
        e = {}
        for c in members:
            if c == "DE":
                e[G[("DE", y)]] = e.get(G[("DE", y)], 0.0) + scale * de_pct[y]
            elif available(c, y):
                e[X[(c, y)]] = e.get(X[(c, y)], 0.0) + scale
        return e

    def add(e, f, s=1.0):
        r = dict(e)
        for k, v in f.items():
            r[k] = r.get(k, 0.0) + s * v
        return r

    def value_cell(expr, text, label):
        v = float(text)
        h = args.margin * ulp6(text)
        prog.interval(expr, v - h, v + h, label)

    def ratio_cell(num, den, text, label):
        # lo <= num/den <= hi with den > 0, linearised
        v = float(text)
        h = args.margin * ulp6(text)
        prog.interval(add(num, den, -(v - h)), 0.0, math.inf, label + " lo")
        prog.interval(add(num, den, -(v + h)), -math.inf, 0.0, label + " hi")

    # annual tables
    for key, spec in tables.items():
        if key in ("totals", "region_totals"):
            continue
        cols = spec["columns"]
        for row in spec["rows"]:
            y = int(row[0])
            for col, text in zip(cols, row[2:]):
                if col is None or text in ("-", ""):
                    continue
                kind, subject = col.split(":", 1)
                if kind == "gdp":
                    value_cell(gdp_expr(regions[subject], y), text, f"{key} {col} {y}")
                elif kind == "gdp_share":
                    num = gdp_expr(regions[subject], y) if subject in regions else \
                        gdp_expr([NAMES[s] for s in subject.split("+")], y)
                    ratio_cell(num, gdp_expr(regions["EU27"], y), text, f"{key} {col} {y}")
                elif kind == "cab":
                    value_cell(cab_expr(regions[subject], y), text, f"{key} {col} {y}")
                elif kind == "cab_ratio":
                    if subject == "Germany":
                        continue
                    ratio_cell(cab_expr(regions[subject], y), gdp_expr(regions[subject], y),
                               text, f"{key} {col} {y}")
                elif kind == "cab_cum":
                    e = {}
                    for yy in YEARS:
                        if yy <= y:
                            e = add(e, cab_expr(regions[subject], yy))
                    value_cell(e, text, f"{key} {col} {y}")
                else:
                    raise ValueError(col)

    # country totals
    def cab_total(members):
        e = {}
        for y in YEARS:
            e = add(e, cab_expr(members, y))
        return e

    def ggb_total(members):
        return {GT[c]: 1.0 for c in members}

    for name, (cab, ggb, psb) in tables["totals"].items():
        members = regions["EU27"] if name == "EU27" else [NAMES[name]]
        value_cell(cab_total(members), cab, f"T1 cab {name}")
        value_cell(ggb_total(members), ggb, f"T1 ggb {name}")
        value_cell(add(cab_total(members), ggb_total(members), -1.0), psb, f"T1 psb {name}")
    for name, (cab, ggb, psb) in tables["region_totals"].items():
        members = regions[name]
        value_cell(cab_total(members), cab, f"R cab {name}")
        value_cell(ggb_total(members), ggb, f"R ggb {name}")
        value_cell(add(cab_total(members), ggb_total(members), -1.0), psb, f"R psb {name}")

    # priors
    gdp_rows = {int(r[0]): r for r in tables["gdp_regions"]["rows"]}
    gcols = tables["gdp_regions"]["columns"]

    def printed_gdp(region, y):
        return float(gdp_rows[y][2 + gcols.index("gdp:" + region)])

    share_rows = {int(r[0]): r for r in tables["gdp_share_six"]["rows"]}
    scols = tables["gdp_share_six"]["columns"]
    prior_g = {}
    big = {}
    for y in YEARS:
        eu27 = printed_gdp("EU27", y)
        for col, text in zip(scols, share_rows[y][2:]):
            kind, subject = col.split(":", 1)
            if "+" in subject:
                continue
            big[(NAMES[subject], y)] = float(text) * eu27
    for y in YEARS:
        blocks = {
            "Eurozone6+": printed_gdp("Eurozone6+", y),
            "Eurozone10-": printed_gdp("Eurozone10-", y),
        }
        dkse = printed_gdp("EU9+", y) - printed_gdp("Germany", y) - printed_gdp("Eurozone6+", y)
        blocks["DKSE"] = dkse
        blocks["EU10rest"] = printed_gdp("EU10", y) - dkse
        members = {
            "Eurozone6+": regions["Eurozone6+"],
            "Eurozone10-": regions["Eurozone10-"],
            "DKSE": ["DK", "SE"],
            "EU10rest": [c for c in regions["EU10"] if c not in ("DK", "SE")],
        }
        prior_g[("DE", y)] = printed_gdp("Germany", y)
        for b, total in blocks.items():
            known = [c for c in members[b] if (c, y) in big]
            rest = [c for c in members[b] if (c, y) not in big]
            remainder = total - sum(big[(c, y)] for c in known)
            wsum = sum(GDP_WEIGHT[c] for c in rest)
            for c in known:
                prior_g[(c, y)] = big[(c, y)]
            for c in rest:
                prior_g[(c, y)] = remainder * GDP_WEIGHT[c] / wsum

    # CAB prior: split each block's annual balance in proportion to the
    # members' published totals (over the members reporting that year).
    cab_rows = {int(r[0]): r for r in tables["cab_four_regions"]["rows"]}
    ccols = tables["cab_four_regions"]["columns"]
    eu9_rows = {int(r[0]): r for r in tables["cab_surplus_deficit"]["rows"]}
    ecols = tables["cab_surplus_deficit"]["columns"]

    def printed_cab(rows, cols, subject, y):
        return float(rows[y][2 + cols.index("cab:" + subject)])

    totals = {NAMES[k]: float(v[0]) for k, v in tables["totals"].items() if k != "EU27"}
    prior_x = {}
    for y in YEARS:
        de = printed_cab(cab_rows, ccols, "Germany", y)
        e6 = printed_cab(cab_rows, ccols, "Eurozone6+", y)
        dkse = printed_cab(eu9_rows, ecols, "EU9+", y) - de - e6
        blocks = {
            "Eurozone6+": (e6, regions["Eurozone6+"]),
            "Eurozone10-": (printed_cab(cab_rows, ccols, "Eurozone10-", y), regions["Eurozone10-"]),
            "DKSE": (dkse, ["DK", "SE"]),
            "EU10rest": (printed_cab(cab_rows, ccols, "EU10", y) - dkse,
                         [c for c in regions["EU10"] if c not in ("DK", "SE")]),
        }
        for total, members in blocks.values():
            rep = [c for c in members if available(c, y)]
            tsum = sum(totals[c] for c in rep)
            for c in rep:
                prior_x[(c, y)] = total * totals[c] / tsum

    # assemble LP: variables + slack pairs per row + deviation pairs per prior
    n = prog.nvar
    prior_terms = []
    for key, idx in G.items():
        prior_terms.append((idx, prior_g[key], 1.0 / max(1.0, abs(prior_g[key]))))
    for key, idx in X.items():
        prior_terms.append((idx, prior_x[key], 1.0 / max(1.0, abs(prior_x[key]))))
    for name, (cab, ggb, psb) in tables["totals"].items():
        if name != "EU27":
            v = float(ggb)
            prior_terms.append((GT[NAMES[name]], v, 1.0 / max(1.0, abs(v))))

    nrows = len(prog.rows)
    ndev = len(prior_terms)
    total_vars = n + 2 * nrows + 2 * ndev
    c = np.zeros(total_vars)
    A_ub = lil_matrix((2 * nrows, total_vars))
    b_ub = np.zeros(2 * nrows)
    penalty = 1e6
    for i, (coeffs, lo, hi, label) in enumerate(prog.rows):
        s_lo = n + 2 * i
        s_hi = n + 2 * i + 1
        c[s_lo] = c[s_hi] = penalty
        # expr >= lo - s_lo  ->  -expr - s_lo <= -lo
        for k, v in coeffs.items():
            A_ub[2 * i, k] = -v
            A_ub[2 * i + 1, k] = v
        A_ub[2 * i, s_lo] = -1.0
        b_ub[2 * i] = -lo if math.isfinite(lo) else 1e12
        A_ub[2 * i + 1, s_hi] = -1.0
        b_ub[2 * i + 1] = hi if math.isfinite(hi) else 1e12
    A_eq = lil_matrix((ndev, total_vars))
    b_eq = np.zeros(ndev)
    for j, (idx, target, w) in enumerate(prior_terms):
        p = n + 2 * nrows + 2 * j
        A_eq[j, idx] = 1.0
        A_eq[j, p] = -1.0
        A_eq[j, p + 1] = 1.0
        b_eq[j] = target
        c[p] = c[p + 1] = w
    bounds = [(None, None)] * n + [(0, None)] * (2 * nrows + 2 * ndev)
    for key, idx in G.items():
        bounds[idx] = (0.0, None)
    res = linprog(c, A_ub=A_ub.tocsr(), b_ub=b_ub, A_eq=A_eq.tocsr(), b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status != 0:
        sys.exit(f"linprog failed: {res.message}")
    sol = res.x
    bad = [(prog.rows[i][3], sol[n + 2 * i], sol[n + 2 * i + 1])
           for i in range(nrows) if sol[n + 2 * i] > 1e-9 or sol[n + 2 * i + 1] > 1e-9]
    for label, lo, hi in bad:
        print(f"relaxed: {label} by {max(lo, hi):.3g}", file=sys.stderr)

    def fmt(v):
        return repr(float(f"{v:.12g}"))

    with open(out / "gdp.csv", "w") as f:
        f.write("country,year,value\n")
        for cc in CODES:
            for y in YEARS:
                f.write(f"{cc},{y},{fmt(sol[G[(cc, y)]])}\n")
    with open(out / "cab_pct.csv", "w") as f:
        f.write("country,year,value\n")
        for cc in CODES:
            for y in YEARS:
                if not available(cc, y):
                    continue
                if cc == "DE":
                    f.write(f"{cc},{y},{de_pct[y]!r}\n")
                else:
                    f.write(f"{cc},{y},{fmt(sol[X[(cc, y)]] / sol[G[(cc, y)]])}\n")
    with open(out / "ggb.csv", "w") as f:
        f.write("country,year,value\n")
        for cc in CODES:
            years = [y for y in YEARS if available(cc, y)]
            gsum = sum(sol[G[(cc, y)]] for y in years)
            total = sol[GT[cc]]
            for y in years:
                f.write(f"{cc},{y},{fmt(total * sol[G[(cc, y)]] / gsum)}\n")
    print(f"rows={nrows} relaxed={len(bad)}", file=sys.stderr)


if __name__ == "__main__":
    main()

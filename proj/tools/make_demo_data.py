#!/usr/bin/env python3
"""Writes the synthetic demo inputs under data/demo.

Everything here is made up. The driver panel is shaped so that the default
betas give round-number multipliers at the 5/10/20/30y horizons.
"""
import argparse
import math
from pathlib import Path

import numpy as np

BASE = 2025
NODES = list(range(2020, 2065, 5))
MODELS = ["MODEL-A", "MODEL-B", "MODEL-C"]
BETA_GDP, BETA_CARBON = -0.6, 0.15

# hazard multiplier targets at 5/10/20/30y
TARGETS = {
    "Net Zero 2050": [1.2048, 1.2557, 1.3855, 1.4107],
    "Delayed Transition": [1.0000, 1.4812, 1.7278, 1.8742],
    "NDCs": [1.0965, 1.0978, 1.1003, 1.0944],
}
CARBON_GROWTH = {"Current Policies": 0.01, "Net Zero 2050": 0.09, "Delayed Transition": 0.06, "NDCs": 0.03}


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(fmt(v) for v in r) + "\n")


def fmt(v):
    if isinstance(v, float):
        return repr(round(v, 10))
    return str(v)


def log_target(scenario, year):
    """Piecewise-linear log m in calendar year, 0 at and before the base year."""
    knots = [BASE, BASE + 5, BASE + 10, BASE + 20, BASE + 30]
    vals = [0.0] + [math.log(m) for m in TARGETS[scenario]]
    return float(np.interp(year, knots, vals))


def drivers(out):
    rows = []
    ref_gdp = {y: 100.0 * 1.02 ** (y - 2020) for y in NODES}
    carbon = {s: {y: 20.0 * math.exp(g * max(0, y - 2020)) for y in NODES} for s, g in CARBON_GROWTH.items()}
    gdp = {"Current Policies": ref_gdp}
    for s in TARGETS:
        path = {}
        for y in NODES:
            lc = math.log(carbon[s][y] / carbon[s][BASE]) - math.log(carbon["Current Policies"][y] /
                                                                       carbon["Current Policies"][BASE])
            lg_rel = (log_target(s, y) - BETA_CARBON * lc) / BETA_GDP
            path[y] = ref_gdp[y] * math.exp(lg_rel) if y >= BASE else ref_gdp[y]
        gdp[s] = path
    for s in ["Current Policies", *TARGETS]:
        for k, model in enumerate(MODELS):
            bump = 1.0 + 0.01 * (k - 1)  # median across models is the central path
            for y in NODES:
                rows.append((model, s, "World", "GDP|PPP", y, gdp[s][y] * bump))
                rows.append((model, s, "World", "Price|Carbon", y, carbon[s][y] * bump))
                rows.append((model, s, "Other", "GDP|PPP", y, gdp[s][y] * 0.5))
    write_csv(out / "ngfs_drivers.csv", ["model", "scenario", "region", "variable", "year", "value"], rows)


def yields(out):
    tenors = [0.25, 0.5, 1, 2, 3, 5, 7, 10, 15, 20, 30]
    rows = [(float(t), 0.035 + 0.008 * (1 - math.exp(-t / 6.0))) for t in tenors]
    write_csv(out / "yields.csv", ["tenor_years", "yield"], rows)


def nature(out, rng):
    decline = {"SSP1xRCP2.6": 0.0005, "SSP3xRCP6.0": 0.004, "SSP5xRCP8.5": 0.0025}
    rows = []
    for s, d in decline.items():
        for k, model in enumerate(["BII-1", "BII-2", "BII-3"]):
            for y in range(2015, 2065, 5):
                rows.append((model, s, "Global", "intactness", y, 0.78 * math.exp(-d * (y - 2015)) * (1 + 0.005 * (k - 1))))
    write_csv(out / "nature_indicators.csv", ["model", "scenario", "region", "variable", "year", "value"], rows)

    years = range(BASE, BASE + 30)
    for name, n, vol in [("isimip", 180, 0.03), ("madingley", 100, 0.05)]:
        rows = []
        for i in range(n):
            drift = rng.normal(-0.002, 0.004)
            level = 1.0
            for y in years:
                rows.append((f"{name}-{i:03d}", y, level))
                level *= math.exp(drift + vol * rng.standard_normal())
        write_csv(out / f"providers_{name}.csv", ["provider", "year", "value"], rows)


def case_study(out, rng):
    rows = []
    shapes = {
        "gfdl-esm4": lambda k: 1.0 - 0.006 * k,
        "ipsl-cm6a-lr": lambda k: 1.0 + 0.004 * k,
        "mpi-esm1-2": lambda k: 1.0 - 0.001 * k,
    }
    for name, f in shapes.items():
        for k in range(30):
            rows.append((name, BASE + k, max(0.2, f(k) + 0.02 * rng.standard_normal())))
    write_csv(out / "case_study_members.csv", ["member", "year", "ratio"], rows)


def wti(out):
    rows = [(m / 12.0, 74.0 - 6.0 * (1 - math.exp(-m / 24.0))) for m in range(0, 61)]
    write_csv(out / "wti_forwards.csv", ["tenor_years", "forward"], rows)


def daily(out, rng):
    dates = np.arange(np.datetime64("2019-01-01"), np.datetime64("2023-12-31"))
    dates = [d for d in dates if d.astype("datetime64[D]").item().weekday() < 5]
    n = len(dates)
    vol = np.where(np.sin(np.arange(n) / 90.0) > 0.6, 0.03, 0.01)
    r = vol * rng.standard_normal(n)
    # spreads widen when the proxy falls, harder in the volatile regime
    beta = np.where(vol > 0.02, -120.0, -15.0)
    ds = beta * r + 5.0 * rng.standard_normal(n)
    price = 100.0 * np.exp(np.cumsum(r))
    spread = np.empty(n)
    level = 150.0
    for i in range(n):
        level += ds[i] - 0.02 * (level - 150.0)
        spread[i] = level
    proxy_rows = [(str(d), float(p)) for d, p in zip(dates, price)]
    spread_rows = [(str(d), float(s)) for d, s in zip(dates, spread)]
    spread_rows[10] = (spread_rows[10][0], "")  # one gap
    write_csv(out / "proxy.csv", ["date", "value"], proxy_rows)
    write_csv(out / "spread.csv", ["date", "value"], spread_rows)
    write_csv(out / "spread_constant.csv", ["date", "value"], [(str(d), 150.0) for d in dates])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data" / "demo"))
    ap.add_argument("--seed", type=int, default=20250101)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    yields(out)
    drivers(out)
    nature(out, rng)
    case_study(out, rng)
    wti(out)
    daily(out, rng)


if __name__ == "__main__":
    main()

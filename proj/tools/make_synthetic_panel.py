#!/usr/bin/env python3
"""Generate a synthetic stand-in for the long-run multi-country macro panel.

The real input is a long-format CSV derived from the Jorda-Schularick-Taylor
Macrohistory database. That file is not redistributable here, so this script
writes a panel with the same schema, the same country/year coverage pattern
and return moments in line with the published long-run summary statistics.

Output columns:
    country, year, stock_return, bond_return, housing_return, rental_yield,
    hpi, inflation, wage_index

Returns are nominal decimal fractions. The bond series behaves like a
long-term government yield (persistent real yield plus expected inflation)
because mortgage and reverse-mortgage pricing keys off it. `hpi` is a
house-price-to-income index
normalized to 100 in 1990 for every country (the loader rescales it).
Late-starting countries get leading rows with empty fields so that the
loader's "drop rows before first complete year" path is exercised.
"""

import argparse
import csv

import numpy as np

FIRST_YEAR = 1870
LAST_YEAR = 2020

# country -> first complete year
COVERAGE = {
    "AUS": 1871, "BEL": 1871, "CAN": 1921, "CHE": 1900, "DEU": 1871,
    "DNK": 1873, "ESP": 1900, "FIN": 1896, "FRA": 1871, "GBR": 1871,
    "IRL": 1950, "ITA": 1871, "JPN": 1900, "NLD": 1901, "NOR": 1881,
    "PRT": 1931, "SWE": 1871, "USA": 1871,
}
EXCLUDED = {"CAN", "IRL"}

# Pooled nominal means the retained panel is pinned to.
TARGET_STOCK_MEAN = 0.1124
TARGET_HOUSE_MEAN = 0.0729

# Real-return block: stock, house capital gain, bond innovation.
REAL_MEAN = np.array([0.068, 0.030, 0.0])
REAL_STD = np.array([0.165, 0.085, 1.0])
REAL_CORR = np.array([
    [1.00, 0.20, 0.25],
    [0.20, 1.00, 0.15],
    [0.25, 0.15, 1.00],
])
HOUSE_AR = 0.45
# Real bond yield: AR(1) around its mean.
YIELD_MEAN = 0.012
YIELD_AR = 0.85
YIELD_SD = 0.008
BOND_NOISE = 0.005
# Inflation: AR(1) around 3.5% plus rare upward spikes (wars, oil shocks).
INFLATION_SD = 0.05
SPIKE_PROB = 0.04
SPIKE_SIZE = 0.10


def simulate_country(rng, n_years):
    chol = np.linalg.cholesky(REAL_CORR)
    inflation = np.empty(n_years)
    real = np.empty((n_years, 3))
    rent = np.empty(n_years)
    log_ratio = np.empty(n_years)

    pi_prev, house_prev = 0.035, REAL_MEAN[1]
    yield_prev = YIELD_MEAN
    rent_prev = rng.normal(0.042, 0.006)
    ratio_prev = rng.normal(0.0, 0.15)
    for t in range(n_years):
        shock = SPIKE_SIZE if rng.random() < SPIKE_PROB else 0.0
        pi = 0.035 + 0.6 * (pi_prev - 0.035) + rng.normal(0.0, INFLATION_SD) + shock
        pi = max(pi, -0.12)
        expected_pi = 0.035 + 0.6 * (pi_prev - 0.035)
        surprise = pi - expected_pi

        e = chol @ rng.standard_normal(3)
        stock = REAL_MEAN[0] + REAL_STD[0] * e[0] - 0.4 * surprise
        house_innov = REAL_STD[1] * np.sqrt(1 - HOUSE_AR ** 2) * e[1]
        house = REAL_MEAN[1] + HOUSE_AR * (house_prev - REAL_MEAN[1]) + house_innov
        yield_prev = YIELD_MEAN + YIELD_AR * (yield_prev - YIELD_MEAN) + YIELD_SD * e[2]
        nominal_bond = (1.0 + yield_prev) * (1.0 + expected_pi) - 1.0 + rng.normal(0.0, BOND_NOISE)
        bond = (1.0 + nominal_bond) / (1.0 + pi) - 1.0

        real[t] = np.maximum([stock, house, bond], -0.85)
        inflation[t] = pi
        rent_prev = max(0.015, 0.042 + 0.9 * (rent_prev - 0.042) + rng.normal(0.0, 0.004))
        rent[t] = rent_prev
        ratio_prev = 0.93 * ratio_prev + 0.6 * (house - REAL_MEAN[1]) + rng.normal(0.0, 0.03)
        log_ratio[t] = ratio_prev
        pi_prev, house_prev = pi, house

    nominal = (1.0 + real) * (1.0 + inflation)[:, None] - 1.0
    return nominal, inflation, rent, log_ratio


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/macro_panel.csv")
    parser.add_argument("--seed", type=int, default=20241)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    per_country = {}
    for code, start in COVERAGE.items():
        n = LAST_YEAR - start + 1
        nominal, inflation, rent, log_ratio = simulate_country(rng, n)
        per_country[code] = (start, nominal, inflation, rent, log_ratio)

    # Pin pooled nominal means of the retained countries.
    kept = [per_country[c] for c in COVERAGE if c not in EXCLUDED]
    stock_mean = np.mean(np.concatenate([k[1][:, 0] for k in kept]))
    house_mean = np.mean(np.concatenate([k[1][:, 1] for k in kept]))
    for code, (start, nominal, *_rest) in per_country.items():
        nominal[:, 0] += TARGET_STOCK_MEAN - stock_mean
        nominal[:, 1] += TARGET_HOUSE_MEAN - house_mean

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["country", "year", "stock_return", "bond_return", "housing_return",
                         "rental_yield", "hpi", "inflation", "wage_index"])
        for code, (start, nominal, inflation, rent, log_ratio) in sorted(per_country.items()):
            years = np.arange(start, LAST_YEAR + 1)
            price_index = np.cumprod(1.0 + nominal[:, 1])
            ratio = np.exp(log_ratio)
            i90 = int(np.where(years == 1990)[0][0])
            hpi = 100.0 * ratio / ratio[i90]
            wage = price_index / ratio
            wage = 100.0 * wage / wage[i90]
            for y in range(FIRST_YEAR, start):
                writer.writerow([code, y, "", "", "", "", "", "", ""])
            for k, y in enumerate(years):
                writer.writerow([
                    code, int(y),
                    f"{nominal[k, 0]:.6f}", f"{nominal[k, 2]:.6f}", f"{nominal[k, 1]:.6f}",
                    f"{rent[k]:.6f}", f"{hpi[k]:.6f}", f"{inflation[k]:.6f}", f"{wage[k]:.6f}",
                ])


if __name__ == "__main__":
    main()

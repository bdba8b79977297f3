#!/usr/bin/env python3
"""Write the bundled life table and reverse-mortgage PLF grid.

life_table.csv follows the SSA period life table layout (sex, age,
death_probability for ages 0-119). The bundled values come from a
Gompertz-Makeham hazard fitted by eye to recent SSA period tables; drop in
the published table to replace them.

plf_table.csv is a coarse principal-limit-factor grid (ages 65-95 step 5,
expected rates 3%-10% step 1%) with the shape of the public HECM tables:
increasing in age, decreasing in rate.
"""

import argparse
import csv
import math

# sex -> (makeham A, gompertz B, gompertz growth)
HAZARD = {
    "male": (0.0010, 5.8e-5, 0.087),
    "female": (0.0004, 2.39e-5, 0.0936),
}


def death_probability(sex, age):
    if age >= 119:
        return 1.0
    a, b, g = HAZARD[sex]
    mu = a + b * math.exp(g * age)
    return min(1.0, 1.0 - math.exp(-mu))


def plf(age, rate):
    duration = 0.55 * (100 - age)
    return 0.75 * math.exp(-(rate - 0.015) * duration)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--life-table", default="data/life_table.csv")
    parser.add_argument("--plf-table", default="data/plf_table.csv")
    args = parser.parse_args()

    with open(args.life_table, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sex", "age", "death_probability"])
        for sex in ("male", "female"):
            for age in range(120):
                w.writerow([sex, age, f"{death_probability(sex, age):.6f}"])

    with open(args.plf_table, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["age", "rate", "plf"])
        for age in range(65, 100, 5):
            for pct in range(3, 11):
                w.writerow([age, f"{pct / 100:.2f}", f"{plf(age, pct / 100):.3f}"])


if __name__ == "__main__":
    main()

"""Writes the synthetic sample dataset under data/sample/.

The series are invented: smooth trends plus seeded noise at roughly the
scale of a large state's energy use, so the suite has something realistic
to chew on without shipping EIA data. Rerunning reproduces the files
byte for byte.
"""

import csv
import math
from pathlib import Path

import numpy as np

YEARS = list(range(1970, 2023))
STATE = "CA"
STATUS = "2022F"
OUT = Path(__file__).resolve().parent.parent / "data" / "sample"

rng = np.random.default_rng(20240101)
T = np.arange(len(YEARS), dtype=float)


def walk(sd, start=0.0):
    return start + np.cumsum(rng.normal(0.0, sd, len(YEARS)))


def ar1(phi, sd):
    e = rng.normal(0.0, sd, len(YEARS))
    x = np.zeros(len(YEARS))
    for i in range(len(YEARS)):
        x[i] = (phi * x[i - 1] if i else 0.0) + e[i]
    return x


def logistic(top, mid, width):
    return top / (1.0 + np.exp(-(T - mid) / width))


covid = np.array([0.85 if y == 2020 else 0.93 if y == 2021 else 1.0 for y in YEARS])

population = 20000 + 19500 * (1 - np.exp(-T / 30)) + ar1(0.6, 60)
precipitation = np.clip(22 + rng.normal(0, 6, len(YEARS)), 5, None)
deflator = np.exp(0.035 * (T - 47)) * (1 + ar1(0.5, 0.004))

# nominal dollars per million Btu
def price(level, growth, sd):
    return level * np.exp(growth * T + walk(sd))


prices = {
    "TETCD": np.round(price(2.7, 0.040, 0.035), 2),
    "TECCD": np.round(price(4.0, 0.041, 0.035), 2),
    "TERCD": np.round(price(4.5, 0.040, 0.030), 2),
    "TEICD": np.round(price(2.5, 0.038, 0.040), 2),
    "TEACD": np.round(price(3.0, 0.042, 0.045), 2),
    "NGTCD": np.round(price(0.9, 0.045, 0.060), 2),
    "PATCD": np.round(price(2.2, 0.040, 0.050), 2),
    "MGTCD": np.round(price(3.2, 0.041, 0.050), 2),
}

# billion Btu
petroleum = (3.4e6 + 2.0e4 * T - 450 * T**2 + ar1(0.7, 5.0e4)) * covid
natural_gas = (1.7e6 + 1.2e4 * T - 150 * T**2 + ar1(0.6, 4.0e4)) * np.where(covid < 1, 0.97, 1.0)
coal = np.clip(9.0e4 - 1.2e3 * T + ar1(0.5, 4.0e3), 2.0e3, None)
nuclear = np.where(T < 13, 5.0e4 + 4.0e3 * T, 3.5e5 - np.clip(T - 40, 0, None) * 1.2e4) + ar1(0.4, 8.0e3)
hydro = np.clip(2.1e5 + 1.6e4 * (precipitation - 22) + ar1(0.3, 1.5e4), 4.0e4, None)
solar = 2.0e3 + logistic(4.5e5, 45, 3.5) * np.exp(rng.normal(0, 0.03, len(YEARS)))
wind = 1.0e3 + logistic(1.6e5, 38, 4.0) * np.exp(rng.normal(0, 0.04, len(YEARS)))
biomass = 1.5e5 + 900 * T + ar1(0.5, 6.0e3)
geothermal = 4.0e4 + logistic(1.3e5, 15, 4.0) - np.clip(T - 30, 0, None) * 800 + ar1(0.5, 3.0e3)
production = 2.6e6 - 1.5e4 * T + walk(4.0e4)

total = petroleum + natural_gas + coal + nuclear + hydro + solar + wind + biomass + geothermal
shares = np.vstack([
    0.19 + 0.0006 * T + ar1(0.5, 0.003),   # commercial
    0.20 - 0.0003 * T + ar1(0.5, 0.003),   # residential
    0.25 - 0.0005 * T + ar1(0.5, 0.003),   # industrial
])
shares = np.vstack([shares, 1 - shares.sum(axis=0)])  # transportation

quantities = {
    "TETCB": total,
    "TECCB": total * shares[0],
    "TERCB": total * shares[1],
    "TEICB": total * shares[2],
    "TEACB": total * shares[3],
    "TEPRB": production,
    "PATCB": petroleum,
    "NGTCB": natural_gas,
    "CLTCB": coal,
    "NUETB": nuclear,
    "HYTCB": hydro,
    "SOTCB": solar,
    "WYTCB": wind,
    "BMTCB": biomass,
    "GETCB": geothermal,
}


def cells(values, first_year=YEARS[0], decimals=0):
    out = []
    for y, v in zip(YEARS, values):
        if y < first_year:
            out.append("")
        elif decimals:
            out.append(f"{v:.{decimals}f}")
        else:
            out.append(str(int(round(v))))
    return out


def write_year_value(name, values, decimals):
    with open(OUT / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "value"])
        for y, v in zip(YEARS, values):
            w.writerow([y, f"{v:.{decimals}f}"])


OUT.mkdir(parents=True, exist_ok=True)
with open(OUT / "seds.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["Data_Status", "State", "MSN"] + YEARS)
    for code, v in quantities.items():
        # wind is blank before 1981, as in series that start late
        first = 1981 if code == "WYTCB" else YEARS[0]
        w.writerow([STATUS, STATE, code] + cells(v, first))
    for code, v in prices.items():
        w.writerow([STATUS, STATE, code] + cells(v, decimals=2))

write_year_value("population.csv", population, 1)
write_year_value("precipitation.csv", precipitation, 2)
write_year_value("deflator.csv", deflator, 5)

#!/usr/bin/env python3
"""Regenerate the two convergence-figure data sets into out/.

fig1_ratio{0.5,2}.csv: scaled discrete weights against the shifted kernel for
H = 0.2 at n in {100, 1000}.  fig2.csv: the limit value over the default
(H, log volatility ratio) grid at zero drift.
"""

import math
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from delayed_hedge import ContinuousMarket
from delayed_hedge.convergence import figure1_data, figure2_data, write_csv

OUT = pathlib.Path(__file__).resolve().parents[1] / "out"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for ratio in (0.5, 2.0):
        market = ContinuousMarket(H=0.2, theta=0.0, varsigma=1.0, varsigma_hat=math.sqrt(ratio))
        table = figure1_data(market, ns=[100, 1000], grid=500)
        path = OUT / f"fig1_ratio{ratio:g}.csv"
        with open(path, "w", encoding="utf-8") as stream:
            write_csv(table, stream, metadata={"H": 0.2, "ratio": ratio, "ns": "100,1000"})
        print("wrote", path)

    h_grid = [round(0.02 * i, 10) for i in range(1, 51)]
    lr_grid = [round(-2.0 + 0.1 * i, 10) for i in range(41)]
    table = figure2_data(h_grid, lr_grid)
    path = OUT / "fig2.csv"
    with open(path, "w", encoding="utf-8") as stream:
        write_csv(table, stream, metadata={"h_grid": "0.02:1.0:0.02", "logratio_grid": "-2:2:0.1"})
    print("wrote", path)


if __name__ == "__main__":
    main()

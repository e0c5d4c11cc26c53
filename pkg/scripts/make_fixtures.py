"""Regenerate the CSV fixtures under tests/data.

Run from the repository root:

    python3 scripts/make_fixtures.py

Everything is seeded, so reruns reproduce the files byte for byte.  The
cap-skew golden table is produced through the real CLI entry point, which is
exactly how the regression test re-creates it.
"""

import csv
import math
from datetime import date, timedelta
from pathlib import Path

from mtdd import MarketParams, OptionSpec, QuadratureConfig, forward_price, gbm_simulate, mtdd_call
from mtdd.cli import main as cli_main
from mtdd.returns import PriceSeries, historical_vol

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"

GBM_DAILY_SEED = 20240701
GBM_IV_SEED = 777
ANNUALIZATION = 252
IV_WINDOW = 90
IV_MATURITY_DAYS = 30


def weekday_dates(start: date, count: int) -> list[date]:
    out = []
    d = start
    while len(out) < count:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def write_gbm_daily(path: Path) -> None:
    n = 5000
    series = gbm_simulate(
        100.0, 0.05, 0.2, horizon=(n - 1) / ANNUALIZATION, steps=n - 1,
        seed=GBM_DAILY_SEED,
    )
    dates = weekday_dates(date(2004, 1, 2), n)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "close"])
        for d, close in zip(dates, series.values):
            writer.writerow([d.isoformat(), format(close, ".6f")])


def write_gbm_with_iv(path: Path) -> None:
    n = 460
    series = gbm_simulate(
        100.0, 0.05, 0.25, horizon=(n - 1) / ANNUALIZATION, steps=n - 1,
        seed=GBM_IV_SEED,
    )
    dates = weekday_dates(date(2010, 1, 4), n)
    price_series = PriceSeries(dates=dates, closes=series.values)
    estimates = historical_vol(price_series, IV_WINDOW, ANNUALIZATION)
    maturity = IV_MATURITY_DAYS / ANNUALIZATION
    quad = QuadratureConfig()  # strike mode
    ivs = [None] * n
    for j, est in enumerate(estimates):
        i = IV_WINDOW + j
        params = MarketParams(
            spot=float(series.values[i]), rate=0.0, dividend=0.0,
            vol=est.sigma, maturity=maturity,
        )
        quote = mtdd_call(params, OptionSpec(strike=forward_price(params)), quad)
        ivs[i] = quote.equiv_implied_vol
    # Dates without a complete trailing window carry the first computable
    # quote; bias-study skips them anyway, but ingest wants positive vols.
    first = next(v for v in ivs if v is not None)
    ivs = [first if v is None else v for v in ivs]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "close", "implied_vol"])
        for d, close, iv in zip(dates, series.values, ivs):
            writer.writerow([d.isoformat(), format(close, ".6f"), format(iv, ".8f")])


def write_cap_skew_golden(path: Path) -> None:
    rc = cli_main(
        [
            "cap-skew",
            "--mode", "strike",
            "--output", str(path),
        ]
    )
    if rc != 0:
        raise SystemExit(f"cap-skew exited with {rc}")


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    write_gbm_daily(DATA_DIR / "gbm_daily.csv")
    write_gbm_with_iv(DATA_DIR / "gbm_with_iv.csv")
    write_cap_skew_golden(DATA_DIR / "cap_skew_strike_golden.csv")
    print(f"fixtures written to {DATA_DIR}")


if __name__ == "__main__":
    main()

"""Command-line surface for pricing, return analytics and model validation.

Exit codes: 0 success, 2 usage/configuration error, 3 data error,
4 numerical non-convergence or failed validation.
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from ._backend import backend_name
from .black import (
    CALL,
    PUT,
    MarketParams,
    OptionSpec,
    black_price,
    forward_price,
    implied_vol,
    relative_moneyness,
)
from .engine import (
    MODE_STRIKE,
    MODE_ZERO,
    MODES,
    QuadratureConfig,
    mtdd_call,
    mtdd_profile,
    mtdd_put,
)
from .distributions import norm_cdf, norm_pdf
from .errors import ConvergenceError, DataError
from .oracles import FdGrid, McConfig, fd_discount_solve, mc_mtdd_price
from .returns import (
    D_EVALS,
    D_EVAL_MIDPOINT,
    LOG_WINDOW,
    SCHEMES,
    XI_THEORETICAL,
    NormalizedReturnSeries,
    PriceSeries,
    distribution_stats,
    historical_vol,
    normalized_returns,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


@dataclass
class ExperimentConfig:
    """Validated grid specification for the cap-skew study."""

    mode: str
    maturities: tuple[float, ...]
    moneyness_grid: tuple[float, ...]
    vol_inputs: tuple[float, ...]
    seed: int
    output_path: Path | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.maturities or any(t <= 0 for t in self.maturities):
            raise ValueError("maturities must be a nonempty list of positive years")
        if not self.moneyness_grid or any(k >= 1 for k in self.moneyness_grid):
            raise ValueError(
                "moneyness values must be below 1 (strike K = F(1-k) must stay positive)"
            )
        if not self.vol_inputs or any(v <= 0 for v in self.vol_inputs):
            raise ValueError("vol inputs must be a nonempty list of positive vols")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, date):
        return x.isoformat()
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def _write_rows(stream, header, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(cell) for cell in row])


def _emit_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, header, rows)


def csv_ingest(path):
    """Parse a ``date,close[,implied_vol]`` file into a PriceSeries.

    Returns ``(series, implied_vols)`` where the second element is None when
    the optional column is absent.  Dates must be ISO-8601, strictly
    ascending and unique; closes and implied vols must be positive.  All
    problems raise :class:`DataError` naming the offending line.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            raw = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in raw if any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [c.strip().lower() for c in rows[0]]
    if header == ["date", "close"]:
        has_iv = False
    elif header == ["date", "close", "implied_vol"]:
        has_iv = True
    else:
        raise DataError(
            f"{path}: header must be 'date,close' or 'date,close,implied_vol', "
            f"got {','.join(rows[0])!r}"
        )
    dates: list[date] = []
    closes: list[float] = []
    ivs: list[float] = []
    prev = None
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(
                f"{path} line {line_no}: expected {len(header)} fields, got {len(row)}"
            )
        try:
            d = date.fromisoformat(row[0].strip())
        except ValueError as exc:
            raise DataError(f"{path} line {line_no}: bad date {row[0]!r}") from exc
        if prev is not None and d == prev:
            raise DataError(f"{path} line {line_no}: duplicate date {d.isoformat()}")
        if prev is not None and d < prev:
            raise DataError(f"{path} line {line_no}: dates must be ascending")
        prev = d
        try:
            c = float(row[1])
        except ValueError as exc:
            raise DataError(f"{path} line {line_no}: bad close {row[1]!r}") from exc
        if not math.isfinite(c) or c <= 0:
            raise DataError(f"{path} line {line_no}: close must be positive and finite")
        if has_iv:
            try:
                v = float(row[2])
            except ValueError as exc:
                raise DataError(
                    f"{path} line {line_no}: bad implied_vol {row[2]!r}"
                ) from exc
            if not math.isfinite(v) or v <= 0:
                raise DataError(
                    f"{path} line {line_no}: implied_vol must be positive and finite"
                )
            ivs.append(v)
        dates.append(d)
        closes.append(c)
    if len(dates) < 2:
        raise DataError(f"{path}: need at least 2 data rows, got {len(dates)}")
    series = PriceSeries(dates=dates, closes=np.array(closes))
    return series, (np.array(ivs) if has_iv else None)


def _market(args) -> MarketParams:
    return MarketParams(
        spot=args.spot,
        rate=args.rate,
        dividend=args.dividend,
        vol=args.vol,
        maturity=args.maturity,
    )


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(
        lower_bound_mode=args.mode,
        nodes=args.nodes,
        truncation_halfwidth=args.halfwidth,
        rel_tolerance=args.rel_tol,
    )


def _parse_floats(text: str, label: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ValueError(f"bad {label} list {text!r}") from exc


def _cmd_price(args) -> int:
    params = _market(args)
    spec = OptionSpec(strike=args.strike, kind=args.kind)
    quote = (mtdd_call if args.kind == CALL else mtdd_put)(params, spec, _quad(args))
    fwd = forward_price(params)
    k = relative_moneyness(fwd, spec.strike)
    bs = black_price(params, spec)
    print(f"mode             {args.mode}")
    print(f"option           {args.kind} K={_fmt(spec.strike)} T={_fmt(args.maturity)}")
    print(f"forward          {_fmt(fwd)}")
    print(f"moneyness        {_fmt(k)}")
    print(f"mtdd price       {_fmt(quote.price)}")
    equiv = _fmt(quote.equiv_implied_vol) if quote.equiv_implied_vol is not None else "n/a"
    print(f"equiv implied    {equiv}")
    print(f"black price      {_fmt(bs)}")
    if quote.degenerate:
        print("note: strike truncation removed the entire kernel window")
    if args.output:
        header = [
            "mode", "kind", "spot", "rate", "dividend", "vol", "maturity", "strike",
            "forward", "moneyness", "mtdd_price", "equiv_implied_vol", "black_price",
            "degenerate",
        ]
        row = [
            args.mode, args.kind, params.spot, params.rate, params.dividend,
            params.vol, params.maturity, spec.strike, fwd, k, quote.price,
            quote.equiv_implied_vol, bs, quote.degenerate,
        ]
        _emit_csv(args.output, header, [row])
    return EXIT_OK


def _cmd_profile(args) -> int:
    params = _market(args)
    spec = OptionSpec(strike=args.strike, kind=args.kind)
    elapsed = args.elapsed if args.elapsed is not None else args.maturity
    quad = _quad(args)
    fwd = forward_price(params)
    kernel_std = params.vol * math.sqrt(elapsed) if elapsed > 0 else 0.0
    offsets = np.linspace(-args.span, args.span, args.points)
    rows = []
    for x in offsets:
        s_ref = fwd * math.exp(x * kernel_std)
        value = mtdd_profile(s_ref, elapsed, params, spec, quad)
        rows.append((s_ref, elapsed, value))
    print(f"mode {args.mode}  {args.kind} K={_fmt(spec.strike)}  elapsed={_fmt(elapsed)}")
    print(f"{'s_ref':>16} {'value':>16}")
    for s_ref, _, value in rows:
        print(f"{_fmt(s_ref):>16} {_fmt(value):>16}")
    if args.output:
        _emit_csv(args.output, ["s_ref", "elapsed", "value"], rows)
    return EXIT_OK


_STATS_HEADER = [
    "scheme", "count", "mean", "stddev", "skewness", "excess_kurtosis",
    "tail_mass_2", "tail_mass_3", "fallback_steps", "degenerate",
]


def _cmd_analyze_returns(args) -> int:
    series, _ = csv_ingest(args.csv)
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    if not schemes:
        raise ValueError("no schemes requested")
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; choose from {', '.join(SCHEMES)}")
    dlog = np.diff(np.log(series.closes))
    results = []
    for scheme in schemes:
        if scheme == XI_THEORETICAL:
            vol = args.model_vol
            if vol is None:
                vol = float(dlog.std(ddof=1)) * math.sqrt(args.annualization)
            if vol <= 0:
                if np.any(dlog != 0):
                    raise DataError(
                        "sample volatility is zero but returns vary; supply --model-vol"
                    )
                nr = NormalizedReturnSeries(np.zeros(dlog.size), scheme)
            else:
                nr = normalized_returns(
                    series, scheme,
                    drift=args.drift, fixed_vol=vol,
                    annualization=args.annualization,
                    xi_sqrt2=not args.no_xi_sqrt2, log_sqrt2=args.log_sqrt2,
                    d_eval=args.d_eval,
                )
        else:
            nr = normalized_returns(
                series, scheme,
                drift=args.drift, window_days=args.window,
                annualization=args.annualization,
                xi_sqrt2=not args.no_xi_sqrt2, log_sqrt2=args.log_sqrt2,
                d_eval=args.d_eval,
            )
        stats = distribution_stats(nr, bins=args.bins)
        results.append((scheme, nr, stats))

    tail2_ref = 2.0 * norm_cdf(-2.0)
    tail3_ref = 2.0 * norm_cdf(-3.0)
    print(
        f"{'scheme':<18}{'count':>8}{'mean':>11}{'stddev':>11}{'skew':>11}"
        f"{'exkurt':>11}{'tail>2':>11}{'tail>3':>11}  flags"
    )
    for scheme, nr, st in results:
        flags = []
        if st.degenerate:
            flags.append("degenerate")
        if nr.fallback_indices:
            flags.append(f"log-fallback x{len(nr.fallback_indices)}")
        print(
            f"{scheme:<18}{st.count:>8}{st.mean:>11.4f}{st.stddev:>11.4f}"
            f"{st.skewness:>11.4f}{st.excess_kurtosis:>11.4f}"
            f"{st.tail_mass_2:>11.5f}{st.tail_mass_3:>11.5f}  {' '.join(flags)}"
        )
    print(
        f"{'normal_reference':<18}{'':>8}{0.0:>11.4f}{1.0:>11.4f}{0.0:>11.4f}"
        f"{0.0:>11.4f}{tail2_ref:>11.5f}{tail3_ref:>11.5f}"
    )

    if args.output:
        rows = [
            (
                scheme, st.count, st.mean, st.stddev, st.skewness,
                st.excess_kurtosis, st.tail_mass_2, st.tail_mass_3,
                len(nr.fallback_indices), st.degenerate,
            )
            for scheme, nr, st in results
        ]
        rows.append(
            ("normal_reference", None, 0.0, 1.0, 0.0, 0.0, tail2_ref, tail3_ref,
             None, False)
        )
        _emit_csv(args.output, _STATS_HEADER, rows)
    if args.histogram:
        hist_rows = []
        for scheme, _, st in results:
            widths = np.diff(st.bin_edges)
            centers = 0.5 * (st.bin_edges[:-1] + st.bin_edges[1:])
            total = st.counts.sum()
            for left, right, count, width, center in zip(
                st.bin_edges[:-1], st.bin_edges[1:], st.counts, widths, centers
            ):
                density = count / (total * width) if total else 0.0
                hist_rows.append(
                    (scheme, left, right, int(count), density, norm_pdf(center))
                )
        _emit_csv(
            args.histogram,
            ["scheme", "bin_left", "bin_right", "count", "density", "normal_density"],
            hist_rows,
        )
    return EXIT_OK


def _cmd_bias_study(args) -> int:
    series, market_ivs = csv_ingest(args.csv)
    if market_ivs is None:
        raise DataError("bias-study needs the implied_vol column in the input CSV")
    if args.maturity_days <= 0:
        raise ValueError(f"maturity-days must be positive, got {args.maturity_days}")
    maturity = args.maturity_days / args.annualization
    quad = _quad(args)
    n = series.closes.size
    window = args.window
    rows = []
    skipped = 0
    if n <= window:
        skipped = n
        estimates = []
    else:
        skipped = window
        estimates = historical_vol(series, window, args.annualization)
    for j, est in enumerate(estimates):
        i = window + j
        window_vol = est.sigma
        if window_vol <= 0:
            skipped += 1
            continue
        params = MarketParams(
            spot=float(series.closes[i]), rate=args.rate, dividend=0.0,
            vol=window_vol, maturity=maturity,
        )
        fwd = forward_price(params)
        quote = mtdd_call(params, OptionSpec(strike=fwd, kind=CALL), quad)
        model_iv = quote.equiv_implied_vol
        if model_iv is None:
            skipped += 1
            continue
        market_iv = float(market_ivs[i])
        rows.append(
            (
                series.dates[i], float(series.closes[i]), window_vol, model_iv,
                market_iv, window_vol / market_iv - 1.0, model_iv / market_iv - 1.0,
            )
        )
    print(f"mode {args.mode}  window {window}d  maturity {args.maturity_days}d")
    print(f"dates priced   {len(rows)}")
    print(f"dates skipped  {skipped}")
    if rows:
        win_err = float(np.mean([r[5] for r in rows]))
        mod_err = float(np.mean([r[6] for r in rows]))
        print(f"mean rel err, window vol   {_fmt(win_err)}")
        print(f"mean rel err, model vol    {_fmt(mod_err)}")
    else:
        print("mean rel err, window vol   n/a")
        print("mean rel err, model vol    n/a")
    if args.output:
        _emit_csv(
            args.output,
            [
                "date", "close", "window_vol", "model_implied_vol",
                "market_implied_vol", "window_rel_err", "model_rel_err",
            ],
            rows,
        )
    return EXIT_OK


_CAP_HEADER = [
    "maturity", "moneyness", "forward_vol", "price", "model_implied_vol",
    "vol_spread", "status",
]


def _cmd_cap_skew(args) -> int:
    cfg = ExperimentConfig(
        mode=args.mode,
        maturities=_parse_floats(args.maturities, "maturities"),
        moneyness_grid=_parse_floats(args.moneyness, "moneyness"),
        vol_inputs=_parse_floats(args.vols, "vols"),
        seed=args.seed,
        output_path=args.output,
    )
    if args.forward_rate <= 0:
        raise ValueError(f"forward-rate must be positive, got {args.forward_rate}")
    quad = _quad(args)
    fwd = args.forward_rate
    rows = []
    for maturity in cfg.maturities:
        for k in cfg.moneyness_grid:
            strike = fwd * (1.0 - k)
            for forward_vol in cfg.vol_inputs:
                # dividend == rate keeps the forward flat at the quoted rate
                # for every maturity, as pricing on a forward rate requires
                cell = MarketParams(
                    spot=fwd, rate=args.discount_rate, dividend=args.discount_rate,
                    vol=forward_vol, maturity=maturity,
                )
                quote = mtdd_call(cell, OptionSpec(strike=strike, kind=CALL), quad)
                model_iv = quote.equiv_implied_vol
                if quote.degenerate:
                    status = "degenerate"
                elif model_iv is None:
                    status = "no_implied_vol"
                else:
                    status = "ok"
                spread = model_iv - forward_vol if model_iv is not None else None
                rows.append(
                    (maturity, k, forward_vol, quote.price, model_iv, spread, status)
                )
    print(f"mode {args.mode}  forward {_fmt(fwd)}  discount {_fmt(args.discount_rate)}")
    print(
        f"{'T':>6} {'k':>7} {'fwd_vol':>8} {'price':>14} {'model_iv':>12} "
        f"{'spread':>12}  status"
    )
    for maturity, k, forward_vol, price, model_iv, spread, status in rows:
        iv_txt = _fmt(model_iv) if model_iv is not None else "n/a"
        sp_txt = _fmt(spread) if spread is not None else "n/a"
        print(
            f"{maturity:>6.3g} {k:>7.3g} {forward_vol:>8.3g} {_fmt(price):>14} "
            f"{iv_txt:>12} {sp_txt:>12}  {status}"
        )
    if args.output:
        _emit_csv(args.output, _CAP_HEADER, rows)
    return EXIT_OK


def _cmd_validate(args) -> int:
    checks = []

    quad_zero = QuadratureConfig(lower_bound_mode=MODE_ZERO)
    quad_strike = QuadratureConfig(lower_bound_mode=MODE_STRIKE)

    worst = 0.0
    for maturity in (0.25, 1.0, 3.0):
        for k in (-0.1, 0.0, 0.1):
            for vol in (0.1, 0.3):
                params = MarketParams(
                    spot=100.0, rate=0.03, dividend=0.0, vol=vol, maturity=maturity
                )
                spec = OptionSpec(strike=forward_price(params) * (1.0 - k))
                price = mtdd_call(params, spec, quad_zero).price
                doubled = MarketParams(
                    spot=100.0, rate=0.03, dividend=0.0,
                    vol=vol * math.sqrt(2.0), maturity=maturity,
                )
                ref = black_price(doubled, spec)
                worst = max(worst, abs(price / ref - 1.0))
    checks.append(("closed_form_collapse", "max_rel_err", worst, 1e-8))

    atm = MarketParams(spot=100.0, rate=0.05, dividend=0.0, vol=0.2, maturity=1.0)
    atm_spec = OptionSpec(strike=forward_price(atm))
    for mode, quad, offset in (
        (MODE_ZERO, quad_zero, 0),
        (MODE_STRIKE, quad_strike, 1),
    ):
        price = mtdd_call(atm, atm_spec, quad).price
        mc_price, stderr = mc_mtdd_price(
            atm, atm_spec, mode, McConfig(paths=args.paths, seed=args.seed + offset)
        )
        z = abs(mc_price - price) / stderr
        checks.append((f"mc_{mode}", "z_score", z, 3.0))

    grid = FdGrid(zeta_halfwidth=8.0, space_steps=args.grid, time_steps=args.grid)
    solution = fd_discount_solve(atm, atm_spec, grid)
    profile = mtdd_profile(
        forward_price(atm), atm.maturity, atm, atm_spec, quad_zero
    )
    checks.append(
        ("fd_center", "rel_err", abs(solution.center_value / profile - 1.0), 1e-3)
    )

    parity_spec_call = OptionSpec(strike=90.0, kind=CALL)
    parity_spec_put = OptionSpec(strike=90.0, kind=PUT)
    call_price = mtdd_call(atm, parity_spec_call, quad_zero).price
    put_price = mtdd_put(atm, parity_spec_put, quad_zero).price
    target = atm.discount * (forward_price(atm) - 90.0)
    checks.append(
        ("parity_zero", "rel_err", abs((call_price - put_price) - target) / abs(target), 1e-9)
    )

    tiny = MarketParams(spot=100.0, rate=0.05, dividend=0.0, vol=1e-4, maturity=1.0)
    worst_abs = 0.0
    for strike in (90.0, 110.0):
        intrinsic = tiny.discount * max(forward_price(tiny) - strike, 0.0)
        for quad in (quad_strike, quad_zero):
            price = mtdd_call(tiny, OptionSpec(strike=strike), quad).price
            worst_abs = max(worst_abs, abs(price - intrinsic))
    checks.append(("degenerate_intrinsic", "max_abs_err", worst_abs, 1e-6))

    rng = np.random.Generator(np.random.PCG64(args.seed))
    worst_iv = 0.0
    for _ in range(200):
        vol = float(rng.uniform(0.05, 1.5))
        maturity = float(rng.uniform(0.1, 3.0))
        # strikes within 3 total standard deviations of the forward, where
        # vega stays resolvable and the vol is identifiable from the price
        d = float(rng.uniform(-3.0, 3.0))
        params = MarketParams(
            spot=100.0, rate=0.02, dividend=0.0, vol=vol, maturity=maturity
        )
        fwd = forward_price(params)
        spec = OptionSpec(strike=fwd * math.exp(-d * vol * math.sqrt(maturity)))
        recovered = implied_vol(black_price(params, spec), params, spec)
        worst_iv = max(worst_iv, abs(recovered - vol))
    checks.append(("implied_vol_roundtrip", "max_abs_err", worst_iv, 1e-8))

    rows = [
        (name, metric, value, threshold, "pass" if value <= threshold else "fail")
        for name, metric, value, threshold in checks
    ]
    _write_rows(sys.stdout, ["check", "metric", "value", "threshold", "status"], rows)
    if args.output:
        _emit_csv(args.output, ["check", "metric", "value", "threshold", "status"], rows)
    failed = sum(1 for row in rows if row[4] == "fail")
    if failed:
        print(f"{failed} validation check(s) failed", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"all {len(rows)} checks passed ({backend_name()} backend)", file=sys.stderr)
    return EXIT_OK


def _add_market_args(parser):
    parser.add_argument("--spot", type=float, required=True, help="spot price")
    parser.add_argument("--rate", type=float, default=0.0, help="flat discount rate")
    parser.add_argument("--dividend", type=float, default=0.0, help="flat dividend yield")
    parser.add_argument("--vol", type=float, required=True, help="annualized volatility")
    parser.add_argument(
        "--maturity", type=float, required=True, help="years to maturity"
    )
    parser.add_argument("--strike", type=float, required=True, help="option strike")
    parser.add_argument(
        "--kind", choices=(CALL, PUT), default=CALL, help="option kind"
    )


def _add_quad_args(parser):
    parser.add_argument(
        "--nodes", type=int, default=256, help="starting quadrature node count"
    )
    parser.add_argument(
        "--halfwidth", type=float, default=8.0,
        help="integration window, in kernel standard deviations",
    )
    parser.add_argument(
        "--rel-tol", type=float, default=1e-9,
        help="relative tolerance for quadrature refinement",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtdd",
        description="Mirror-time diffusion discount option pricing and analytics.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--mode", choices=MODES, default=MODE_STRIKE,
        help="lower integration bound convention (default: %(default)s)",
    )
    common.add_argument(
        "--seed", type=int, default=0,
        help="seed for stochastic steps (default: %(default)s)",
    )
    common.add_argument(
        "--output", type=Path, default=None, metavar="PATH",
        help="write machine-readable CSV to PATH",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser(
        "price", parents=[common], help="price one option under the kernel average"
    )
    _add_market_args(p)
    _add_quad_args(p)
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser(
        "profile", parents=[common],
        help="adjusted-to-maturity value across reference prices",
    )
    _add_market_args(p)
    _add_quad_args(p)
    p.add_argument(
        "--elapsed", type=float, default=None,
        help="mirror-time elapsed in years (default: maturity)",
    )
    p.add_argument("--points", type=int, default=21, help="grid size")
    p.add_argument(
        "--span", type=float, default=3.0,
        help="grid half-width in kernel standard deviations",
    )
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser(
        "analyze-returns", parents=[common],
        help="normalized-return distribution diagnostics from a close series",
    )
    p.add_argument("csv", type=Path, help="input CSV with date,close columns")
    p.add_argument(
        "--schemes", default=",".join(SCHEMES),
        help="comma list of normalization schemes (default: all)",
    )
    p.add_argument("--window", type=int, default=90, help="trailing vol window, days")
    p.add_argument("--drift", type=float, default=0.0, help="model drift mu")
    p.add_argument(
        "--model-vol", type=float, default=None,
        help="fixed vol for xi_theoretical (default: full-sample realized)",
    )
    p.add_argument("--annualization", type=int, default=252)
    p.add_argument("--bins", type=int, default=50, help="histogram bin count")
    p.add_argument(
        "--d-eval", choices=D_EVALS, default=D_EVAL_MIDPOINT,
        help="where the diffusion coefficient is evaluated on each step",
    )
    p.add_argument(
        "--no-xi-sqrt2", action="store_true",
        help="drop the sqrt(2) factor from the xi normalizers",
    )
    p.add_argument(
        "--log-sqrt2", action="store_true",
        help="include a sqrt(2) factor in the log normalizer",
    )
    p.add_argument(
        "--histogram", type=Path, default=None, metavar="PATH",
        help="write histogram CSV to PATH",
    )
    p.set_defaults(func=_cmd_analyze_returns)

    p = sub.add_parser(
        "bias-study", parents=[common],
        help="window-vol vs model-vol bias against quoted implied vols",
    )
    p.add_argument("csv", type=Path, help="input CSV with date,close,implied_vol")
    p.add_argument("--window", type=int, default=90, help="trailing vol window, days")
    p.add_argument(
        "--maturity-days", type=int, default=30, help="option maturity in trading days"
    )
    p.add_argument("--rate", type=float, default=0.0, help="flat discount rate")
    p.add_argument("--annualization", type=int, default=252)
    _add_quad_args(p)
    p.set_defaults(func=_cmd_bias_study)

    p = sub.add_parser(
        "cap-skew", parents=[common],
        help="model implied-vol surface on a maturity/moneyness/vol grid",
    )
    p.add_argument(
        "--maturities", default="0.25,0.5,1,2,5", help="comma list of years"
    )
    p.add_argument(
        "--moneyness", default="-0.2,-0.1,0,0.1,0.2",
        help="comma list of relative moneyness values (K = F(1-k))",
    )
    p.add_argument("--vols", default="0.1,0.2,0.3", help="comma list of forward vols")
    p.add_argument(
        "--forward-rate", type=float, default=0.05, help="underlying forward rate"
    )
    p.add_argument("--discount-rate", type=float, default=0.0)
    _add_quad_args(p)
    p.set_defaults(func=_cmd_cap_skew)

    p = sub.add_parser(
        "validate", parents=[common],
        help="internal cross-checks; CSV report on stdout",
    )
    p.add_argument(
        "--paths", type=int, default=200_000, help="Monte Carlo paths per check"
    )
    p.add_argument(
        "--grid", type=int, default=400, help="finite-difference steps per axis"
    )
    _add_quad_args(p)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 the null is not rejected, 2 it is rejected, 1 any error
(bad arguments, unreadable data, domain violations).
"""
import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .distributions import NULL_FAMILIES, Sample, parse_family
from .el_core import chi2_quantile, default_m, el_statistic, el_test
from .errors import DomainError, LsgofError
from .kmt_core import KMT_CRITICAL_VALUES, kmt_statistic, kmt_test
from .numerics import regularized_gamma_lower
from .simulation import desk_config, paper_config, run_study, validate_config


@dataclass(frozen=True)
class TestReport:
    method: str
    null_family: str
    n: int
    mu_hat: float
    sigma_hat: float
    statistic: float
    alpha: float
    critical_value: float
    reject: bool
    df: int = None        # EL only
    p_value: float = None  # EL only; KMT reports a bound instead
    p_bound: str = None

    def as_dict(self):
        d = {
            "method": self.method,
            "null": self.null_family,
            "n": self.n,
            "mu_hat": self.mu_hat,
            "sigma_hat": self.sigma_hat,
            "statistic": self.statistic,
            "alpha": self.alpha,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "decision": "reject" if self.reject else "accept",
        }
        if self.df is not None:
            d["df"] = self.df
        if self.p_value is not None:
            d["p_value"] = self.p_value
        if self.p_bound is not None:
            d["p_bound"] = self.p_bound
        return d

    def render(self):
        lines = [
            "method:         %s" % self.method.upper(),
            "null family:    %s" % self.null_family,
            "n:              %d" % self.n,
            "estimate:       mu_hat=%.6g  sigma_hat=%.6g" % (self.mu_hat, self.sigma_hat),
            "statistic:      %.6g" % self.statistic,
        ]
        if self.df is not None:
            lines.append("df:             %d" % self.df)
        lines.append("critical value: %.4f  (alpha=%g)" % (self.critical_value, self.alpha))
        if self.p_value is not None:
            lines.append("p-value:        %.4g" % self.p_value)
        if self.p_bound is not None:
            lines.append("p-value bound:  %s" % self.p_bound)
        lines.append("decision:       %s" % ("reject" if self.reject else "accept"))
        return "\n".join(lines)


def read_data(path):
    """One float per line; '#' starts a comment; blank lines ignored."""
    try:
        with open(path, "r") as fh:
            raw = fh.readlines()
    except OSError as e:
        raise DomainError("cannot read data file: %s" % e)
    vals = []
    for lineno, line in enumerate(raw, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            vals.append(float(body))
        except ValueError:
            raise DomainError("line %d of %s is not a number: %r" % (lineno, path, body))
    if not vals:
        raise DomainError("data file %s contains no observations" % path)
    return np.asarray(vals, dtype=np.float64)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser():
    p = _Parser(prog="lsgof",
                description="Goodness-of-fit tests for location-scale families")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test a data file against a null family")
    t.add_argument("data", help="path to newline-delimited float data")
    t.add_argument("--null", choices=["normal", "logistic"], default="normal")
    t.add_argument("--method", choices=["kmt", "el1", "el2"], default="kmt")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--json", action="store_true", help="emit the report as JSON")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="run a Monte Carlo level/power study")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--config", help="path to a study config JSON")
    g.add_argument("--paper-defaults", action="store_true",
                   help="full published grid, R=1000")
    g.add_argument("--desk", action="store_true", help="same grid, R=200")
    s.add_argument("--seed", type=int, default=None, help="override the master seed")
    s.add_argument("--out", default=".", help="output directory")
    s.add_argument("--workers", type=int, default=None,
                   help="parallel worker processes (default: serial)")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("critical-values", help="print the critical-value table")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_critical_values)
    return p


def cmd_test(args):
    data = read_data(args.data)
    s = Sample(data)
    family = parse_family(args.null)
    if family not in NULL_FAMILIES:
        raise DomainError("--null must be normal or logistic")
    if args.method == "kmt":
        ks = kmt_statistic(family, s)
        outcome = kmt_test(ks.statistic, args.alpha, estimate=ks.estimate)
        bound = ("p < %g" if outcome.reject else "p >= %g") % args.alpha
        report = TestReport(
            method="kmt", null_family=family.value, n=s.n,
            mu_hat=ks.estimate.mu_hat, sigma_hat=ks.estimate.sigma_hat,
            statistic=outcome.statistic, alpha=outcome.alpha,
            critical_value=outcome.critical_value, reject=outcome.reject,
            p_bound=bound)
    else:
        es = el_statistic(family, s, variant=args.method)
        outcome = el_test(es.statistic, es.df, args.alpha,
                          variant=args.method, m=es.m)
        if es.statistic == float("inf"):
            pval = 0.0
        else:
            pval = 1.0 - regularized_gamma_lower(0.5 * es.df, 0.5 * es.statistic)
        report = TestReport(
            method=args.method, null_family=family.value, n=s.n,
            mu_hat=es.estimate.mu_hat, sigma_hat=es.estimate.sigma_hat,
            statistic=outcome.statistic, alpha=args.alpha,
            critical_value=outcome.critical_value, reject=outcome.reject,
            df=es.df, p_value=pval)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        print(report.render())
    return 2 if report.reject else 0


def cmd_simulate(args):
    if args.config:
        try:
            with open(args.config, "r") as fh:
                cfg = json.load(fh)
        except OSError as e:
            raise DomainError("cannot read config: %s" % e)
        except json.JSONDecodeError as e:
            raise DomainError("config is not valid JSON: %s" % e)
    elif args.paper_defaults:
        cfg = paper_config()
    else:
        cfg = desk_config()
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg = dict(cfg)
    cfg.pop("workers", None)
    validate_config(cfg)
    table = run_study(cfg, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "power_table.csv")
    txt_path = os.path.join(args.out, "power_table.txt")
    meta_path = os.path.join(args.out, "metadata.json")
    with open(csv_path, "w") as fh:
        fh.write(table.to_csv())
    with open(txt_path, "w") as fh:
        fh.write(table.to_text())
    with open(meta_path, "w") as fh:
        fh.write(table.metadata_json())
    print("wrote %s" % csv_path)
    print("wrote %s" % txt_path)
    print("wrote %s" % meta_path)
    return 0


_CV_NS = (50, 100, 200, 500)


def cmd_critical_values(args):
    el_rows = []
    for n in _CV_NS:
        for variant in ("el1", "el2"):
            m = default_m(n, variant)
            df = m - 2
            el_rows.append({
                "n": n, "variant": variant, "m": m, "df": df,
                "cv_0.05": chi2_quantile(df, 0.95),
                "cv_0.01": chi2_quantile(df, 0.99),
            })
    if args.json:
        payload = {
            "kmt": {"0.05": KMT_CRITICAL_VALUES[0.05], "0.01": KMT_CRITICAL_VALUES[0.01]},
            "el": el_rows,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    print("KMT sup-statistic critical values (any null family, any n):")
    print("  alpha=0.05: %.2f" % KMT_CRITICAL_VALUES[0.05])
    print("  alpha=0.01: %.2f" % KMT_CRITICAL_VALUES[0.01])
    print("")
    print("EL chi-square critical values; m = floor(n^(1/3)) + 1 (el1) or + 2 (el2),")
    print("df = m - 2 (two estimated parameters):")
    print("  %5s  %7s  %3s  %3s  %12s  %12s" % ("n", "variant", "m", "df",
                                                "alpha=0.05", "alpha=0.01"))
    for r in el_rows:
        print("  %5d  %7s  %3d  %3d  %12.4f  %12.4f"
              % (r["n"], r["variant"], r["m"], r["df"], r["cv_0.05"], r["cv_0.01"]))
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        sys.stderr.write("usage error: %s\n" % e)
        return 1
    try:
        return args.func(args)
    except LsgofError as e:
        sys.stderr.write("error: %s\n" % e)
        return 1
    except OSError as e:
        sys.stderr.write("error: %s\n" % e)
        return 1


if __name__ == "__main__":
    sys.exit(main())

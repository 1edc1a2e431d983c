"""Monte Carlo harness: empirical levels and powers on a cell grid.

A cell is (null family, true distribution, n, alpha, replications, seed).
Every replication draws one sample and feeds it to all three methods, so
the per-sample comparison between methods is paired.  Seeds are derived
from (master seed, data-cell key, replication index), never drawn
sequentially, which makes serial and parallel runs bit-identical.  The
data-cell key deliberately excludes alpha: cells differing only in level
reuse the same samples and simply re-threshold the statistics.
"""
import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .distributions import (Distribution, Family, NULL_FAMILIES,
                            from_config, parse_family, sample)
from .el_core import chi2_quantile, constraint_matrix, default_m, solve_dual
from .errors import (DomainError, InfeasibleConstraintsError, LsgofError)
from .estimation import mle, standardize
from .kmt_core import KMT_CRITICAL_VALUES, transformed_process
from .numerics import derive_seed

METHODS = ("kmt", "el1", "el2")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class SimulationCell:
    null_family: Family
    truth: Distribution
    n: int
    alpha: float
    replications: int
    master_seed: int

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if self.n < 27:
            raise DomainError("cells run the EL variants, which need n >= 27")
        if self.null_family not in NULL_FAMILIES:
            raise DomainError("null_family must be normal or logistic")


@dataclass(frozen=True)
class CellResult:
    cell: SimulationCell
    rates: dict
    stderr: dict
    failures: dict
    effective: dict


@dataclass(frozen=True)
class PowerTable:
    rows: list
    metadata: dict = field(default_factory=dict)

    def to_csv(self):
        cols = ["null", "truth", "n", "method", "alpha", "kind",
                "rate", "stderr", "failures", "reps"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([r["null"], r["truth"], r["n"], r["method"],
                        "%g" % r["alpha"], r["kind"],
                        _fmt(r["rate"]), _fmt(r["stderr"]),
                        r["failures"], r["reps"]])
        return buf.getvalue()

    def to_text(self):
        alphas = sorted({r["alpha"] for r in self.rows}, reverse=True)
        heads = ["%s a=%g" % (m.upper(), a) for a in alphas for m in METHODS]
        out = []
        for null in _stable_unique(r["null"] for r in self.rows):
            out.append("null family: %s" % null)
            w0 = max([len("truth")] + [len(r["truth"]) for r in self.rows])
            out.append("  ".join(["truth".ljust(w0), "n".rjust(4), "kind".ljust(5)]
                                 + [h.rjust(10) for h in heads]))
            for truth, n in _stable_unique((r["truth"], r["n"]) for r in self.rows
                                           if r["null"] == null):
                sel = {(r["method"], r["alpha"]): r for r in self.rows
                       if r["null"] == null and r["truth"] == truth and r["n"] == n}
                kind = next(iter(sel.values()))["kind"]
                cells = [_fmt(sel[(m, a)]["rate"]) if (m, a) in sel else "-"
                         for a in alphas for m in METHODS]
                out.append("  ".join([truth.ljust(w0), str(n).rjust(4), kind.ljust(5)]
                                     + [c.rjust(10) for c in cells]))
            out.append("")
        return "\n".join(out)

    def metadata_json(self):
        return json.dumps(self.metadata, indent=2, sort_keys=True) + "\n"


def _fmt(x):
    return "nan" if (isinstance(x, float) and math.isnan(x)) else "%.6f" % x


def _stable_unique(it):
    seen = []
    for x in it:
        if x not in seen:
            seen.append(x)
    return seen


def describe_distribution(d):
    """Compact stable label used in table rows and cell keys."""
    if d.family is Family.NORMAL_MIXTURE:
        return "mtn(w=%g,loc=%g,s1=%g,s2=%g)" % (d.weight, d.location, d.scale, d.scale2)
    return "%s(%g,%g)" % (d.family.value, d.location, d.scale)


def _data_key(null_family, truth, n):
    # FNV-1a over the canonical cell description; alpha intentionally absent
    s = "%s|%s|%d" % (null_family.value, describe_distribution(truth), n)
    h = _FNV_OFFSET
    for b in s.encode("ascii"):
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def replication_statistics(null_family, truth, n, master_seed, r):
    """All three raw statistics for one replication; NaN marks a failure.

    EL infeasibility is not a failure: it maps to +inf (certain rejection).
    """
    seed = derive_seed(master_seed, _data_key(null_family, truth, n), r)
    s = sample(truth, n, seed)
    out = {}
    try:
        est = mle(null_family, s)
    except LsgofError:
        return {m: math.nan for m in METHODS}
    try:
        resid = standardize(s, est)
        out["kmt"] = transformed_process(null_family, resid).statistic
    except LsgofError:
        out["kmt"] = math.nan
    for variant in ("el1", "el2"):
        try:
            cm = constraint_matrix(null_family, s, est, default_m(n, variant))
            out[variant] = solve_dual(cm).statistic
        except InfeasibleConstraintsError:
            out[variant] = math.inf
        except LsgofError:
            out[variant] = math.nan
    return out


def _critical_values(n, alpha):
    if alpha not in KMT_CRITICAL_VALUES:
        raise DomainError("alpha must be 0.05 or 0.01 (tabulated critical values)")
    return {
        "kmt": KMT_CRITICAL_VALUES[alpha],
        "el1": chi2_quantile(default_m(n, "el1") - 2, 1.0 - alpha),
        "el2": chi2_quantile(default_m(n, "el2") - 2, 1.0 - alpha),
    }


def run_replication(cell, r):
    """Per-method reject flags for replication r; None marks a failure."""
    stats = replication_statistics(cell.null_family, cell.truth, cell.n,
                                   cell.master_seed, r)
    cvs = _critical_values(cell.n, cell.alpha)
    return {m: (None if math.isnan(stats[m]) else stats[m] > cvs[m])
            for m in METHODS}


def _compute_data_cell(null_family, truth, n, replications, master_seed):
    cols = {m: np.empty(replications) for m in METHODS}
    for r in range(replications):
        st = replication_statistics(null_family, truth, n, master_seed, r)
        for m in METHODS:
            cols[m][r] = st[m]
    return cols


def _aggregate(cell, stat_columns):
    cvs = _critical_values(cell.n, cell.alpha)
    rates, errs, fails, effs = {}, {}, {}, {}
    for m in METHODS:
        arr = stat_columns[m]
        failed = np.isnan(arr)
        eff = int(arr.size - failed.sum())
        fails[m] = int(failed.sum())
        effs[m] = eff
        if eff == 0:
            rates[m] = math.nan
            errs[m] = math.nan
            continue
        p = float(np.sum(arr[~failed] > cvs[m])) / eff
        rates[m] = p
        errs[m] = math.sqrt(p * (1.0 - p) / eff)
    return CellResult(cell=cell, rates=rates, stderr=errs, failures=fails, effective=effs)


def run_cell(cell):
    """Aggregate rejection rates over all replications of one cell."""
    cols = _compute_data_cell(cell.null_family, cell.truth, cell.n,
                              cell.replications, cell.master_seed)
    return _aggregate(cell, cols)


# ---------------------------------------------------------------------------
# study orchestration
# ---------------------------------------------------------------------------

_CONFIG_KEYS = ("nulls", "truths", "n", "alphas", "replications", "seed")


def validate_config(config):
    """Normalize a study config dict; DomainError names any offending key."""
    if not isinstance(config, dict):
        raise DomainError("config must be a JSON object")
    for key in _CONFIG_KEYS:
        if key not in config:
            raise DomainError("config is missing required key %r" % key)
    unknown = set(config) - set(_CONFIG_KEYS) - {"workers"}
    if unknown:
        raise DomainError("config has unknown key %r" % sorted(unknown)[0])
    def coerce(key, fn, v):
        try:
            return fn(v)
        except (TypeError, ValueError):
            raise DomainError("key %r: invalid value %r" % (key, v))

    nulls = [parse_family(v) for v in config["nulls"]]
    for fam in nulls:
        if fam not in NULL_FAMILIES:
            raise DomainError("key 'nulls': %r is not a testable null family" % fam.value)
    truths = [from_config(v) for v in config["truths"]]
    ns = [coerce("n", int, v) for v in config["n"]]
    if not ns or any(v < 27 for v in ns):
        raise DomainError("key 'n': every sample size must be >= 27")
    alphas = [coerce("alphas", float, a) for a in config["alphas"]]
    for a in alphas:
        if a not in KMT_CRITICAL_VALUES:
            raise DomainError("key 'alphas': only 0.05 and 0.01 are tabulated")
    reps = coerce("replications", int, config["replications"])
    if reps < 1:
        raise DomainError("key 'replications': must be >= 1")
    seed = coerce("seed", int, config["seed"])
    if not nulls:
        raise DomainError("key 'nulls': need at least one null family")
    if not truths:
        raise DomainError("key 'truths': need at least one true distribution")
    if not alphas:
        raise DomainError("key 'alphas': need at least one level")
    return {"nulls": nulls, "truths": truths, "n": ns, "alphas": alphas,
            "replications": reps, "seed": seed}


def paper_config(seed=1729):
    """The full published study grid: 2 nulls x 6 truths x 4 n x 2 alpha, R=1000."""
    truths = [
        {"family": "normal", "location": 2, "scale": 5},
        {"family": "logistic", "location": 2, "scale": 5},
        {"family": "stt", "location": 2, "scale": 5},
        {"family": "cauchy", "location": 2, "scale": 5},
        {"family": "laplace", "location": 2, "scale": 5},
        {"family": "mtn"},
    ]
    return {"nulls": ["normal", "logistic"], "truths": truths,
            "n": [50, 100, 200, 500], "alphas": [0.05, 0.01],
            "replications": 1000, "seed": seed}


def desk_config(seed=1729):
    """Same grid at R=200 for quick runs."""
    cfg = paper_config(seed)
    cfg["replications"] = 200
    return cfg


def _worker(args):
    null_family, truth, n, reps, seed = args
    return _compute_data_cell(null_family, truth, n, reps, seed)


def run_study(config, workers=None):
    """Run the full cross product and assemble a PowerTable.

    Statistics are computed once per (null, truth, n) data cell and
    re-thresholded for each alpha.  Identical (config, seed) give a
    bit-identical table regardless of `workers`.
    """
    cfg = validate_config(config)
    reps = cfg["replications"]
    seed = cfg["seed"]
    data_cells = [(null, truth, n)
                  for null in cfg["nulls"]
                  for truth in cfg["truths"]
                  for n in cfg["n"]]
    jobs = [(null, truth, n, reps, seed) for null, truth, n in data_cells]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            computed = list(ex.map(_worker, jobs))
    else:
        computed = [_worker(j) for j in jobs]

    rows = []
    for (null, truth, n), cols in zip(data_cells, computed):
        kind = "level" if truth.family is null else "power"
        for alpha in cfg["alphas"]:
            cell = SimulationCell(null_family=null, truth=truth, n=n,
                                  alpha=alpha, replications=reps, master_seed=seed)
            res = _aggregate(cell, cols)
            for m in METHODS:
                rows.append({
                    "null": null.value,
                    "truth": describe_distribution(truth),
                    "n": n,
                    "method": m,
                    "alpha": alpha,
                    "kind": kind,
                    "rate": res.rates[m],
                    "stderr": res.stderr[m],
                    "failures": res.failures[m],
                    "reps": res.effective[m],
                })
    meta = {
        "seed": seed,
        "replications": reps,
        "nulls": [f.value for f in cfg["nulls"]],
        "truths": [describe_distribution(t) for t in cfg["truths"]],
        "n": cfg["n"],
        "alphas": cfg["alphas"],
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    return PowerTable(rows=rows, metadata=meta)

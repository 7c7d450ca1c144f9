"""Multi-observatory DDoS inference and cross-observatory analysis.

Thin wrappers over the C++ core in ``ddoscope._core``. Attack events are
dicts with the attacks.csv field names; addresses, prefixes and dates are
strings; weekly series are lists of floats with ``None`` for missing weeks.
"""

import json
import os

from . import _core
from ._core import (
    ConfigError,
    DataError,
    Error,
    InvariantError,
    aggregate_carpet,
    classify_trend,
    ewma,
    linreg_trend,
    min_detectable_rate,
    normalize,
    pearson,
    quarterly_correlations,
    read_attacks,
    spearman,
    target_digest,
    weekly_counts,
    write_attacks,
)

__version__ = _core.__version__

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "InvariantError",
    "aggregate_carpet",
    "classify_trend",
    "detect_flow",
    "detect_honeypot",
    "detect_telescope",
    "ewma",
    "federated_confirm",
    "linreg_trend",
    "min_detectable_rate",
    "normalize",
    "pearson",
    "quarterly_correlations",
    "read_attacks",
    "run_pipeline",
    "spearman",
    "synth",
    "target_digest",
    "upset",
    "weekly_counts",
    "write_attacks",
]


def _as_json(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def _paths(paths):
    if isinstance(paths, (str, os.PathLike)):
        return [paths]
    return list(paths)


def detect_telescope(path, n_addresses=None, config=None, threads=1):
    """RSDoS events from a telescope packets.csv.

    ``config`` takes the telescope config document (dict or JSON text);
    ``n_addresses`` fills in its only required key.
    """
    cfg = dict(json.loads(_as_json(config)) if config is not None else {})
    if n_addresses is not None:
        cfg["n_addresses"] = n_addresses
    return _core.detect_telescope(os.fspath(path), json.dumps(cfg), threads)


def detect_honeypot(paths, preset="hopscotch", observatory=None, merge_gap_s=None, newkid_prefix_len=24):
    """Reflection events from honeypot request logs (files or directories of CSVs)."""
    return _core.detect_honeypot(_paths(paths), preset, observatory or preset, merge_gap_s, newkid_prefix_len)


def detect_flow(path, observatory="flow", ampl_ports=None):
    """RA/DP events from a flows.csv of IXP flow summaries."""
    ports = set(ampl_ports) if ampl_ports is not None else None
    return _core.detect_flow(os.fspath(path), observatory, ports)


def _set_list(sets):
    return [(name, [(str(d), str(ip)) for d, ip in tuples]) for name, tuples in sets.items()]


def upset(sets):
    """Exclusive intersection counts for ``{name: [(date, ip), ...]}``.

    Returns ``{subset label: count}`` over every non-empty subset.
    """
    return {label: count for label, _, count in _core.upset(_set_list(sets))}


def federated_confirm(sets, digests, salt):
    """Share of each subset's exclusive targets confirmed by external digests.

    Returns ``{subset label: (tuples, confirmed, share)}``.
    """
    rows = _core.federated_confirm(_set_list(sets), list(digests), salt)
    return {label: (tuples, confirmed, share) for label, tuples, confirmed, share in rows}


def synth(scenario, out_dir, threads=1):
    """Writes synthetic observatory inputs; returns the ground truth list."""
    return json.loads(_core.synth(_as_json(scenario), os.fspath(out_dir), threads))


def run_pipeline(config, out_dir=None, parallelism=None, base_dir=None):
    """Runs the full pipeline and returns the bundle manifest.

    ``config`` is a path to a pipeline config, a dict, or JSON text. Relative
    paths inside it resolve against the config file's directory, or
    ``base_dir`` for in-memory configs.
    """
    if isinstance(config, os.PathLike) or (isinstance(config, str) and not config.lstrip().startswith("{")):
        path = os.fspath(config)
        with open(path, encoding="utf-8") as f:
            text = f.read()
        base = base_dir or os.path.dirname(os.path.abspath(path))
    else:
        text = _as_json(config)
        base = base_dir or os.getcwd()
    out = os.fspath(out_dir) if out_dir is not None else None
    return json.loads(_core.run_pipeline(text, base, out, parallelism))

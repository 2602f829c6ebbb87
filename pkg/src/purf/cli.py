"""``purf-lab``: run a named experiment from a ``key = value`` config file.

Usage::

    purf-lab <experiment> --config FILE [--seed S] [--out PATH]
             [--format csv|json] [--threads T] [--model NAME] [--sigma X]
             [--noise gaussian|uniform] [--n LIST] [--k LIST] [--q LIST]
             [--replicates R] [--partitions P] [--mc-samples S]

Exit codes: 0 success, 1 bad configuration, 2 an empirical bias exceeded its
exact bound, 3 output could not be written.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import List

from .experiments import COLUMNS, EXPERIMENTS, RUNNERS
from .model import CATALOG_NAMES, NOISE_KINDS

EXIT_OK, EXIT_CONFIG, EXIT_BOUND, EXIT_IO = 0, 1, 2, 3

FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    model: str = "linear-uniform"
    sigma: float = 1.0
    noise: str = "gaussian"
    n: List[int] = field(default_factory=lambda: [10_000])
    k: List[int] = field(default_factory=lambda: [20])
    q: List[int] = field(default_factory=lambda: [100])
    replicates: int = 100
    partitions: int = 10
    mc_samples: int = 100_000
    out: str = ""
    format: str = "csv"
    threads: int = 1

    def provenance(self) -> dict:
        """Resolved settings that determine the output; excludes the output
        path and thread count, which must not change the bytes written."""
        d = asdict(self)
        d.pop("out")
        d.pop("threads")
        return d


_INT_LISTS = ("n", "k", "q")
_INTS = ("seed", "replicates", "partitions", "mc_samples", "threads")
_KEYS = {f for f in ExperimentConfig.__dataclass_fields__} - {"experiment"}


def _parse_value(key, raw):
    raw = str(raw).strip()
    try:
        if key in _INT_LISTS:
            vals = [int(v) for v in raw.replace(" ", "").split(",") if v]
            if not vals:
                raise ValueError
            return vals
        if key in _INTS:
            return int(raw)
        if key == "sigma":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    return raw


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        with open(path) as fh:
            parser.read_string("[purf]\n" + fh.read())
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"config: {exc}") from None
    return dict(parser["purf"])


def resolve(experiment: str, file_values: dict, overrides: dict) -> ExperimentConfig:
    """Merge file values with CLI overrides and validate every field."""
    if experiment not in RUNNERS:
        raise ConfigError(
            f"experiment: unknown name {experiment!r}; valid names: {', '.join(EXPERIMENTS)}"
        )
    merged = {}
    for key, raw in list(file_values.items()) + [(k, v) for k, v in overrides.items() if v is not None]:
        if key not in _KEYS:
            raise ConfigError(f"{key}: unknown key; valid keys: {', '.join(sorted(_KEYS))}")
        merged[key] = _parse_value(key, raw)
    if "seed" not in merged:
        raise ConfigError("seed: required (set it in the config file or pass --seed)")
    cfg = ExperimentConfig(experiment=experiment, **merged)
    if not cfg.out:
        cfg.out = f"{experiment}.{cfg.format}"
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.model not in CATALOG_NAMES:
        raise ConfigError(f"model: unknown {cfg.model!r}; valid names: {', '.join(CATALOG_NAMES)}")
    if cfg.noise not in NOISE_KINDS:
        raise ConfigError(f"noise: must be one of {', '.join(NOISE_KINDS)}")
    if cfg.format not in FORMATS:
        raise ConfigError(f"format: must be one of {', '.join(FORMATS)}")
    if not cfg.sigma >= 0:
        raise ConfigError("sigma: must be nonnegative")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed: must be an unsigned 64-bit integer")
    for key in _INT_LISTS:
        if any(v < 1 for v in getattr(cfg, key)):
            raise ConfigError(f"{key}: all grid values must be positive")
    if cfg.replicates < 2:
        raise ConfigError("replicates: need at least 2")
    for key in ("partitions", "mc_samples", "threads"):
        if getattr(cfg, key) < 1 or (key == "mc_samples" and cfg.mc_samples < 2):
            raise ConfigError(f"{key}: must be positive")
    if cfg.experiment == "m12" and any(v < 3 for v in cfg.k):
        raise ConfigError("k: the m12 experiment needs k >= 3")


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def render(cfg: ExperimentConfig, rows) -> str:
    cols = COLUMNS[cfg.experiment]
    if cfg.format == "json":
        doc = {"experiment": cfg.experiment, "config": cfg.provenance(),
               "rows": [{c: r[c] for c in cols} for r in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# purf-lab {cfg.experiment}\n")
    for key, val in cfg.provenance().items():
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        buf.write(f"# {key} = {val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def summary_table(cfg: ExperimentConfig, rows) -> str:
    cols = COLUMNS[cfg.experiment]
    cells = [[_short(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c)
              for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _short(v):
    return f"{v:.5g}" if isinstance(v, float) else str(v)


def run(cfg: ExperimentConfig, stdout=None) -> int:
    """Run the experiment, write the output file, print a summary; return
    the exit status."""
    stdout = stdout or sys.stdout
    rows, failures = RUNNERS[cfg.experiment](cfg)
    text = render(cfg, rows)
    try:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    print(summary_table(cfg, rows), file=stdout)
    print(f"wrote {len(rows)} rows to {cfg.out}", file=stdout)
    if failures:
        print(f"error: {failures} row(s) with bias above the exact bound", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="purf-lab", description="Uniform random tree and forest experiments.")
    ap.add_argument("experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    ap.add_argument("--config", help="key = value settings file")
    ap.add_argument("--seed")
    ap.add_argument("--out")
    ap.add_argument("--format")
    ap.add_argument("--threads")
    ap.add_argument("--model")
    ap.add_argument("--sigma")
    ap.add_argument("--noise")
    ap.add_argument("--n", help="comma-separated sample sizes")
    ap.add_argument("--k", help="comma-separated cut counts")
    ap.add_argument("--q", help="comma-separated forest sizes")
    ap.add_argument("--replicates")
    ap.add_argument("--partitions")
    ap.add_argument("--mc-samples", dest="mc_samples")
    return ap


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    experiment = args.pop("experiment")
    config_path = args.pop("config")
    try:
        file_values = read_config_file(config_path) if config_path else {}
        cfg = resolve(experiment, file_values, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

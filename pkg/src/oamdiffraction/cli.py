"""Command-line entry point: ``oamdiff {maps,overlap,concurrence,decompose,verify}``.

Configuration comes from a flat ``key = value`` file (SI units, ``#`` starts
a comment) and command-line flags, flags taking precedence. Every run writes
its outputs under names derived from a hash of the fully resolved
configuration, together with a JSON manifest echoing it.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import experiments as ex
from .analysis import (
    OVERLAP_IMAG_TOL,
    bg_spectrum,
    count_phase_singularities,
    default_bg_lattice,
    lg_spectrum,
)
from .entanglement import ConcurrenceDomainError, diffracted_pair
from .io import (
    CONCURRENCE_COLUMNS,
    OVERLAP_COLUMNS,
    SPECTRUM_COLUMNS,
    write_field_csv,
    write_manifest,
    write_pgm,
    write_rows,
)
from .modes import DEFAULT_RING_FACTOR, ModeSpec
from .verify import DEFAULT_TOLERANCES, run_invariants

log = logging.getLogger("oamdiffraction")

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_INVARIANT = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    grid: int = ex.GRID_SIZE
    window: float = ex.GRID_WINDOW
    family: str = "LG"
    l0: int = 1
    p: int = 0
    wavelength: float = ex.WAVELENGTH
    waist: Optional[float] = None
    kappa: float = ex.KAPPA
    bg_waist: float = ex.BG_WAIST
    ring_factor: float = DEFAULT_RING_FACTOR
    xi_over_a: Optional[float] = None
    a: float = ex.OBSTACLE_RADIUS
    m: int = ex.EDGE_ORDER
    edge: str = "smooth"
    d_over_a: Optional[float] = None
    d_min: float = 0.0
    d_max: float = ex.SWEEP_MAX
    samples: int = ex.SWEEP_SAMPLES
    z: float = ex.MAP_DISTANCE
    prominence: float = ex.PROMINENCE
    p_max: int = 10
    l_span: int = 5
    map_radius: float = 300e-6
    threads: int = 1
    format: str = "csv"
    out: str = "."
    tol_orthonormality: float = DEFAULT_TOLERANCES["orthonormality"]
    tol_bg_cross_l: float = DEFAULT_TOLERANCES["bg_cross_l"]
    tol_unitarity: float = DEFAULT_TOLERANCES["unitarity"]
    tol_semigroup: float = DEFAULT_TOLERANCES["semigroup"]
    tol_z_invariance: float = DEFAULT_TOLERANCES["z_invariance"]
    tol_oracle: float = DEFAULT_TOLERANCES["oracle"]
    tol_symmetry_zero: float = DEFAULT_TOLERANCES["symmetry_zero"]

    # keys that do not change any output and stay out of the content hash
    _UNHASHED = ("out", "threads")
    _POSITIVE = ("window", "wavelength", "waist", "kappa", "bg_waist", "ring_factor",
                 "xi_over_a", "a", "m", "z", "samples", "grid", "map_radius")

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def update(self, values: dict) -> "RunConfig":
        types = {f.name: f.type for f in dataclasses.fields(self)}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(self, key, _coerce(key, raw, types[key]))
        return self

    def validate(self) -> "RunConfig":
        for key in self._POSITIVE:
            v = getattr(self, key)
            if v is not None and not v > 0:
                raise ConfigError(f"config key {key!r} must be positive, got {v!r}")
        if self.family not in ("LG", "BG"):
            raise ConfigError(f"config key 'family' must be LG or BG, got {self.family!r}")
        if self.edge not in ("smooth", "hard"):
            raise ConfigError(f"config key 'edge' must be smooth or hard, got {self.edge!r}")
        if self.format not in ("csv", "csv+pgm"):
            raise ConfigError(f"config key 'format' must be csv or csv+pgm, got {self.format!r}")
        if self.l0 == 0:
            raise ConfigError("config key 'l0' must be nonzero")
        if self.grid & (self.grid - 1):
            raise ConfigError(f"config key 'grid' must be a power of two, got {self.grid}")
        if self.samples < 2 or self.d_max <= self.d_min:
            raise ConfigError("config keys 'samples'/'d_min'/'d_max' give an empty sweep")
        if self.threads < 0:
            raise ConfigError("config key 'threads' must be >= 0")
        return self

    def resolved(self) -> dict:
        return dataclasses.asdict(self)

    def content_hash(self) -> str:
        payload = {k: v for k, v in self.resolved().items() if k not in self._UNHASHED}
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    # -- derived objects -------------------------------------------------

    def make_grid(self):
        return ex.default_grid(self.grid, self.window)

    def scenario(self):
        if self.family == "LG" and self.xi_over_a is not None and self.waist is None:
            return ex.correlation_scenario(
                self.l0, self.xi_over_a, radius=self.a, order=self.m, edge=self.edge,
                wavelength=self.wavelength, detection_distance=self.z,
            )
        waist = self.waist if self.family == "LG" else (self.waist or self.bg_waist)
        return ex.paper_scenario(
            self.family, self.l0, radius=self.a, order=self.m, edge=self.edge, waist=waist,
            kappa=self.kappa, wavelength=self.wavelength, ring_factor=self.ring_factor,
            detection_distance=self.z,
        )

    def d_samples(self) -> np.ndarray:
        return np.linspace(self.d_min, self.d_max, self.samples)

    def single_d(self) -> float:
        return (1.0 if self.d_over_a is None else self.d_over_a) * self.a

    def tolerances(self) -> dict:
        return {k: getattr(self, "tol_" + k) for k in DEFAULT_TOLERANCES}


def _coerce(key, raw, typ):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if "Optional" in str(typ) and text.lower() in ("", "none"):
            return None
        if "int" in str(typ):
            return int(text)
        if "float" in str(typ):
            return float(text)
    except ValueError:
        raise ConfigError(f"config key {key!r}: cannot parse {raw!r}") from None
    return text


def parse_config_text(text: str) -> dict:
    values = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    return values


def load_config(path: Optional[str], overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        cfg.update(parse_config_text(text))
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()


# -- subcommands ------------------------------------------------------------


def _manifest(cfg: RunConfig, command: str, extra: dict) -> dict:
    g = cfg.make_grid()
    return {
        "command": command,
        "version": __version__,
        "config": cfg.resolved(),
        "content_hash": cfg.content_hash(),
        "grid": {"nx": g.nx, "ny": g.ny, "dx": g.dx, "dy": g.dy},
        "tolerances": {**cfg.tolerances(), "overlap_imag": OVERLAP_IMAG_TOL},
        **extra,
    }


def cmd_maps(cfg: RunConfig, out: Path, stem: str) -> dict:
    grid = cfg.make_grid()
    s = cfg.scenario()
    screen = s.obstacle.displaced(cfg.single_d())
    mode = s.mode(cfg.l0)
    if cfg.family == "LG" and cfg.p:
        mode = ModeSpec.lg(cfg.p, cfg.l0, s.waist, s.wavelength)
    maps = ex.field_maps(mode, screen, cfg.z, grid)
    files = [
        write_field_csv(out / f"{stem}-incident.csv", maps.incident).name,
        write_field_csv(out / f"{stem}-diffracted.csv", maps.diffracted).name,
    ]
    if cfg.format == "csv+pgm":
        for name, img in maps.images.items():
            lo_hi = (-np.pi, np.pi) if name.endswith("phase") else (None, None)
            files.append(write_pgm(out / f"{stem}-{name}.pgm", img, *lo_hi).name)
    pos, neg = count_phase_singularities(maps.diffracted, cfg.map_radius)
    return {
        "files": files,
        "blocked_fraction": maps.blocked_fraction,
        "singularities": {"positive": pos, "negative": neg, "radius_m": cfg.map_radius},
    }


def cmd_overlap(cfg: RunConfig, out: Path, stem: str) -> dict:
    plan = ex.SweepPlan(cfg.scenario(), tuple(cfg.d_samples()), {"overlap"})
    summary = ex.sweep_overlap(plan, cfg.make_grid(), cfg.prominence, cfg.threads)
    rows = [(x, p.b, p.imag_residual, p.blocked_fraction) for x, p in zip(summary.d_over_a, summary.results)]
    path = write_rows(out / f"{stem}.csv", OVERLAP_COLUMNS, rows)
    return {
        "files": [path.name],
        "n_extrema": summary.n_extrema,
        "max_abs_b": float(np.abs(summary.values).max()),
    }


def cmd_concurrence(cfg: RunConfig, out: Path, stem: str) -> dict:
    plan = ex.SweepPlan(cfg.scenario(), tuple(cfg.d_samples()), {"concurrence"})
    summary = ex.sweep_concurrence(plan, cfg.make_grid(), cfg.prominence, cfg.threads)
    rows = [
        (x, r.b, r.c_paper, r.c_normalized, r.purity_paper, r.purity_oracle)
        for x, r in zip(summary.d_over_a, summary.results)
    ]
    path = write_rows(out / f"{stem}.csv", CONCURRENCE_COLUMNS, rows)
    return {
        "files": [path.name],
        "n_min": summary.n_min,
        "global_min_d_over_a": summary.global_min_at,
    }


def cmd_decompose(cfg: RunConfig, out: Path, stem: str) -> dict:
    grid = cfg.make_grid()
    s = cfg.scenario()
    plus, _, blocked = diffracted_pair(s, cfg.single_d(), s.input_pair(grid))
    l_range = (cfg.l0 - cfg.l_span, cfg.l0 + cfg.l_span)
    if cfg.family == "LG":
        spec = lg_spectrum(plus, cfg.p_max, l_range, s.waist)
    else:
        spec = bg_spectrum(plus, default_bg_lattice(s.kappa), l_range, s.waist)
    path = write_rows(out / f"{stem}.csv", SPECTRUM_COLUMNS, spec.rows())
    return {
        "files": [path.name],
        "captured_power": spec.captured_power,
        "blocked_fraction": blocked,
    }


def cmd_verify(cfg: RunConfig, out: Path, stem: str) -> dict:
    grid = cfg.make_grid()
    lg = ex.paper_scenario("LG", abs(cfg.l0), radius=cfg.a, order=cfg.m, edge=cfg.edge,
                           wavelength=cfg.wavelength, ring_factor=cfg.ring_factor)
    bg = ex.paper_scenario("BG", abs(cfg.l0), radius=cfg.a, order=cfg.m, edge=cfg.edge,
                           wavelength=cfg.wavelength, kappa=cfg.kappa, waist=cfg.bg_waist)
    checks = run_invariants(grid, lg, bg, cfg.z, tolerances=cfg.tolerances())
    lines = [c.line() for c in checks]
    (out / f"{stem}.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return {
        "files": [f"{stem}.txt"],
        "checks": {c.name: {"value": c.value, "tolerance": c.tolerance, "passed": c.passed} for c in checks},
        "passed": all(c.passed for c in checks),
    }


COMMANDS = {
    "maps": cmd_maps,
    "overlap": cmd_overlap,
    "concurrence": cmd_concurrence,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oamdiff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--out", metavar="DIR")
        sp.add_argument("--grid", metavar="N")
        sp.add_argument("--window", metavar="METERS")
        sp.add_argument("--samples", metavar="N")
        sp.add_argument("--prominence", metavar="EPS")
        sp.add_argument("--threads", metavar="N", help="0 = one per CPU")
        sp.add_argument("--format", choices=("csv", "csv+pgm"))
        sp.add_argument(
            "--set", metavar="KEY=VALUE", action="append", default=[],
            help="override any config key (repeatable)",
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {}
    try:
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            overrides[k.strip()] = v.strip()
        for key in ("out", "grid", "window", "samples", "prominence", "threads", "format"):
            overrides[key] = getattr(args, key)
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.command}-{cfg.content_hash()}"
    try:
        extra = COMMANDS[args.command](cfg, out, stem)
    except ConcurrenceDomainError as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_manifest(out / f"{stem}.manifest.json", _manifest(cfg, args.command, extra))
    for name in extra.get("files", []):
        print(out / name)
    if args.command == "verify" and not extra["passed"]:
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

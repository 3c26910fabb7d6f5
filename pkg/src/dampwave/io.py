"""Config files, CSV series, binary field snapshots and regression pins.

Config grammar: one ``section.key = value`` per line, ``#`` starts a comment,
blank lines ignored.  Keys and defaults::

    grid.half_extent = 110        grid.n = 881
    time.T_final = 100            time.cfl_safety = 0.9      time.sample_every = 4
    damping.kind = localized      damping.eps0 = 1           damping.L = 4
    damping.ramp_width = 1
    data.u0 =                     data.u1 = 0,0,2,1          data.R = 2
    rates.window = 20,100         rates.model = log-corrected
    multiplier.k = auto           potential.p = 1.5          seeds.rng = 0

Bump lists are ``cx,cy,radius,amplitude`` groups separated by ``;``.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, fields, replace

import numpy as np

from .diagnostics import RECORD_FIELDS, DiagnosticsRecord
from .geometry import Bump, DampingProfile, Grid2D, InitialData
from .rates import MODELS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    half_extent: float = 110.0
    n: int = 881
    T_final: float = 100.0
    cfl_safety: float = 0.9
    sample_every: int = 4
    damping_kind: str = "localized"
    eps0: float = 1.0
    L: float = 4.0
    ramp_width: float = 1.0
    u0: tuple = ()
    u1: tuple = (Bump((0.0, 0.0), 2.0, 1.0),)
    R: float = 2.0
    window: tuple = (20.0, 100.0)
    model: str = "log-corrected"
    k: float | None = None  # None means calibrate
    p: float = 1.5
    seed: int = 0

    def validate(self) -> "ExperimentConfig":
        def need(cond, key, msg):
            if not cond:
                raise ConfigError(f"{key}: {msg}")

        try:
            Grid2D(self.half_extent, self.n)
        except ValueError as e:
            key = "grid.n" if "grid.n" in str(e) else "grid.half_extent"
            raise ConfigError(f"{key}: {e}") from None
        need(self.T_final >= 0, "time.T_final", "must be >= 0")
        need(0 < self.cfl_safety < 1, "time.cfl_safety", "must lie in (0, 1)")
        need(self.sample_every >= 1, "time.sample_every", "must be >= 1")
        try:
            self.profile()
        except ValueError as e:
            raise ConfigError(f"damping.{self.damping_kind}: {e}") from None
        need(self.R > 0, "data.R", "must be positive")
        for key, bumps in (("data.u0", self.u0), ("data.u1", self.u1)):
            for b in bumps:
                need(b.reach <= self.R * (1 + 1e-12), key, f"bump {b} reaches beyond data.R = {self.R}")
        need(self.R < self.half_extent, "data.R", "must be smaller than grid.half_extent")
        need(self.window[0] >= math.e and self.window[1] > 2 * self.window[0], "rates.window",
             "needs t0 >= e and t1 > 2 t0")
        need(self.model in MODELS, "rates.model", f"expected one of {MODELS}")
        need(self.k is None or self.k > 3, "multiplier.k", "must exceed 3 or be 'auto'")
        need(1 <= self.p < 2, "potential.p", "must lie in [1, 2)")
        return self

    def grid(self) -> Grid2D:
        return Grid2D(self.half_extent, self.n)

    def profile(self) -> DampingProfile:
        return DampingProfile(self.damping_kind, self.eps0, self.L, self.ramp_width)

    def initial_data(self, grid: Grid2D | None = None) -> InitialData:
        return InitialData.from_bumps(grid or self.grid(), self.u0, self.u1, self.R)


# key -> (field name, parser, formatter)
def _parse_bumps(s: str) -> tuple:
    out = []
    for group in s.split(";"):
        group = group.strip()
        if not group:
            continue
        parts = [float(v) for v in group.split(",")]
        if len(parts) != 4:
            raise ValueError(f"bump needs cx,cy,radius,amplitude, got {group!r}")
        out.append(Bump((parts[0], parts[1]), parts[2], parts[3]))
    return tuple(out)


def _fmt_bumps(bumps) -> str:
    return "; ".join(f"{b.center[0]!r},{b.center[1]!r},{b.radius!r},{b.amplitude!r}" for b in bumps)


def _parse_window(s: str) -> tuple:
    parts = [float(v) for v in s.split(",")]
    if len(parts) != 2:
        raise ValueError("window needs t0,t1")
    return tuple(parts)


def _parse_k(s: str):
    return None if s.strip().lower() == "auto" else float(s)


def _parse_int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"expected an integer, got {s!r}")
    return int(v)


KEYS = {
    "grid.half_extent": ("half_extent", float, repr),
    "grid.n": ("n", _parse_int, str),
    "time.T_final": ("T_final", float, repr),
    "time.cfl_safety": ("cfl_safety", float, repr),
    "time.sample_every": ("sample_every", _parse_int, str),
    "damping.kind": ("damping_kind", str.strip, str),
    "damping.eps0": ("eps0", float, repr),
    "damping.L": ("L", float, repr),
    "damping.ramp_width": ("ramp_width", float, repr),
    "data.u0": ("u0", _parse_bumps, _fmt_bumps),
    "data.u1": ("u1", _parse_bumps, _fmt_bumps),
    "data.R": ("R", float, repr),
    "rates.window": ("window", _parse_window, lambda w: f"{w[0]!r},{w[1]!r}"),
    "rates.model": ("model", str.strip, str),
    "multiplier.k": ("k", _parse_k, lambda k: "auto" if k is None else repr(k)),
    "potential.p": ("p", float, repr),
    "seeds.rng": ("seed", _parse_int, str),
}
assert {v[0] for v in KEYS.values()} == {f.name for f in fields(ExperimentConfig)}


def apply_overrides(cfg: ExperimentConfig, pairs) -> ExperimentConfig:
    """Apply ``(key, value_string, where)`` triples; ``where`` prefixes error messages."""
    changes = {}
    for key, value, where in pairs:
        if key not in KEYS:
            raise ConfigError(f"{where}unknown key {key!r}")
        name, parse, _ = KEYS[key]
        try:
            changes[name] = parse(value)
        except ValueError as e:
            raise ConfigError(f"{where}{key}: cannot parse {value!r} ({e})") from None
    return replace(cfg, **changes).validate()


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        pairs.append((key, value, f"line {lineno}: "))
    return apply_overrides(base or ExperimentConfig(), pairs)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base)


def format_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{key} = {fmt(getattr(cfg, name))}\n" for key, (name, _, fmt) in KEYS.items())


# ------------------------------------------------------------------ series


def write_records(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(RECORD_FIELDS) + "\n")
        for rec in records:
            fh.write(",".join(repr(float(v)) for v in rec.as_tuple()) + "\n")


def read_records(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RECORD_FIELDS:
            raise ValueError(f"unexpected header {header}")
        return [DiagnosticsRecord(*map(float, row)) for row in reader]


def write_rows(rows, header, path) -> None:
    """Generic CSV writer; floats are written with ``repr``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


# ------------------------------------------------------------------ fields


def dump_field(field: np.ndarray, path, half_extent: float) -> None:
    field = np.asarray(field, dtype=float)
    n = field.shape[0]
    if field.shape != (n, n):
        raise ValueError("field must be square")
    with open(path, "wb") as fh:
        fh.write(f"n={n} half_extent={float(half_extent)!r} dtype=f64 order=row-major\n".encode("ascii"))
        fh.write(np.ascontiguousarray(field, dtype="<f8").tobytes())


def load_field(path) -> tuple[np.ndarray, float]:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        meta = dict(item.split("=", 1) for item in header)
        if meta.get("dtype") != "f64" or meta.get("order") != "row-major":
            raise ValueError(f"unsupported field header {header}")
        n = int(meta["n"])
        payload = fh.read()
    if len(payload) != 8 * n * n:
        raise ValueError(f"payload holds {len(payload)} bytes, expected {8 * n * n}")
    return np.frombuffer(payload, dtype="<f8").reshape(n, n).astype(float), float(meta["half_extent"])


# ------------------------------------------------------------------- pins

PIN_HEADER = ("name", "value")


def read_pins(path) -> dict:
    if not os.path.exists(path):
        return {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader, PIN_HEADER)) != PIN_HEADER:
            raise ValueError(f"{path}: bad pins header")
        return {row[0]: float(row[1]) for row in reader if row}


def write_pins(pins: dict, path) -> None:
    write_rows(sorted((k, float(v)) for k, v in pins.items()), PIN_HEADER, path)


@dataclass(frozen=True)
class PinComparison:
    name: str
    pinned: float | None
    measured: float
    rel_tol: float

    @property
    def ok(self) -> bool:
        if self.pinned is None:
            return True
        return abs(self.measured - self.pinned) <= self.rel_tol * max(abs(self.pinned), 1e-300)


def compare_pins(measured: dict, pinned: dict, rel_tol: float = 1e-9) -> list:
    return [PinComparison(k, pinned.get(k), float(v), rel_tol) for k, v in sorted(measured.items())]

"""Command-line front end.

Every run writes one directory ``<root>/<command>-<hash>`` holding
``record.json`` (deterministic for a given config), tabular CSV files,
curve polylines where relevant, and ``metadata.json`` with timestamps and
wall-clock times.  The output root defaults to ``$HYPERWIDTH_OUTPUT`` or
``./hyperwidth-runs``.

Exit codes: 0 success, 2 usage error, 3 certificate or check failure,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import tomli

from . import __version__

log = logging.getLogger("hyperwidth")

EXIT_OK, EXIT_USAGE, EXIT_CERTIFICATE, EXIT_NUMERICAL = 0, 2, 3, 4
OUTPUT_ENV = "HYPERWIDTH_OUTPUT"
COMMANDS = ("width", "spectrum", "sweepout", "ac-minmax", "index", "heteroclinic")
H0 = 2 * math.sqrt(2) / 3


class UsageError(ValueError):
    """Malformed configuration; the message names the offending line or field."""


class CertificateFailure(RuntimeError):
    """A result was produced but one of its checks failed."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Validated knobs of one run.  ``surface`` is ``bolza``, ``s_ma`` or ``s_L`` with its parameters."""

    command: str
    surface: dict = field(default_factory=lambda: {"kind": "s_ma", "m": 2, "a": 0.5})
    cuffs: tuple = (0.5, 0.5, 0.5)
    epsilon: float = 0.1
    resolution: float = 0.05
    surgery_t: float = 0.05
    n_samples: int = 12
    cutoff: float = 5.0
    max_word_len: int | None = None
    tol: float = 1e-8
    mesh_vertices: int = 20000
    path_resolution: int = 33
    n_eigs: int = 8
    length: float | None = None
    curvature: float = -1.0
    grid: int = 256
    field_path: str | None = None
    seed: int = 0
    output: str | None = None

    _RANGES = {
        "epsilon": (1e-4, 10.0), "resolution": (1e-3, 1.0), "surgery_t": (1e-4, 0.5),
        "n_samples": (2, 1000), "cutoff": (0.1, 30.0), "tol": (1e-14, 1e-2),
        "mesh_vertices": (100, 2_000_000), "path_resolution": (5, 1000), "n_eigs": (1, 200),
        "grid": (8, 100_000), "curvature": (-100.0, 100.0),
    }

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"field 'command': unknown command {self.command!r}; expected one of {COMMANDS}")
        for name, (lo, hi) in self._RANGES.items():
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and lo <= v <= hi):
                raise UsageError(f"field '{name}': {v!r} outside [{lo}, {hi}]")
        if len(self.cuffs) != 3 or not all(isinstance(c, (int, float)) and c > 0 for c in self.cuffs):
            raise UsageError(f"field 'cuffs': expected three positive lengths, got {self.cuffs!r}")
        if self.max_word_len is not None and not 1 <= self.max_word_len <= 64:
            raise UsageError(f"field 'max_word_len': {self.max_word_len!r} outside [1, 64]")
        if self.length is not None and not self.length > 0:
            raise UsageError(f"field 'length': must be positive, got {self.length!r}")
        surface_spec(self.surface)
        return self

    def canonical(self) -> dict:
        """Config as hashed: everything except the output location."""
        d = asdict(self)
        d.pop("output")
        d["cuffs"] = [float(c) for c in self.cuffs]
        return d

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.canonical(), sort_keys=True).encode()).hexdigest()


def parse_surface(text: str) -> dict:
    """``bolza``, ``s_ma:m=2,a=0.5`` or ``s_L:L=0.5``."""
    kind, _, rest = text.partition(":")
    out = {"kind": kind.strip()}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"surface {text!r}: expected key=value, got {item!r}")
        out[key.strip()] = float(value) if "." in value or "e" in value.lower() else int(value)
    return out


def surface_spec(surface):
    """:class:`SurfaceSpec` from a surface table."""
    from .fuchsian import SurfaceSpec

    if isinstance(surface, str):
        surface = parse_surface(surface)
    kind = surface.get("kind")
    try:
        if kind == "bolza":
            return SurfaceSpec.bolza()
        if kind == "s_ma":
            return SurfaceSpec.s_ma(int(surface["m"]), float(surface["a"]))
        if kind == "s_L":
            return SurfaceSpec.s_L(float(surface["L"]))
        if kind == "pants_glued":
            return SurfaceSpec("pants_glued", int(surface["genus"]), surface["gluings"], surface["cuff_lengths"])
    except KeyError as exc:
        raise UsageError(f"field 'surface': kind {kind!r} needs parameter {exc.args[0]!r}") from None
    except (ValueError, TypeError) as exc:
        raise UsageError(f"field 'surface': {exc}") from None
    raise UsageError(f"field 'surface': unknown kind {kind!r}; expected bolza, s_ma, s_L or pants_glued")


def load_config_file(path) -> dict:
    """Read a TOML or JSON config; decoding errors report their line and column."""
    text = Path(path).read_text()
    try:
        if str(path).endswith(".json"):
            return json.loads(text)
        return tomli.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except tomli.TOMLDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None


def make_config(command: str, file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, a config file and command-line overrides, then validate."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for source in (file_values or {}), {k: v for k, v in (overrides or {}).items() if v is not None}:
        for key, value in source.items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"field '{key}': unknown setting")
            values[key] = value
    values["command"] = command
    if isinstance(values.get("surface"), str):
        values["surface"] = parse_surface(values["surface"])
    if "cuffs" in values:
        values["cuffs"] = tuple(values["cuffs"])
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    return cfg.validate()


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


class RunWriter:
    """Single writer of a run directory."""

    def __init__(self, cfg: RunConfig, root=None):
        root = Path(root or cfg.output or os.environ.get(OUTPUT_ENV) or "hyperwidth-runs")
        self.cfg = cfg
        self.dir = root / f"{cfg.command}-{cfg.config_hash[:12]}"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.started = time.time()
        self.timings = {}

    def header(self) -> dict:
        return {"config_hash": self.cfg.config_hash, "version": __version__, "seed": self.cfg.seed}

    def write_record(self, name: str, record: dict) -> Path:
        out = {**self.header(), "config": self.cfg.canonical(), **record}
        path = self.dir / name
        path.write_text(json.dumps(_jsonable(out), sort_keys=True, indent=2) + "\n")
        return path

    def write_csv(self, name: str, header: list, rows) -> Path:
        path = self.dir / name
        with open(path, "w") as fh:
            fh.write(f"# config_hash={self.cfg.config_hash} version={__version__} seed={self.cfg.seed}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        return path

    def path(self, name: str) -> Path:
        return self.dir / name

    def finish(self, status: int) -> None:
        meta = {**self.header(), "command": self.cfg.command, "exit_status": status,
                "started": datetime.fromtimestamp(self.started, timezone.utc).isoformat(),
                "wall_clock_s": time.time() - self.started, "timings_s": self.timings,
                "python": platform.python_version(), "host": platform.node()}
        (self.dir / "metadata.json").write_text(json.dumps(_jsonable(meta), sort_keys=True, indent=2) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_width(cfg: RunConfig, out: RunWriter) -> int:
    from .widths import HypothesisNotCertified, width_bolza, width_S_L, width_S_ma

    s = cfg.surface
    try:
        if s["kind"] == "bolza":
            res = width_bolza(cfg.max_word_len)
        elif s["kind"] == "s_ma":
            res = width_S_ma(float(s["a"]), int(s["m"]))
        elif s["kind"] == "s_L":
            res = width_S_L(float(s["L"]))
        else:
            raise UsageError(f"field 'surface': no width formula for kind {s['kind']!r}")
    except HypothesisNotCertified as exc:
        out.write_record("record.json", {"operation": "width", "status": "uncertified", "reason": str(exc)})
        raise CertificateFailure(str(exc)) from None
    res.check()
    out.write_record("record.json", {"operation": "width", "oracle": "closed-form trigonometry + certificates",
                                     "status": "exact" if res.exact else "bracket", **res.to_record()})
    if not res.exact:
        raise CertificateFailure(f"width only bracketed: [{res.lo:.6f}, {res.hi:.6f}]")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, out: RunWriter) -> int:
    from .fuchsian import build_surface, length_spectrum

    spec = surface_spec(cfg.surface)
    sp_ = length_spectrum(build_surface(spec), cfg.cutoff, cfg.max_word_len, with_simplicity=True)
    out.write_csv("spectrum.csv", ["length", "multiplicity", "separating", "simple", "word"],
                  [(e.length, e.multiplicity, e.separating, e.simple, e.word) for e in sp_.entries])
    out.write_record("record.json", {
        "operation": "length_spectrum", "oracle": "word enumeration with translation-length trace formula",
        "cutoff": sp_.cutoff, "horizon": sp_.horizon, "complete": sp_.complete, "n_elements": sp_.n_elements,
        "distinct_lengths": sp_.distinct_lengths()})
    if not sp_.complete:
        raise CertificateFailure(f"spectrum complete only below {sp_.horizon:.6f} < cutoff {cfg.cutoff}")
    return EXIT_OK


def cmd_sweepout(cfg: RunConfig, out: RunWriter) -> int:
    from .hyptrig import figure_eight_length
    from .sweepout import build_pants_domain, composite_sweepout_S_L, composite_sweepout_S_ma, run_sweepout

    cuffs = tuple(float(c) for c in cfg.cuffs)
    domain = build_pants_domain(cuffs)
    trace = run_sweepout(domain, cfg.resolution, cfg.surgery_t, cfg.n_samples)
    trace.to_csv(out.path("trace.csv"))
    trace.write_polylines(out.path("curves.txt"), domain)
    exact = figure_eight_length(cuffs)
    lengths = trace.lengths
    checks = {
        "max_vs_figure_eight": abs(trace.max_length - exact) / exact <= 0.01,
        "start_vs_cuffs": abs(lengths[0] - (cuffs[0] + cuffs[1])) / (cuffs[0] + cuffs[1]) <= 0.005,
        "end_vs_cuff": abs(lengths[-1] - cuffs[2]) / cuffs[2] <= 0.005,
    }
    record = {"operation": "run_sweepout", "oracle": "closed-form figure-eight length", "cuffs": list(cuffs),
              "max_length": trace.max_length, "figure_eight_length": exact,
              "relative_error": (trace.max_length - exact) / exact,
              "start_length": lengths[0], "end_length": lengths[-1],
              "components": [s.n_components for s in trace.samples], "checks": checks}
    s = cfg.surface
    if s["kind"] in ("s_ma", "s_L") and len(set(cuffs)) == 1:
        comp = (composite_sweepout_S_ma(cuffs[0], int(s["m"]), trace) if s["kind"] == "s_ma"
                else composite_sweepout_S_L(cuffs[0], trace))
        comp.to_csv(out.path("composite.csv"))
        target = exact + (cuffs[0] if s["kind"] == "s_L" else 0.0)
        checks["composite_max"] = abs(comp.max_mass - target) / target <= 0.01
        record["composite"] = {"surface": s, "max_mass": comp.max_mass, "expected": target}
    out.write_record("record.json", record)
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise CertificateFailure("sweepout checks failed: " + ", ".join(failed))
    return EXIT_OK


def analyze_interface(u, mesh, spec, epsilon: float) -> dict:
    """Energy, band topology and distance to the pants figure eight of an Allen-Cahn critical point."""
    from .allencahn import band_components, interface_mass, zero_level_set
    from .allencahn.interface import hausdorff_to_reference
    from .sweepout import build_pants_domain, figure_eight_geodesic

    curves = zero_level_set(u, mesh)
    bands = band_components(u, mesh)
    level_length = sum(c.length for c in curves)
    mass = interface_mass(u, mesh, H0)
    info = {"normalized_energy": mass, "level_set_length": level_length,
            "bands": [{"euler": b.euler, "kind": b.kind, "curve_length": b.curve_length,
                       "n_curves": len(b.curves)} for b in bands],
            "mesh_width": mesh.mesh_width}
    fig8_bands = [b for b in bands if b.kind == "figure-eight"]
    if fig8_bands and spec.kind.value == "pants_glued":
        cuffs = spec.pants_cuffs(0)
        domain = build_pants_domain(cuffs)
        ref = figure_eight_geodesic(domain)
        d = min(hausdorff_to_reference(fig8_bands[0].curves, domain, ref, 2 * p) for p in range(spec.n_pants))
        info["hausdorff_to_figure_eight"] = d
    return info


def cmd_ac_minmax(cfg: RunConfig, out: RunWriter) -> int:
    from .allencahn import AllenCahn, build_mesh, mountain_pass
    from .widths import width_S_L, width_S_ma

    spec = surface_spec(cfg.surface)
    if spec.kind.value != "pants_glued":
        raise UsageError("field 'surface': the Allen-Cahn solver needs a pants-glued surface")
    t = time.time()
    mesh = build_mesh(spec, cfg.mesh_vertices, seed=cfg.seed)
    mesh.check()
    out.timings["mesh"] = time.time() - t
    t = time.time()
    ac = AllenCahn(mesh, cfg.epsilon)
    crit, rec = mountain_pass(mesh, epsilon=cfg.epsilon, path_resolution=cfg.path_resolution, tol=cfg.tol, problem=ac)
    out.timings["mountain_pass"] = time.time() - t
    crit.save(out.path("field.txt"))
    mesh.save(out.path("mesh.txt"))
    out.write_csv("max_energy_history.csv", ["iteration", "max_energy"], enumerate(rec.max_energy_history))
    info = analyze_interface(crit, mesh, spec, cfg.epsilon)
    s = cfg.surface
    width = width_S_ma(s["a"], s["m"]).value if s["kind"] == "s_ma" else (
        width_S_L(s["L"]).value if s["kind"] == "s_L" else None)
    checks = {"multiplicity_one": abs(info["normalized_energy"] - info["level_set_length"])
              <= 0.15 * info["level_set_length"]}
    if width is not None:
        checks["energy_vs_width"] = abs(info["normalized_energy"] - width) <= 0.15 * width
    out.write_record("record.json", {"operation": "mountain_pass", "oracle": "widths closed form",
                                     "width": width, "n_vertices": mesh.n_vertices, "epsilon": cfg.epsilon,
                                     **rec.to_record(), "interface": info, "checks": checks})
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise CertificateFailure("mountain-pass checks failed: " + ", ".join(failed))
    return EXIT_OK


def cmd_index(cfg: RunConfig, out: RunWriter) -> int:
    from .stability import ac_index, geodesic_index, index_consistency_check

    record = {"operation": "index"}
    geo = None
    if cfg.length is not None:
        geo = geodesic_index(cfg.length, cfg.curvature, cfg.grid)
        record["geodesic"] = geo.to_record()
        record["geodesic"]["curvature"] = cfg.curvature
    if cfg.field_path is not None:
        from .allencahn import PhaseField, TriangulatedSurface

        base = Path(cfg.field_path)
        u = PhaseField.load(base)
        mesh = TriangulatedSurface.load(base.with_name("mesh.txt"))
        rep = ac_index(u, mesh, n_eigs=cfg.n_eigs)
        record["allen_cahn"] = rep.to_record()
        if geo is not None:
            from .allencahn import band_components

            simple = [b.kind for b in band_components(u, mesh)] == ["simple"]
            chk = index_consistency_check(geo, rep, simple)
            record["consistency"] = {"ok": chk.ok, "status": chk.status, "finite_epsilon": True}
    if geo is None and "allen_cahn" not in record:
        raise UsageError("field 'length' or 'field_path' is required for index")
    out.write_record("record.json", record)
    if record.get("consistency", {}).get("ok") is False:
        raise CertificateFailure("index inequalities violated")
    return EXIT_OK


def cmd_heteroclinic(cfg: RunConfig, out: RunWriter) -> int:
    from .allencahn import QUARTIC, heteroclinic

    prof = heteroclinic(QUARTIC)
    exact = np.tanh(prof.t / math.sqrt(2))
    sup_err = float(np.abs(prof.H - exact).max())
    out.write_csv("profile.csv", ["t", "H"], zip(prof.t.tolist(), prof.H.tolist()))
    ok = abs(prof.h0 - H0) <= 1e-6 and sup_err < 1e-6
    out.write_record("record.json", {"operation": "heteroclinic", "oracle": "tanh(t/sqrt 2), 2 sqrt 2 / 3",
                                     "potential": QUARTIC.name, "h0": prof.h0, "h0_exact": H0,
                                     "sup_error_vs_tanh": sup_err, "check": ok})
    if not ok:
        raise CertificateFailure("heteroclinic profile disagrees with tanh")
    return EXIT_OK


HANDLERS = {"width": cmd_width, "spectrum": cmd_spectrum, "sweepout": cmd_sweepout,
            "ac-minmax": cmd_ac_minmax, "index": cmd_index, "heteroclinic": cmd_heteroclinic}


def run(cfg: RunConfig, root=None) -> int:
    """Execute one configured command; returns the exit status."""
    from .allencahn import ConvergenceError
    from .stability import DiscretizationError, EigensolverError
    from .sweepout import FlowInstabilityError, FlowStagnationError

    out = RunWriter(cfg, root)
    status = EXIT_OK
    try:
        status = HANDLERS[cfg.command](cfg, out)
    except CertificateFailure as exc:
        log.error("certificate failure: %s", exc)
        status = EXIT_CERTIFICATE
    except (ConvergenceError, EigensolverError, DiscretizationError, FlowInstabilityError,
            FlowStagnationError) as exc:
        log.error("numerical failure: %s", exc)
        status = EXIT_NUMERICAL
    finally:
        out.finish(status)
    print(out.dir)
    return status


# ---------------------------------------------------------------------------
# Golden-value suite
# ---------------------------------------------------------------------------

@dataclass
class GoldenRow:
    name: str
    value: float
    expected: float
    tol: float
    seconds: float
    oracle: str

    @property
    def passed(self) -> bool:
        return abs(self.value - self.expected) <= self.tol


def golden_suite(full: bool = False, perturb: dict | None = None) -> list:
    """Evaluate the golden values; ``perturb`` shifts named expected values (test mode)."""
    from .allencahn import heteroclinic
    from .fuchsian import SurfaceSpec, build_surface, length_spectrum
    from .hyptrig import figure_eight_length, width_lower_bound
    from .stability import geodesic_index
    from .sweepout import build_pants_domain, composite_sweepout_S_L, run_sweepout
    from .widths import bolza_closed_form_bounds

    perturb = perturb or {}
    rows = []

    def add(name, fn, expected, tol, oracle):
        t = time.perf_counter()
        value = float(fn())
        rows.append(GoldenRow(name, value, expected + perturb.get(name, 0.0), tol, time.perf_counter() - t, oracle))

    cf = bolza_closed_form_bounds()
    s2 = math.sqrt(2)
    sys_ = cf["systole"]
    add("cosh(L_beta/2) = 7 + 5 sqrt 2", lambda: math.cosh(figure_eight_length((sys_,) * 3) / 2), 7 + 5 * s2, 1e-9,
        "closed form")
    add("L_gamma", lambda: bolza_closed_form_bounds()["L_gamma"], 9.027, 5e-4, "3-decimal reference")
    add("interior geodesic bound", lambda: cf["parlier_bound"], 3.425, 5e-4, "3-decimal reference")
    add("Bolza width upper bound", lambda: cf["hi_bound"], 9.482, 5e-4, "3-decimal reference")
    add("sys + L_beta", lambda: cf["sys_plus_L_beta"], 9.729, 5e-4, "3-decimal reference")
    add("width lower bound 2 arccosh 3", lambda: width_lower_bound(-1.0), 2 * math.acosh(3), 1e-12, "closed form")

    bolza = build_surface(SurfaceSpec.bolza())
    spec5 = {}

    def first(k):
        if "d" not in spec5:
            spec5["d"] = length_spectrum(bolza, 5.0).distinct_lengths()
        return spec5["d"][k]

    add("Bolza systole", lambda: first(0), 2 * math.acosh(1 + s2), 1e-9, "closed form")
    add("Bolza second length", lambda: first(1), 2 * math.acosh(3 + 2 * s2), 1e-9, "closed form")
    l_gamma = 8 * math.acosh(1 + s2 / 2)
    add("separating length L_gamma below 9.1",
        lambda: min((e.length for e in length_spectrum(bolza, 9.1).entries if e.separating),
                    key=lambda x: abs(x - l_gamma)), l_gamma, 1e-9, "closed form")

    cuffs = (0.5, 0.5, 0.5)
    f8 = figure_eight_length(cuffs)
    trace = {}

    def sweep_max():
        trace["t"] = run_sweepout(build_pants_domain(cuffs))
        return trace["t"].max_length

    add("sweepout max (0.5, 0.5, 0.5)", sweep_max, f8, 0.01 * f8, "closed-form figure eight, 1%")
    add("S_L composite max (L = 0.5)", lambda: composite_sweepout_S_L(0.5, trace["t"]).max_mass, f8 + 0.5,
        0.01 * (f8 + 0.5), "figure eight + L, 1%")
    add("heteroclinic h0", lambda: heteroclinic().h0, H0, 1e-6, "2 sqrt 2 / 3")
    add("equator index", lambda: geodesic_index(2 * math.pi, 1.0).index, 1, 0, "k^2 - 1")
    add("equator nullity", lambda: geodesic_index(2 * math.pi, 1.0).nullity, 2, 0, "k^2 - 1")
    if full:
        from .allencahn import build_mesh, mountain_pass

        for kind, expected in (("s_ma", f8), ("s_L", f8 + 0.5)):
            spec = SurfaceSpec.s_ma(2, 0.5) if kind == "s_ma" else SurfaceSpec.s_L(0.5)
            add(f"Allen-Cahn pass energy / h0 on {kind}",
                lambda spec=spec: mountain_pass(build_mesh(spec, 20000), epsilon=0.1)[1].pass_energy / H0,
                expected, 0.15 * expected, "width, 15%")
    unknown = set(perturb) - {r.name for r in rows}
    if unknown:
        raise UsageError(f"--perturb: no golden row named {sorted(unknown)}")
    return rows


def reproduce_paper(root=None, full: bool = False, perturb: dict | None = None) -> int:
    """Run the golden-value suite and write a pass/fail table; nonzero exit on any failure."""
    rows = golden_suite(full, perturb)
    cfg = RunConfig("width")
    root = Path(root or os.environ.get(OUTPUT_ENV) or "hyperwidth-runs")
    out_dir = root / f"reproduce-{'full' if full else 'desk'}"
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "golden.csv", "w") as fh:
        fh.write(f"# version={__version__} seed={cfg.seed}\n")
        fh.write("name,value,expected,tolerance,passed,oracle\n")
        for r in rows:
            fh.write(f"{r.name},{r.value!r},{r.expected!r},{r.tol!r},{r.passed},{r.oracle}\n")
    (out_dir / "metadata.json").write_text(json.dumps(
        {"version": __version__, "wall_clock_s": {r.name: r.seconds for r in rows}}, indent=2, sort_keys=True) + "\n")
    width = max(len(r.name) for r in rows)
    for r in rows:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.value:.12g}  "
              f"(expected {r.expected:.12g} +- {r.tol:.1g}, {r.seconds:.2f} s)")
    failed = [r for r in rows if not r.passed]
    print(f"{len(rows) - len(failed)}/{len(rows)} passed; table in {out_dir}")
    return EXIT_CERTIFICATE if failed else EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperwidth", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"hyperwidth {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON config file")
    common.add_argument("--output", help=f"output root (default ${OUTPUT_ENV} or ./hyperwidth-runs)")
    common.add_argument("--seed", type=int)
    common.add_argument("--surface", help="bolza | s_ma:m=2,a=0.5 | s_L:L=0.5")
    specs = {
        "width": [("--max-word-len", int)],
        "spectrum": [("--cutoff", float), ("--max-word-len", int)],
        "sweepout": [("--resolution", float), ("--surgery-t", float), ("--n-samples", int)],
        "ac-minmax": [("--epsilon", float), ("--mesh-vertices", int), ("--path-resolution", int), ("--tol", float)],
        "index": [("--length", float), ("--curvature", float), ("--grid", int), ("--field-path", str),
                  ("--n-eigs", int)],
        "heteroclinic": [],
    }
    for name, opts in specs.items():
        sp_ = sub.add_parser(name, parents=[common])
        for flag, typ in opts:
            sp_.add_argument(flag, type=typ)
        if name == "sweepout":
            sp_.add_argument("--cuffs", type=float, nargs=3)
    rp = sub.add_parser("reproduce-paper", help="golden-value suite with a pass/fail table")
    rp.add_argument("--output")
    rp.add_argument("--full", action="store_true", help="include the Allen-Cahn mountain passes (minutes)")
    rp.add_argument("--perturb", action="append", default=[], metavar="NAME=DELTA",
                    help="test mode: shift the expected value of a row")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "reproduce-paper":
            perturb = {}
            for item in args.perturb:
                name, eq, delta = item.rpartition("=")
                if not eq:
                    raise UsageError(f"--perturb {item!r}: expected NAME=DELTA")
                perturb[name] = float(delta)
            return reproduce_paper(args.output, args.full, perturb)
        opts = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
        file_values = load_config_file(args.config) if args.config else {}
        file_values.pop("command", None)
        cfg = make_config(args.command, file_values, opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

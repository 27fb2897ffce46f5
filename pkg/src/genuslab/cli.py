"""Command line entry point: ``genuslab <command> [options]``.

Exit status 0 on success, 2 on an invariant violation (only raised as an
error under ``--strict``; otherwise reported), 3 on a bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import asymptotics, enumeration
from .errors import ConfigError, CorruptTable, GenusLabError, InvariantViolation
from .maps import map_from_dict

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 2, 3
COMMANDS = ("tau", "constants", "sample", "analyze", "oracle", "experiment")
METRICS = ("diameter", "balls", "typical", "planarity", "profile", "cheeger", "isolated", "tentacles")


@dataclass
class ExperimentConfig:
    command: str
    n: int | None = None
    g: int | None = None
    theta: float | None = None
    count: int = 1
    seeds: tuple[int, ...] = (0,)
    sizes: tuple[int, ...] = ()
    nmax: int = 0
    grid: tuple[float, float, int] | None = None
    metrics: tuple[str, ...] = ()
    exact_faces: int = 16
    exact_vertices: int = 16
    eps: float = 0.25
    pairs: int = 100
    p_min: float = 0.01
    chi2: bool = False
    input: str | None = None
    out: str | None = None
    cache_dir: str | None = None
    strict: bool = False

    def validate(self) -> "ExperimentConfig":
        c = self.command
        if c not in COMMANDS:
            raise ConfigError(f"unknown command {c!r}; choose from {', '.join(COMMANDS)}")
        if c == "tau" and self.nmax < 1:
            raise ConfigError("tau needs --nmax >= 1")
        if c == "constants":
            if (self.theta is None) == (self.grid is None):
                raise ConfigError("constants needs exactly one of --theta or --grid")
            thetas = [self.theta] if self.theta is not None else [self.grid[0], self.grid[1]]
            if any(not 0 < t < 0.5 for t in thetas):
                raise ConfigError("theta values must lie strictly between 0 and 1/2")
            if self.grid is not None and self.grid[2] < 1:
                raise ConfigError("grid needs at least one step")
        if c == "sample":
            if self.n is None or self.g is None:
                raise ConfigError("sample needs --n and --genus")
            if self.n < 1 or self.g < 0 or self.n < 2 * self.g - 1:
                raise ConfigError(f"no triangulation with 2n={2 * (self.n or 0)} faces and genus {self.g}")
            if self.out is None:
                raise ConfigError("sample needs --out")
        if c == "analyze":
            if self.input is None or self.out is None:
                raise ConfigError("analyze needs --in and --out")
            bad = set(self.metrics) - set(METRICS)
            if bad or not self.metrics:
                raise ConfigError(f"--metrics takes a comma list from {', '.join(METRICS)}")
            if self.eps <= 0:
                raise ConfigError("--eps must be positive")
        if c == "experiment":
            if self.theta is None or not 0 < self.theta < 0.5:
                raise ConfigError("experiment needs --theta in (0, 1/2)")
            if not self.sizes or min(self.sizes) < 1:
                raise ConfigError("experiment needs --sizes, e.g. 6,8,10")
            if self.out is None:
                raise ConfigError("experiment needs --out DIR")
        if self.count < 1:
            raise ConfigError("--count must be >= 1")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        d["sizes"] = list(self.sizes)
        d["metrics"] = list(self.metrics)
        return d

    def config_hash(self) -> str:
        # paths and cache location do not change results
        d = {k: v for k, v in self.to_dict().items() if k not in ("out", "input", "cache_dir")}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def header(self) -> str:
        return f"# config_hash={self.config_hash()} seeds={','.join(map(str, self.seeds))}"


def cache_dir(cfg: ExperimentConfig) -> Path:
    path = Path(cfg.cache_dir or os.environ.get("GENUSLAB_CACHE") or Path.home() / ".cache" / "genuslab")
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_census(n: int, cache: Path | None) -> enumeration.GluingCensus:
    if cache is not None:
        path = cache / f"census_n{n}.json"
        if path.exists():
            return enumeration.GluingCensus.load(path)
    census = enumeration.brute_force_census(n)
    if cache is not None:
        census.save(cache / f"census_n{n}.json")
    return census


def load_table(nmax: int, cache: Path | None, log=print) -> enumeration.TauTable:
    """Calibrated table up to nmax; cached tables are re-verified on load."""
    if cache is not None:
        stored = sorted(
            (int(p.stem.split("_n")[1]), p) for p in cache.glob("tau_n*.csv")
            if p.stem.split("_n")[1].isdigit()
        )
        for size, path in stored:
            if size >= nmax:
                try:
                    table = enumeration.TauTable.from_csv(path, verify_rows=10)
                except CorruptTable as exc:
                    raise InvariantViolation(f"cached table {path} failed verification: {exc}") from exc
                log(f"loaded {path} (n_max={table.n_max}); 10 random rows re-verified")
                return table
    censuses = [load_census(k, cache) for k in (1, 2, 3)]
    table = enumeration.gj_extend(enumeration.calibrate_seed(*censuses), nmax)
    if cache is not None:
        path = cache / f"tau_n{nmax}.csv"
        table.to_csv(path)
        log(f"built table to n={nmax} with seed {table.seed_cell}; cached at {path}")
    return table


def _write_csv(path: str | None, cfg: ExperimentConfig, rows: list[dict]) -> None:
    buf = io.StringIO()
    buf.write(cfg.header() + "\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue())


def derived_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1, dtype=np.uint64)[0])


# -- commands -----------------------------------------------------------------

def cmd_tau(cfg: ExperimentConfig) -> int:
    table = load_table(cfg.nmax, cache_dir(cfg), log=lambda s: print(s, file=sys.stderr))
    rows = [
        {"n": n, "g": g, "tau": str(table(n, g))}
        for n in range(1, cfg.nmax + 1)
        for g in range(enumeration.max_genus(n) + 1)
    ]
    _write_csv(cfg.out, cfg, rows)
    return EXIT_OK


def cmd_constants(cfg: ExperimentConfig) -> int:
    if cfg.theta is not None:
        c = asymptotics.theta_constants(cfg.theta).to_dict()
        if abs(c["D_prime"] - 3 * c["D"]) > 1e-12 * c["D"]:
            raise InvariantViolation("D' != 3 D")
        c["config_hash"] = cfg.config_hash()
        text = json.dumps(c, indent=2) + "\n"
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    lo, hi, steps = cfg.grid
    rows = [asymptotics.theta_constants(float(t)).to_dict() for t in np.linspace(lo, hi, steps)]
    _write_csv(cfg.out, cfg, rows)
    return EXIT_OK


def cmd_sample(cfg: ExperimentConfig) -> int:
    from .sampler import batch_sample

    maps, stats = batch_sample(cfg.n, cfg.g, cfg.count, cfg.seeds)
    problems = [i for i, m in enumerate(maps) if m.genus != cfg.g or m.n_faces != 2 * cfg.n]
    h = cfg.config_hash()
    per_seed = [s for s in cfg.seeds for _ in range(cfg.count)]
    with open(cfg.out, "w") as fh:
        for i, (m, seed) in enumerate(zip(maps, per_seed)):
            rec = m.to_dict()
            rec.update(index=i, seed=seed, config_hash=h)
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    footer = stats.to_dict()
    footer.update(config_hash=h, n=cfg.n, genus=cfg.g, count=len(maps))
    Path(str(cfg.out) + ".stats.json").write_text(json.dumps(footer, indent=2) + "\n")
    print(f"{len(maps)} maps, acceptance {stats.acceptance_rate:.3g} over {stats.attempts} attempts",
          file=sys.stderr)
    if problems or not stats.consistent():
        return _violation(cfg, f"sample validation failed for indices {problems[:5]}")
    return EXIT_OK


def analyze_map(m, metrics: Sequence[str], cfg: ExperimentConfig, rng: np.random.Generator) -> dict:
    from . import metrics as mt
    from . import separators as sp
    from . import tentacles as tt

    row: dict = {"faces": m.n_faces, "genus": m.genus, "vertices": m.n_vertices}
    dist = mt.distance_matrix(m) if {"diameter", "typical"} & set(metrics) else None
    if "diameter" in metrics:
        row["diameter"] = int(dist.max())
    if "balls" in metrics:
        row["ball_violations"] = len(mt.check_ball_expansion(m))
    if "typical" in metrics:
        gaps = [s.gap for s in mt.typical_distance_sample(m, rng, cfg.pairs, dist)]
        row["gap_mean"] = float(np.mean(gaps))
        row["gap_abs_mean"] = float(np.mean(np.abs(gaps)))
    if "planarity" in metrics:
        row["planarity_radius"] = mt.planarity_radius(m, m.vertex_of[m.root])
    if "profile" in metrics:
        prof = sp.isoperimetric_profile(m, cfg.exact_faces, rng=rng)
        row["profile_method"] = prof.method
        row["profile"] = " ".join(f"{k}:{e.cut_any}" for k, e in prof.entries.items())
        row["profile_min_ratio"] = min(e.cut_any / k for k, e in prof.entries.items())
        row["profile_uncertified"] = sum(e.cut_multicurve != e.cut_any for e in prof.entries.values())
    if "cheeger" in metrics:
        ch = sp.cheeger(m, cfg.exact_vertices)
        row["cheeger"] = float(ch.value)
        row["cheeger_method"] = ch.method
    if "isolated" in metrics:
        row["isolated"] = (sp.isolated_faces(m, cfg.eps, cfg.exact_faces).count
                           if m.n_faces <= cfg.exact_faces else "")
    if "tentacles" in metrics:
        st = tt.tentacle_stats(m)
        row.update(T_n=st.T_n, nontrivial=st.nontrivial, M_n=st.M_n, ell_max=st.ell_max,
                   max_height=st.max_height,
                   heights=" ".join(f"{h}:{c}" for h, c in sorted(st.heights.items())))
    return row


def cmd_analyze(cfg: ExperimentConfig) -> int:
    rng = np.random.default_rng(cfg.seeds[0])
    rows = []
    with open(cfg.input) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            m = map_from_dict(rec)
            row = {"index": rec.get("index", len(rows))}
            row.update(analyze_map(m, cfg.metrics, cfg, rng))
            rows.append(row)
    _write_csv(cfg.out, cfg, rows)
    bad = [r["index"] for r in rows if r.get("ball_violations")]
    if bad:
        return _violation(cfg, f"ball expansion fails on maps {bad[:5]}")
    return EXIT_OK


def cmd_oracle(cfg: ExperimentConfig) -> int:
    cache = cache_dir(cfg)
    cs = [load_census(k, cache) for k in (1, 2, 3)]
    try:
        table = enumeration.calibrate_seed(*cs)
    except GenusLabError as exc:
        return _violation(cfg, f"recurrence does not match the census: {exc}")
    print(f"seed tau(0,0) = {table.seed_cell}")
    for c in cs:
        for g in range(enumeration.max_genus(c.n) + 1):
            print(f"n={c.n} g={g} census={c.count(g)} recurrence={table(c.n, g)}")
    if cfg.chi2:
        from scipy.stats import chisquare

        from .maps import canonical_key
        from .sampler import batch_sample

        for c in cs:
            for g, reps in c.representatives.items():
                if len(reps) < 2 or (c.n == 3 and g != 1):
                    continue
                idx = c.class_index(g)
                maps, _ = batch_sample(c.n, g, 200 * len(idx), [derived_seed(cfg.seeds[0], c.n, g)])
                counts = np.bincount([idx[canonical_key(m)] for m in maps], minlength=len(idx))
                p = chisquare(counts).pvalue
                print(f"chi2 n={c.n} g={g} classes={len(idx)} p={p:.4f}")
                if p < cfg.p_min:
                    return _violation(cfg, f"uniformity rejected at n={c.n} g={g} (p={p:.2e})")
    return EXIT_OK


def cmd_experiment(cfg: ExperimentConfig) -> int:
    from .sampler import batch_sample
    from .svg import scatter_svg

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    metrics = cfg.metrics or ("diameter", "typical", "profile", "cheeger", "tentacles")
    rows = []
    for n in cfg.sizes:
        g = math.floor(cfg.theta * n + 0.5)
        if n < 2 * g - 1:
            raise ConfigError(f"theta={cfg.theta} gives genus {g} > (n+1)/2 at n={n}")
        seeds = [derived_seed(s, n) for s in cfg.seeds]
        maps, stats = batch_sample(n, g, cfg.count, seeds)
        rng = np.random.default_rng(derived_seed(cfg.seeds[0], n, 1))
        for i, m in enumerate(maps):
            row = {"theta": cfg.theta, "n": n, "g": g, "sample": i}
            row.update(analyze_map(m, metrics, cfg, rng))
            row["acceptance"] = stats.acceptance_rate
            rows.append(row)
    stem = f"experiment_theta{cfg.theta:g}"
    _write_csv(str(out / f"{stem}.csv"), cfg, rows)
    if "diameter" in metrics:
        pts = [(math.log(r["n"]), r["diameter"]) for r in rows]
        scatter_svg({f"theta={cfg.theta:g}": pts}, out / f"{stem}_diameter.svg",
                    title="diameter against log n", xlabel="log n", ylabel="diameter",
                    comment=cfg.header()[2:])
    print(f"wrote {len(rows)} rows to {out / (stem + '.csv')}", file=sys.stderr)
    return EXIT_OK


HANDLERS = {
    "tau": cmd_tau,
    "constants": cmd_constants,
    "sample": cmd_sample,
    "analyze": cmd_analyze,
    "oracle": cmd_oracle,
    "experiment": cmd_experiment,
}


def _violation(cfg: ExperimentConfig, msg: str) -> int:
    if cfg.strict:
        raise InvariantViolation(msg)
    print(f"warning: {msg}", file=sys.stderr)
    return EXIT_OK


def run(cfg: ExperimentConfig) -> int:
    cfg.validate()
    return HANDLERS[cfg.command](cfg)


# -- argument parsing ---------------------------------------------------------

def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _grid(text: str) -> tuple[float, float, int]:
    try:
        a, b, s = text.split(",")
        return float(a), float(b), int(s)
    except ValueError:
        raise argparse.ArgumentTypeError("grid is lo,hi,steps")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="genuslab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_ints, default=(0,), dest="seeds",
                        help="seed or comma list of seeds")
    common.add_argument("--out")
    common.add_argument("--cache-dir")
    common.add_argument("--strict", action="store_true", help="exit 2 on any invariant violation")
    common.add_argument("--exact-faces", type=int, default=16)
    common.add_argument("--exact-vertices", type=int, default=16)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("tau", parents=[common], help="exact counts tau(n, g)")
    s.add_argument("--nmax", type=int, required=True)

    s = sub.add_parser("constants", parents=[common], help="theta constants")
    s.add_argument("--theta", type=float)
    s.add_argument("--grid", type=_grid, help="lo,hi,steps")

    s = sub.add_parser("sample", parents=[common], help="uniform triangulations")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--genus", type=int, required=True, dest="g")
    s.add_argument("--count", type=int, default=1)

    s = sub.add_parser("analyze", parents=[common], help="metrics of sampled maps")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--metrics", type=lambda t: tuple(x for x in t.split(",") if x), required=True)
    s.add_argument("--eps", type=float, default=0.25)
    s.add_argument("--pairs", type=int, default=100)

    s = sub.add_parser("oracle", parents=[common], help="census against recurrence")
    s.add_argument("--chi2", action="store_true", help="also test sampler uniformity")
    s.add_argument("--p-min", type=float, default=0.01)

    s = sub.add_parser("experiment", parents=[common], help="theta sweep over sizes")
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--sizes", type=_ints, required=True)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--metrics", type=lambda t: tuple(x for x in t.split(",") if x), default=())
    s.add_argument("--pairs", type=int, default=100)
    s.add_argument("--eps", type=float, default=0.25)
    return p


def config_from_args(argv: Sequence[str] | None = None) -> ExperimentConfig:
    ns = vars(build_parser().parse_args(argv))
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    return ExperimentConfig(**{k: v for k, v in ns.items() if k in known and v is not None})


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except SystemExit as exc:  # argparse
        return EXIT_CONFIG if exc.code else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

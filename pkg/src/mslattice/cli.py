"""Command-line harness: experiment configs, error estimation, CSV output.

Experiments:

* ``shift_growth`` — shift counts S of every strategy across lattice sizes
  (no function sampling, so very large N stays cheap);
* ``stability``   — adaptive vs probabilistic shift counts and Gram
  condition numbers;
* ``korobov_f1``  — L2/L-inf convergence on a smooth periodic product
  test function at alpha = 5/2;
* ``pde``         — relative L2 convergence of a non-periodic source and
  its Neumann-Poisson solution at alpha = 1.5;
* ``kernels``     — numba vs numpy timing of the two hot kernels.

All runs are deterministic given the config and seeds. CSV files use one
fixed wide schema with blank cells where a column does not apply.
"""

import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .cbc import cbc_construct, worst_case_P
from .korobov import SpaceParams, geometric_weights
from .pipeline import build_pipeline, probabilistic_counts, strategy_survey
from .reconstruct import approximate, gram_diagnostics
from .cosine_pde import approximate_nonperiodic, poisson_solve
from .shifts import nearest_prime

__all__ = ["ExperimentConfig", "parse_config", "estimate_errors",
           "f1_periodic", "pde_source", "pde_solution", "pde_mean",
           "run_experiment", "main"]

CSV_HEADER = ["d", "N", "strategy", "S", "N_tot", "R", "max_kappa",
              "l2", "linf", "rel_l2", "rel_linf", "rel_l2_u", "wall_time"]

_CONVERGENCE_N = [2 ** e for e in range(7, 13)]
_SHIFT_GROWTH_N = [2 ** e for e in range(10, 21)]


@dataclass
class ExperimentConfig:
    """All knobs of one experiment run; every field has a usable default."""

    d: int = 2
    alpha: float = 2.5
    gamma_ratio: float = 2.0 ** (-0.1)
    t: float = 0.95
    n_list: list = field(default_factory=lambda: list(_CONVERGENCE_N))
    m_mode: str = "bisection"
    strategy: str = "adaptive"
    delta_mode: str = "zero"         # zero | random
    delta_count: int = 10
    delta_seed: int = 7
    budget: int = 2 ** 14
    seed: int = 0
    out: str = "."

    def __post_init__(self):
        if not 0.0 < self.t < 1.0:
            raise ValueError("t must lie in (0, 1)")
        # lattice sizes are nudged to the nearest primes up front
        self.n_list = [nearest_prime(n) for n in self.n_list]
        if self.delta_mode not in ("zero", "random"):
            raise ValueError(f"unknown delta mode {self.delta_mode!r}")

    def space(self, alpha=None) -> SpaceParams:
        return SpaceParams(d=self.d, alpha=self.alpha if alpha is None else alpha,
                           gamma=geometric_weights(self.d, self.gamma_ratio))


_INT_KEYS = {"d", "delta_count", "delta_seed", "budget", "seed"}
_FLOAT_KEYS = {"alpha", "gamma_ratio", "t"}


def parse_config(path) -> ExperimentConfig:
    """Read a key = value config file (one pair per line, # comments)."""
    cfg = ExperimentConfig()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if not hasattr(cfg, key):
            raise ValueError(f"unknown config key {key!r}")
        if key == "n_list":
            parsed = [int(v) for v in val.replace(",", " ").split()]
        elif key in _INT_KEYS:
            parsed = int(val)
        elif key in _FLOAT_KEYS:
            parsed = float(val)
        else:
            parsed = val
        setattr(cfg, key, parsed)
    cfg.__post_init__()
    return cfg


def estimate_errors(f_true, approx_eval, d: int, budget: int, seed: int,
                    extra_points=None) -> dict:
    """Sampled L2 / L-inf error estimates with relative variants.

    L2 is the root-mean-square over a seeded uniform sample; L-inf is the
    max over the same sample augmented with ``extra_points`` (typically
    the lattice nodes). Relative errors divide by same-sample norms of
    the reference.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    pts = rng.random((budget, d))
    ref = np.asarray(f_true(pts), dtype=np.complex128)
    err = np.asarray(approx_eval(pts), dtype=np.complex128) - ref
    l2 = float(np.sqrt(np.mean(np.abs(err) ** 2)))
    ref_l2 = float(np.sqrt(np.mean(np.abs(ref) ** 2)))
    linf = float(np.abs(err).max())
    ref_linf = float(np.abs(ref).max())
    if extra_points is not None and len(extra_points):
        extra = np.asarray(extra_points, dtype=np.float64)
        ref_x = np.asarray(f_true(extra), dtype=np.complex128)
        err_x = np.asarray(approx_eval(extra), dtype=np.complex128) - ref_x
        linf = max(linf, float(np.abs(err_x).max()))
        ref_linf = max(ref_linf, float(np.abs(ref_x).max()))
    if ref_l2 < 1e-300 or ref_linf < 1e-300:
        raise ValueError("reference norm too small for relative errors")
    return {"l2": l2, "linf": linf,
            "rel_l2": l2 / ref_l2, "rel_linf": linf / ref_linf}


# --- benchmark targets ------------------------------------------------------

def f1_periodic(x):
    """prod_j (x_j - 1/2)^2 sin(2 pi x_j - pi); smooth and periodic."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return np.prod((x - 0.5) ** 2 * np.sin(2.0 * np.pi * x - np.pi), axis=1)


def _u_factor(x, g):
    return 1.0 / 630.0 + g * (x ** 2 * (1.0 - x) ** 2 - 1.0 / 630.0)


def pde_solution(x, gamma):
    """Product-form exact Neumann-Poisson solution."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    out = np.ones(x.shape[0])
    for j, g in enumerate(gamma):
        out *= _u_factor(x[:, j], g)
    return out


def pde_source(x, gamma):
    """Laplacian of the product solution: oscillatory polynomial source."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    factors = np.stack([_u_factor(x[:, j], g) for j, g in enumerate(gamma)])
    out = np.zeros(x.shape[0])
    for j, g in enumerate(gamma):
        second = g * (12.0 * x[:, j] ** 2 - 12.0 * x[:, j] + 2.0)
        rest = np.prod(np.delete(factors, j, axis=0), axis=0) \
            if len(gamma) > 1 else 1.0
        out += second * rest
    return out


def pde_mean(gamma) -> float:
    """Mean of the exact solution: prod_i (1 + 20 gamma_i) / 630."""
    return float(np.prod([(1.0 + 20.0 * g) / 630.0 for g in gamma]))


# --- experiment drivers -----------------------------------------------------

def _blank_row(**kw):
    row = {k: "" for k in CSV_HEADER}
    row.update(kw)
    return row


def _write_csv(path, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        writer.writerows(rows)
    return path


def _fmt(v):
    return f"{v:.6e}" if isinstance(v, float) else v


def _shift_growth_rows(cfg: ExperimentConfig):
    params = cfg.space()
    rows = []
    for N in cfg.n_list:
        t0 = time.perf_counter()
        pipe = build_pipeline(params, N, m_mode=cfg.m_mode)
        sizes = strategy_survey(pipe, cfg.t)
        prob = probabilistic_counts(pipe.R, N, cfg.t)
        wall = time.perf_counter() - t0
        for name, S in sizes.items():
            if S is None:
                continue
            rows.append(_blank_row(d=cfg.d, N=N, strategy=name, S=S,
                                   N_tot=N * S, R=pipe.R,
                                   wall_time=_fmt(wall)))
        for name in ("standard", "simplified"):
            S = prob[name]
            rows.append(_blank_row(d=cfg.d, N=N, strategy=f"prob_{name}",
                                   S=S, N_tot=N * S, R=pipe.R,
                                   wall_time=_fmt(wall)))
    return rows


def _stability_rows(cfg: ExperimentConfig):
    params = cfg.space()
    rows = []
    for N in cfg.n_list:
        t0 = time.perf_counter()
        pipe = build_pipeline(params, N, m_mode=cfg.m_mode)
        prob = probabilistic_counts(pipe.R, N, cfg.t)
        Y = pipe.shifts(cfg.t, "adaptive")
        diag = gram_diagnostics(pipe.partition, Y)
        rows.append(_blank_row(d=cfg.d, N=N, strategy="adaptive", S=Y.S,
                               N_tot=N * Y.S, R=pipe.R,
                               max_kappa=_fmt(diag.max_kappa),
                               wall_time=_fmt(time.perf_counter() - t0)))
        t0 = time.perf_counter()
        Yp = pipe.shifts(cfg.t, "probabilistic", seed=cfg.seed, K=prob["K"])
        diag_p = gram_diagnostics(pipe.partition, Yp)
        rows.append(_blank_row(d=cfg.d, N=N, strategy="prob_simplified",
                               S=Yp.S, N_tot=N * Yp.S, R=pipe.R,
                               max_kappa=_fmt(diag_p.max_kappa),
                               wall_time=_fmt(time.perf_counter() - t0)))
        S_std = prob["standard"]
        rows.append(_blank_row(d=cfg.d, N=N, strategy="prob_standard",
                               S=S_std, N_tot=N * S_std, R=pipe.R))
    return rows


def _deltas(cfg: ExperimentConfig):
    if cfg.delta_mode == "zero":
        return [np.zeros(cfg.d)]
    rng = np.random.default_rng(cfg.delta_seed)
    return [rng.random(cfg.d) for _ in range(cfg.delta_count)]


def _korobov_rows(cfg: ExperimentConfig):
    params = cfg.space(alpha=2.5)
    rows = []
    for N in cfg.n_list:
        t0 = time.perf_counter()
        pipe = build_pipeline(params, N, m_mode=cfg.m_mode)
        Y = pipe.shifts(cfg.t, cfg.strategy, seed=cfg.seed)
        nodes = pipe.lattice.points()
        l2_sq, linf, rel_l2_sq, rel_linf = 0.0, 0.0, 0.0, 0.0
        deltas = _deltas(cfg)
        for delta in deltas:
            apx = approximate(f1_periodic, pipe.lattice, pipe.index_set,
                              pipe.partition, Y, delta=delta)
            est = estimate_errors(f1_periodic, apx, cfg.d, cfg.budget,
                                  cfg.seed, extra_points=nodes)
            # random-delta mode averages the *squared* L2 error
            l2_sq += est["l2"] ** 2
            rel_l2_sq += est["rel_l2"] ** 2
            linf = max(linf, est["linf"])
            rel_linf = max(rel_linf, est["rel_linf"])
        rows.append(_blank_row(
            d=cfg.d, N=N, strategy=Y.strategy, S=Y.S, N_tot=N * Y.S,
            R=pipe.R, l2=_fmt(math.sqrt(l2_sq / len(deltas))),
            linf=_fmt(linf), rel_l2=_fmt(math.sqrt(rel_l2_sq / len(deltas))),
            rel_linf=_fmt(rel_linf),
            wall_time=_fmt(time.perf_counter() - t0)))
    return rows


def _pde_rows(cfg: ExperimentConfig):
    params = cfg.space(alpha=1.5)
    gamma = params.gamma
    mean_u = pde_mean(gamma)

    def f(x):
        return pde_source(x, gamma)

    def u(x):
        return pde_solution(x, gamma)

    rows = []
    for N in cfg.n_list:
        t0 = time.perf_counter()
        pipe = build_pipeline(params, N, m_mode=cfg.m_mode)
        Y = pipe.shifts(cfg.t, cfg.strategy, seed=cfg.seed)
        sol = poisson_solve(f, mean_u, pipe.lattice, pipe.index_set,
                            pipe.partition, Y)
        est_f = estimate_errors(f, sol.source, cfg.d, cfg.budget, cfg.seed)
        est_u = estimate_errors(u, sol, cfg.d, cfg.budget, cfg.seed)
        rows.append(_blank_row(
            d=cfg.d, N=N, strategy=Y.strategy, S=Y.S, N_tot=N * Y.S,
            R=pipe.R, l2=_fmt(est_f["l2"]), linf=_fmt(est_f["linf"]),
            rel_l2=_fmt(est_f["rel_l2"]), rel_linf=_fmt(est_f["rel_linf"]),
            rel_l2_u=_fmt(est_u["rel_l2"]),
            wall_time=_fmt(time.perf_counter() - t0)))
    return rows


def _kernel_bench_rows(cfg: ExperimentConfig):
    """Time the numba kernels against the numpy fallback."""
    rng = np.random.default_rng(cfg.seed)
    rows = []
    N = nearest_prime(4096)
    q = rng.random(N)
    psi = rng.random(N)
    p = nearest_prime(509)
    numer = rng.integers(0, p, size=(p, cfg.d), dtype=np.int64)
    hmod = rng.integers(0, p, size=(5000, cfg.d), dtype=np.int64)
    cases = [("cbc_sweep", _kernels.cbc_sweep, _kernels.cbc_sweep_numpy,
              (q, psi)),
             ("block_expsum", _kernels.block_expsum,
              _kernels.block_expsum_numpy, (numer, hmod, p))]
    for name, fast, slow, args in cases:
        ref = slow(*args)
        if _kernels.USE_NUMBA:
            fast(*args)  # warm up the JIT outside the timed region
        for label, fn in (("numba" if _kernels.USE_NUMBA else "numpy", fast),
                          ("numpy", slow)):
            t0 = time.perf_counter()
            out = fn(*args)
            wall = time.perf_counter() - t0
            err = float(np.abs(out - ref).max())
            rows.append(_blank_row(d=cfg.d, N=N, strategy=f"{name}/{label}",
                                   linf=_fmt(err), wall_time=_fmt(wall)))
    return rows


_EXPERIMENTS = {
    "shift_growth": _shift_growth_rows,
    "stability": _stability_rows,
    "korobov_f1": _korobov_rows,
    "pde": _pde_rows,
    "kernels": _kernel_bench_rows,
}

_GNUPLOT = """set datafile separator ','
set logscale xy
set key outside
set xlabel 'N'
set ylabel 'value'
plot '{csv}' using 2:8 with linespoints title 'l2'
"""


def run_experiment(cfg: ExperimentConfig, which: str, emit_gnuplot=False):
    """Run one named experiment and write its CSV; returns the file path."""
    if which not in _EXPERIMENTS:
        raise ValueError(f"unknown experiment {which!r}")
    rows = _EXPERIMENTS[which](cfg)
    path = _write_csv(Path(cfg.out) / f"{which}.csv", rows)
    if emit_gnuplot:
        gp = Path(cfg.out) / f"{which}.gp"
        gp.write_text(_GNUPLOT.format(csv=path.name), encoding="utf-8")
    return path


# --- argument parsing -------------------------------------------------------

def _load_cfg(args) -> ExperimentConfig:
    cfg = parse_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    if getattr(args, "d", None) is not None:
        overrides["d"] = args.d
    if getattr(args, "N", None) is not None:
        overrides["n_list"] = [args.N]
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if overrides:
        cfg = replace(cfg, **overrides)
    if args.threads is not None and _kernels.USE_NUMBA:
        import numba
        numba.set_num_threads(args.threads)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mslattice",
        description="deterministic multiple-shift lattice approximation")
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--emit-gnuplot", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, hint in (("cbc", "print the CBC generating vector"),
                       ("shifts", "print the per-strategy shift counts"),
                       ("approx", "one periodic approximation run"),
                       ("pde", "one Poisson-solve run")):
        p = sub.add_parser(name, help=hint)
        p.add_argument("-d", type=int, default=None, dest="d")
        p.add_argument("-N", type=int, default=None, dest="N")
        p.add_argument("--alpha", type=float, default=None)

    p_bench = sub.add_parser("bench", help="run a benchmark experiment")
    p_bench.add_argument("which", choices=sorted(_EXPERIMENTS))
    p_bench.add_argument("-d", type=int, default=None, dest="d")
    p_bench.add_argument("--alpha", type=float, default=None)

    args = parser.parse_args(argv)
    cfg = _load_cfg(args)

    if args.command == "cbc":
        N = cfg.n_list[0]
        params = cfg.space()
        lat = cbc_construct(params, N)
        print(f"N={lat.N} g={lat.g} "
              f"P={worst_case_P(max(1, int(params.alpha)), params.gamma, lat.N, lat.g):.6e}")
    elif args.command == "shifts":
        N = cfg.n_list[0]
        pipe = build_pipeline(cfg.space(), N, m_mode=cfg.m_mode)
        sizes = strategy_survey(pipe, cfg.t)
        prob = probabilistic_counts(pipe.R, N, cfg.t)
        print(f"N={N} d={cfg.d} R={pipe.R} |A|={len(pipe.index_set)}")
        for name, S in sizes.items():
            print(f"  {name:16s} S={S}")
        print(f"  {'prob_simplified':16s} S={prob['simplified']}")
        print(f"  {'prob_standard':16s} S={prob['standard']}")
    elif args.command == "approx":
        path = run_experiment(replace(cfg, n_list=cfg.n_list[:1]),
                              "korobov_f1", args.emit_gnuplot)
        print(path)
    elif args.command == "pde":
        path = run_experiment(replace(cfg, n_list=cfg.n_list[:1]),
                              "pde", args.emit_gnuplot)
        print(path)
    elif args.command == "bench":
        path = run_experiment(cfg, args.which, args.emit_gnuplot)
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

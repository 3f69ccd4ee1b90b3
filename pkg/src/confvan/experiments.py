"""Seeded Monte-Carlo experiment drivers.

Three sweep families, one record schema:

* sigma sweep    -- smallest singular value of the measurement matrix of a
                    clustered configuration versus the super-resolution
                    factor SRF = 1/(N*delta), with both certificates.
* rayleigh sweep -- Rayleigh quotient of the finite-difference test vector
                    against sigma_min of the torus-side matrix.
* esprit sweep   -- recovery errors of the subspace estimator on
                    near-worst-case signals with bounded noise.

Each trial draws (SRF, N) from a child of one master seed, so a config
fixes every byte of the emitted CSV/JSON.  Per-trial failures are recorded
in the ``status`` column, never raised out of a sweep.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .bounds import certificate_report, fd_coefficients, u_vector
from .matrices import (confluent_apply_norm_mp, phi_apply_norm_mp,
                       phi_sigma_min_auto, sigma_min_auto)
from .recovery import esprit_recover, match_and_error
from .signals import (TWO_PI, ClusterParams, NoiseSpec, SpikeSignal,
                      as_nodes, minimal_separation, sample_measurements,
                      validate_cluster_config, wraparound_distance)

__all__ = [
    "COLUMNS",
    "DEFAULT_CONFIG",
    "ExperimentRecord",
    "Scenario",
    "adversarial_cluster",
    "any_failures",
    "as_row",
    "certify_run",
    "emit_results",
    "fit_loglog_slope",
    "generate_scenario",
    "load_rows",
    "normalize_config",
    "run_esprit_sweep",
    "run_rayleigh_sweep",
    "run_sigma_sweep",
]

SCENARIO_KINDS = ("single_cluster", "multi_cluster")

# Output schema; the column order is part of the external contract.
COLUMNS = ("trial", "seed", "kind", "s", "ell", "delta", "N", "srf",
           "sigma_min", "lower_cert", "upper_cert", "epsilon",
           "E_xi", "E_a", "E_b", "E_total", "status")

DEFAULT_CONFIG = {
    "kind": "single_cluster",
    "s": 2,
    "ell": 2,
    "ell1": 2,
    "ell2": 2,
    "trials": 200,
    "seed": 2024,
    "srf_min": 10.0,
    "srf_max": 1000.0,
    "n_min": 16,
    "n_max": 128,
    "epsilon": 1e-12,
    "noise": "bounded-uniform",
}

_INT_KEYS = ("s", "ell", "ell1", "ell2", "trials", "seed", "n_min", "n_max")
_FLOAT_KEYS = ("srf_min", "srf_max", "epsilon")
_STR_KEYS = ("kind", "noise")

# The float64 finite-difference probe achieves matrix-vector quotients down
# to ~1e-14 before solve rounding dominates; recovery-sweep trials whose
# quotient lands below this two-decade guard are flagged "breakdown".
PROBE_FLOOR = 1e-12


# =============================================================================
# Scenario layout
# =============================================================================

@dataclass(frozen=True)
class Scenario:
    """One trial's deterministic inputs.

    single_cluster: ell nodes spaced delta apart ascending from -pi/2,
    with the remaining s - ell nodes equally spaced over the rest of the
    half-circle.  multi_cluster: a second cluster of size ell2 descends
    from pi/2 (ell = max(ell1, ell2)).  seed records the trial's RNG
    stream identity for reproducibility bookkeeping.
    """

    kind: str
    s: int
    ell: int
    delta: float
    N: int
    seed: int
    ell1: int | None = None
    ell2: int | None = None

    def __post_init__(self):
        assert self.kind in SCENARIO_KINDS, f"unknown scenario kind {self.kind!r}"
        assert 2 <= self.ell <= self.s, (
            f"need 2 <= ell <= s, got ell={self.ell}, s={self.s}"
        )
        assert self.delta > 0, f"delta must be positive, got {self.delta}"
        assert self.ell * self.delta < math.pi, (
            f"cluster span ell*delta = {self.ell * self.delta:.6g} must stay "
            f"below pi"
        )
        assert self.N >= 1, f"N must be a positive integer, got {self.N}"
        assert self.seed >= 0, f"seed must be a nonnegative integer, got {self.seed}"
        if self.kind == "multi_cluster":
            assert self.ell1 is not None and self.ell2 is not None, (
                "multi_cluster needs ell1 and ell2"
            )
            assert self.ell1 >= 2 and self.ell2 >= 2, (
                f"cluster sizes must be >= 2, got ell1={self.ell1}, "
                f"ell2={self.ell2}"
            )
            assert self.ell1 + self.ell2 <= self.s, (
                f"clusters need ell1 + ell2 <= s, got {self.ell1} + "
                f"{self.ell2} > {self.s}"
            )
            assert self.ell == max(self.ell1, self.ell2), (
                f"ell must equal max(ell1, ell2) = "
                f"{max(self.ell1, self.ell2)}, got {self.ell}"
            )


def generate_scenario(sc: Scenario):
    """Deterministic node layout for a scenario.

    Returns (nodes, params) where params are derived from the realized
    distances (measured minimal separation, spread and cross-cluster gap)
    so the configuration validates exactly under
    :func:`validate_cluster_config`.
    """
    d = sc.delta
    if sc.kind == "single_cluster":
        groups = [-0.5 * math.pi + d * np.arange(sc.ell)]
        lo = -0.5 * math.pi + sc.ell * d
        hi = 0.5 * math.pi
    else:
        if (sc.ell1 + sc.ell2) * d >= math.pi:
            raise ValueError(
                f"infeasible packing: clusters of span "
                f"{(sc.ell1 + sc.ell2) * d:.6g} cannot fit the half-circle"
            )
        groups = [-0.5 * math.pi + d * np.arange(sc.ell1),
                  np.sort(0.5 * math.pi - d * np.arange(sc.ell2))]
        lo = -0.5 * math.pi + sc.ell1 * d
        hi = 0.5 * math.pi - sc.ell2 * d

    n_extra = sc.s - sum(g.size for g in groups)
    if n_extra > 0:
        if hi <= lo:
            raise ValueError(
                f"infeasible packing: no room for {n_extra} extra nodes in "
                f"({lo:.6g}, {hi:.6g})"
            )
        gap = (hi - lo) / (n_extra + 1)
        groups.extend(np.array([lo + k * gap]) for k in range(1, n_extra + 1))

    # canonicalize first: downstream certificates re-normalize the nodes,
    # and params measured on un-normalized angles can land one ulp off
    nodes = as_nodes(np.concatenate(groups))
    labels = np.concatenate([np.full(g.size, i) for i, g in enumerate(groups)])

    delta_p = minimal_separation(nodes)
    dist = wraparound_distance(nodes[:, None] - nodes[None, :])
    same = labels[:, None] == labels[None, :]
    off_diag = ~np.eye(nodes.size, dtype=bool)
    intra = dist[same & off_diag]
    cross = dist[~same]
    spread = float(intra.max()) if intra.size else delta_p
    # tiny headroom so fl(tau * delta) never rounds below the spread
    tau_p = max(float(sc.ell - 1), spread / delta_p * (1.0 + 1e-12))
    radius = tau_p * delta_p
    rho_p = float(cross.min()) if cross.size else math.pi
    if cross.size and rho_p <= radius:
        raise ValueError(
            f"infeasible packing: cross-cluster gap {rho_p:.6g} does not "
            f"clear the cluster radius {radius:.6g}"
        )

    params = ClusterParams(delta=delta_p, rho=rho_p, s=sc.s, ell=sc.ell,
                           tau=tau_p)
    report = validate_cluster_config(nodes, params)
    assert report.ok, (
        f"generated configuration failed validation: {report.first_violation()}"
    )
    return nodes, params


def adversarial_cluster(ell: int, delta: float) -> np.ndarray:
    """Equispaced 2*ell-node cluster centered at 0, the input layout for
    the adversarial-pair construction (each split half is then an ell-node
    cluster at spacing 2*delta)."""
    assert ell >= 1 and delta > 0
    assert (2 * ell - 1) * delta < math.pi, "cluster span must stay below pi"
    return delta * (np.arange(2 * ell) - (2 * ell - 1) / 2.0)


# =============================================================================
# Records
# =============================================================================

@dataclass(frozen=True)
class ExperimentRecord:
    """One trial's inputs and outputs; None marks a value the sweep does
    not produce (serialized as empty CSV cell / JSON null)."""

    trial: int
    scenario: Scenario
    srf: float
    sigma_min: float | None = None
    lower_cert: float | None = None
    upper_cert: float | None = None
    epsilon: float | None = None
    esprit_errors: tuple[float, float, float, float] | None = None
    status: str = "ok"

    def __post_init__(self):
        assert self.trial >= 0, f"trial index must be >= 0, got {self.trial}"
        assert self.srf > 0, f"srf must be positive, got {self.srf}"
        assert self.sigma_min is None or self.sigma_min >= 0, (
            f"sigma_min must be nonnegative, got {self.sigma_min}"
        )
        assert self.esprit_errors is None or len(self.esprit_errors) == 4, (
            "esprit_errors must hold (E_xi, E_a, E_b, E_total)"
        )


def as_row(rec: ExperimentRecord) -> dict:
    """Record projected onto the output schema, keyed by COLUMNS."""
    e = rec.esprit_errors
    return {
        "trial": rec.trial,
        "seed": rec.scenario.seed,
        "kind": rec.scenario.kind,
        "s": rec.scenario.s,
        "ell": rec.scenario.ell,
        "delta": rec.scenario.delta,
        "N": rec.scenario.N,
        "srf": rec.srf,
        "sigma_min": rec.sigma_min,
        "lower_cert": rec.lower_cert,
        "upper_cert": rec.upper_cert,
        "epsilon": rec.epsilon,
        "E_xi": None if e is None else e[0],
        "E_a": None if e is None else e[1],
        "E_b": None if e is None else e[2],
        "E_total": None if e is None else e[3],
        "status": rec.status,
    }


def any_failures(records) -> bool:
    """True when any trial failed outright.  A record whose certificate
    was inadmissible is complete data, not a failure."""
    return any(r.status.startswith("failed") for r in records)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_results(records, path, format: str = "csv") -> None:
    """Write records to ``path`` in the fixed column order.

    CSV: header always present, floats via repr (shortest round-trip),
    missing values as empty cells.  JSON: a list of objects with the same
    keys and values (missing = null), so both formats encode identical
    data.
    """
    assert format in ("csv", "json"), f"unknown output format {format!r}"
    rows = [as_row(r) for r in records]
    if format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(COLUMNS)
            for row in rows:
                writer.writerow([_cell(row[c]) for c in COLUMNS])
    else:
        with open(path, "w") as fh:
            json.dump([{c: row[c] for c in COLUMNS} for row in rows], fh,
                      indent=1)
            fh.write("\n")


def load_rows(path, format: str = "csv") -> list[dict]:
    """Parse an emitted results file back into row dictionaries with
    numeric fields typed (empty cell / null -> None)."""
    assert format in ("csv", "json"), f"unknown output format {format!r}"
    if format == "json":
        with open(path) as fh:
            data = json.load(fh)
        return [{c: row[c] for c in COLUMNS} for row in data]
    int_cols = ("trial", "seed", "s", "ell", "N")
    float_cols = ("delta", "srf", "sigma_min", "lower_cert", "upper_cert",
                  "epsilon", "E_xi", "E_a", "E_b", "E_total")
    out = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            row: dict = {}
            for c in COLUMNS:
                text = raw[c]
                if c in int_cols:
                    row[c] = int(text)
                elif c in float_cols:
                    row[c] = None if text == "" else float(text)
                else:
                    row[c] = text
            out.append(row)
    return out


# =============================================================================
# Config handling and seeded draws
# =============================================================================

def normalize_config(config: dict | None) -> dict:
    """Overlay a partial config on the defaults, with type coercion and
    unknown-key rejection (catches config-file typos)."""
    cfg = dict(DEFAULT_CONFIG)
    for key, value in (config or {}).items():
        if key not in cfg:
            raise ValueError(
                f"unknown config key {key!r}; valid keys: "
                f"{', '.join(sorted(cfg))}"
            )
        if key in _INT_KEYS:
            cfg[key] = int(value)
        elif key in _FLOAT_KEYS:
            cfg[key] = float(value)
        else:
            cfg[key] = str(value)

    assert cfg["kind"] in SCENARIO_KINDS, f"unknown kind {cfg['kind']!r}"
    if cfg["kind"] == "multi_cluster":
        cfg["ell"] = max(cfg["ell1"], cfg["ell2"])
    assert cfg["trials"] >= 0, "trials must be >= 0"
    assert cfg["seed"] >= 0, "seed must be >= 0"
    assert 1.0 < cfg["srf_min"] <= cfg["srf_max"], (
        f"need 1 < srf_min <= srf_max, got [{cfg['srf_min']}, {cfg['srf_max']}]"
    )
    assert 1 <= cfg["n_min"] <= cfg["n_max"], (
        f"need 1 <= n_min <= n_max, got [{cfg['n_min']}, {cfg['n_max']}]"
    )
    assert cfg["epsilon"] >= 0, "epsilon must be nonnegative"
    assert cfg["noise"] in ("none", "bounded-uniform", "complex-gaussian"), (
        f"unknown noise kind {cfg['noise']!r}"
    )
    return cfg


def _trial_streams(master_seed: int, trials: int):
    """Independent RNG streams, one per trial, each tagged with a 64-bit
    identity recorded in the seed column."""
    children = np.random.SeedSequence(master_seed).spawn(trials)
    return [(np.random.default_rng(c), int(c.generate_state(1, np.uint64)[0]))
            for c in children]


def _draw_log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def _draw_log_uniform_int(rng: np.random.Generator, lo: int, hi: int) -> int:
    v = int(round(np.exp(rng.uniform(np.log(lo), np.log(hi)))))
    return min(max(v, lo), hi)


def _draw_geometry(rng, cfg):
    """(srf, N, delta) for one trial: SRF and N log-uniform, delta solved
    from srf = 1/(N*delta) so every trial lands inside the sweep's SRF
    window."""
    srf = _draw_log_uniform(rng, cfg["srf_min"], cfg["srf_max"])
    N = _draw_log_uniform_int(rng, cfg["n_min"], cfg["n_max"])
    return srf, N, 1.0 / (N * srf)


# =============================================================================
# Sweeps
# =============================================================================

def run_sigma_sweep(config: dict | None = None) -> list[ExperimentRecord]:
    """Per trial: draw (SRF, N), lay out the scenario, record sigma_min of
    the measurement matrix plus both certificates (with bandwidth
    Omega = N, so decimation strides are integer row subsets)."""
    cfg = normalize_config(config)
    if cfg["n_min"] < 2 * cfg["s"]:
        raise ValueError(
            f"n_min = {cfg['n_min']} is below 2s = {2 * cfg['s']}; the "
            f"decimation window would be empty"
        )
    records = []
    for trial, (rng, seed64) in enumerate(_trial_streams(cfg["seed"],
                                                         cfg["trials"])):
        srf, N, delta = _draw_geometry(rng, cfg)
        sc = Scenario(kind=cfg["kind"], s=cfg["s"], ell=cfg["ell"],
                      delta=delta, N=N, seed=seed64,
                      ell1=cfg["ell1"] if cfg["kind"] == "multi_cluster" else None,
                      ell2=cfg["ell2"] if cfg["kind"] == "multi_cluster" else None)
        try:
            nodes, params = generate_scenario(sc)
            rep = certificate_report(nodes, params, Omega=float(N), N=N)
            rec = ExperimentRecord(
                trial=trial, scenario=sc, srf=srf,
                sigma_min=rep["sigma_min"],
                lower_cert=rep["lower_certificate"],
                upper_cert=rep["upper_certificate"],
                status="ok" if rep["admissible"] else "inadmissible")
        except Exception as exc:
            rec = ExperimentRecord(trial=trial, scenario=sc, srf=srf,
                                   status=f"failed: {exc}")
        records.append(rec)
    return records


def run_rayleigh_sweep(config: dict | None = None) -> list[ExperimentRecord]:
    """Per trial: equispaced torus cluster of size ell, record sigma_min
    of the (M+1) x 2*ell torus matrix in the sigma_min column and the
    Rayleigh quotient of the finite-difference vector in upper_cert."""
    cfg = normalize_config(config)
    ell = cfg["ell"]
    if cfg["n_min"] < 2 * ell:
        raise ValueError(
            f"n_min = {cfg['n_min']} is below 2*ell = {2 * ell}; the torus "
            f"matrix would be wider than tall"
        )
    records = []
    for trial, (rng, seed64) in enumerate(_trial_streams(cfg["seed"],
                                                         cfg["trials"])):
        srf, M, dw = _draw_geometry(rng, cfg)
        sc = Scenario(kind="single_cluster", s=ell, ell=ell, delta=dw, N=M,
                      seed=seed64)
        try:
            tau = np.arange(ell, dtype=np.float64)
            alpha = M * dw
            u = u_vector(tau, alpha, M, ell)
            omega = (alpha / M) * tau  # the spacing u_vector used
            quotient = (phi_apply_norm_mp(omega, M, u)
                        / float(np.linalg.norm(u)))
            rec = ExperimentRecord(trial=trial, scenario=sc, srf=srf,
                                   sigma_min=phi_sigma_min_auto(omega, M),
                                   upper_cert=quotient)
        except Exception as exc:
            rec = ExperimentRecord(trial=trial, scenario=sc, srf=srf,
                                   status=f"failed: {exc}")
        records.append(rec)
    return records


def _near_kernel_signal(nodes) -> SpikeSignal:
    """Unit-norm signal whose coefficients follow the finite-difference
    test vector of the cluster, mapped from the torus to the spike side
    through the exact sign bridge; its measurements nearly vanish, which
    is what makes recovery noise-dominated."""
    xi = np.atleast_1d(np.asarray(nodes, dtype=np.float64))
    s = xi.size
    om = xi / (-TWO_PI) + 0.5
    rel = om - om[0]
    rel -= np.round(rel)
    order = np.argsort(rel)
    xi, rel = xi[order], rel[order]
    d = minimal_separation(xi) / TWO_PI
    tau = (rel - rel[0]) / d
    fd = fd_coefficients(tau, h=-d)
    z = np.exp(-2j * np.pi * om[order])
    u_a = d ** (2 * s - 1) * fd.A
    u_b = d ** (2 * s - 1) * (2j * np.pi) * z * fd.B
    a = u_a
    b = -1j * u_b * np.exp(-1j * xi)
    scale = math.hypot(float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    return SpikeSignal(nodes=xi, a=a / scale, b=b / scale)


def run_esprit_sweep(config: dict | None = None) -> list[ExperimentRecord]:
    """Per trial: the two-signal ambiguity experiment on a doubled cluster.

    2s equispaced nodes at the drawn spacing carry the finite-difference
    near-kernel coefficients; the even and odd halves, scaled by
    epsilon over the achieved matrix-vector norm, are two s-node signals
    whose exact data differ by epsilon in the averaged norm.  The sweep
    samples noisy measurements of the first half, runs subspace recovery
    with model order s, and records the component-wise max of the matched
    errors against both halves; no estimator can push that max below
    lower_cert = epsilon / (2 sigma_quotient).  sigma_min records the
    doubled cluster's actual smallest singular value and upper_cert the
    quotient that scales the construction.

    Trials are flagged "breakdown" (and skipped by slope fits) when the
    float64 probe stops certifying the construction (quotient below
    PROBE_FLOOR, so the scaling is rounding-dominated), when the node
    estimate misses the generating half by more than the doubled
    cluster's span (total localization failure; happens at the low-SRF
    end, where the construction's amplitude shrinks faster than the
    conditioning improves), or when the estimate degenerates outright.
    All three are expected somewhere in a wide sweep and are recorded as
    data, not failures.

    epsilon = 0 switches to round-trip mode: the first half keeps unit
    scale, its exact samples go through recovery unperturbed and the
    errors are measured against that generating signal alone.  Sample
    rounding still acts as noise of size ~1e-16 * N, so the error floor
    ~1e-16 * N * SRF^(4s-1) leaves clean round trips to moderate SRF
    only."""
    cfg = normalize_config(config)
    if cfg["kind"] != "single_cluster" or cfg["s"] != cfg["ell"]:
        raise ValueError(
            f"the recovery sweep needs a single cluster with s = ell, got "
            f"kind={cfg['kind']!r}, s={cfg['s']}, ell={cfg['ell']}"
        )
    if cfg["n_min"] < 2 * cfg["s"]:
        raise ValueError(
            f"n_min = {cfg['n_min']} is below 2s = {2 * cfg['s']}; the "
            f"estimator needs N >= 2s"
        )
    noise = NoiseSpec(kind=cfg["noise"], epsilon=cfg["epsilon"])
    records = []
    for trial, (rng, seed64) in enumerate(_trial_streams(cfg["seed"],
                                                         cfg["trials"])):
        srf, N, delta = _draw_geometry(rng, cfg)
        sc = Scenario(kind="single_cluster", s=cfg["s"], ell=cfg["ell"],
                      delta=delta, N=N, seed=seed64)
        try:
            t = adversarial_cluster(sc.s, delta)
            probe = _near_kernel_signal(t)
            w = np.concatenate([probe.a,
                                -1j * probe.b * np.exp(1j * probe.nodes)])
            sigma_q = confluent_apply_norm_mp(probe.nodes, N, w)
            roundtrip = cfg["epsilon"] == 0.0
            scale = 1.0 if roundtrip else cfg["epsilon"] / sigma_q
            order = np.argsort(probe.nodes)
            h1, h2 = order[0::2], order[1::2]
            mu1 = SpikeSignal(nodes=probe.nodes[h1], a=scale * probe.a[h1],
                              b=scale * probe.b[h1])
            mu2 = SpikeSignal(nodes=probe.nodes[h2], a=-scale * probe.a[h2],
                              b=-scale * probe.b[h2])
            y = sample_measurements(mu1, N, noise, rng)
            errors = None
            span = (2 * sc.s - 1) * delta
            try:
                recovered = esprit_recover(y, sc.s)
                e1 = match_and_error(mu1, recovered.signal)
                if roundtrip:
                    errors = tuple(float(v) for v in e1)
                else:
                    e2 = match_and_error(mu2, recovered.signal)
                    errors = tuple(max(float(p), float(q))
                                   for p, q in zip(e1, e2))
                resolved = e1[0] <= span and (roundtrip
                                              or sigma_q >= PROBE_FLOOR)
                status = "ok" if resolved else "breakdown"
            except ValueError:
                # collapsed or under-ranked node estimate: total failure,
                # the flagged-and-excluded regime, not a bug
                status = "breakdown"
            rec = ExperimentRecord(
                trial=trial, scenario=sc, srf=srf,
                sigma_min=sigma_min_auto(t, N),
                lower_cert=cfg["epsilon"] / (2.0 * sigma_q),
                upper_cert=sigma_q,
                epsilon=cfg["epsilon"],
                esprit_errors=errors, status=status)
        except Exception as exc:
            rec = ExperimentRecord(trial=trial, scenario=sc, srf=srf,
                                   epsilon=cfg["epsilon"],
                                   status=f"failed: {exc}")
        records.append(rec)
    return records


def certify_run(kind: str, s: int, ell: int, delta: float, N: int,
                ell1: int | None = None, ell2: int | None = None) -> dict:
    """Certificates for one explicit configuration, JSON-shaped."""
    sc = Scenario(kind=kind, s=s, ell=ell, delta=delta, N=N, seed=0,
                  ell1=ell1, ell2=ell2)
    nodes, params = generate_scenario(sc)
    report = certificate_report(nodes, params, Omega=float(N), N=N)
    return {
        "scenario": {"kind": kind, "s": s, "ell": ell, "delta": delta, "N": N,
                     "ell1": ell1, "ell2": ell2},
        "srf": 1.0 / (N * delta),
        "nodes": [float(t) for t in nodes],
        **report,
    }


# =============================================================================
# Slope regression
# =============================================================================

def fit_loglog_slope(x, y) -> tuple[float, float]:
    """Ordinary least squares on (log x, log y); returns (slope,
    intercept)."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    assert x.shape == y.shape and x.ndim == 1 and x.size >= 2, (
        f"need two matching 1d samples, got shapes {x.shape}, {y.shape}"
    )
    assert np.all(x > 0) and np.all(y > 0), "log-log fit needs positive data"
    design = np.column_stack([np.log(x), np.ones(x.size)])
    coef, *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
    return float(coef[0]), float(coef[1])


def records_slope(records, column: str) -> float:
    """Slope of log(column) against log(srf) over the records where the
    column is present and positive, skipping failed and breakdown rows."""
    pts = [(row["srf"], row[column]) for row in map(as_row, records)
           if row[column] is not None and row[column] > 0
           and row["status"] != "breakdown"
           and not row["status"].startswith("failed")]
    if len(pts) < 2:
        raise ValueError(
            f"not enough usable records to fit a slope for {column!r} "
            f"({len(pts)} positive values)"
        )
    x, y = zip(*pts)
    return fit_loglog_slope(np.array(x), np.array(y))[0]

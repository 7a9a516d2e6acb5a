"""Desk-scale versions of the four numerical studies.

Each ``run_*`` takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentReport`.  All randomness flows from ``config.seed``.
"""
import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import cascade, graph, hilbert, numerics, sampling
from .errors import DegenerateFactorization, UsageError
from .filters import AdaptiveFilter
from .signal import GeneralizedSignal, write_grid_csv, write_samples_csv

EXPERIMENTS = ("recover", "spectrum", "learn_filter", "adaptive")


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    graph: dict = field(default_factory=dict)
    shift: str = None
    basis: dict = None
    k: int = None
    B: int = None
    snr_db: float = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise UsageError(f"experiment must be one of {EXPERIMENTS}")
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise UsageError("snr_db must be finite (use null for noiseless)")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise UsageError(f"unknown config keys {sorted(extra)}")
        if "experiment" not in d:
            raise UsageError("config needs an 'experiment' key")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc})") from exc

    def param(self, name, default):
        return self.params.get(name, default)


@dataclass
class ExperimentReport:
    experiment: str
    metrics: dict
    artifacts: dict
    config: dict

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _graph(cfg, default_n, default_topology="er", default_p=0.1):
    spec = cfg.graph or {}
    if "file" in spec:
        return graph.read_edge_csv(spec["file"], spec.get("n"))
    n = int(spec.get("n", default_n))
    topology = spec.get("generator", default_topology)
    p = spec.get("p", default_p if topology == "er" else None)
    return graph.random_weighted_graph(n, topology, seed=spec.get("seed", cfg.seed), p=p)


def add_noise(values, snr_db, rng):
    """White Gaussian noise with power set from the empirical signal power.
    Real inputs get real noise, complex inputs circular complex noise."""
    values = np.asarray(values)
    if snr_db is None:
        return values.copy()
    power = np.mean(np.abs(values) ** 2)
    var = power / 10 ** (snr_db / 10)
    if np.iscomplexobj(values):
        noise = rng.normal(size=values.shape) + 1j * rng.normal(size=values.shape)
        return values + np.sqrt(var / 2) * noise
    return values + np.sqrt(var) * rng.normal(size=values.shape)


def _finish(cfg, metrics, artifacts):
    for name, val in metrics.items():
        if not np.isfinite(val):
            raise DegenerateFactorization(f"metric {name} is not finite")
    return ExperimentReport(cfg.experiment, {k: float(v) for k, v in metrics.items()},
                            artifacts, asdict(cfg))


def _out(out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


# ------------------------------------------------------------------ recover

def run_recover(cfg, out_dir=None):
    """Random asynchronous samples of a band-limited signal, then least squares.

    Band: first ``k`` Laplacian eigenvectors x first ``B`` Chebyshev
    polynomials.  ``2k`` random vertices each get ``B/2`` truncated-normal
    positions (mean ``mu``, variance ``var``).
    """
    rng = np.random.default_rng(cfg.seed)
    g = _graph(cfg, 100)
    shift = graph.build_shift(g, cfg.shift or "laplacian")
    k = int(cfg.k if cfg.k is not None else 30)
    B = int(cfg.B if cfg.B is not None else 8)
    truncation = int((cfg.basis or {}).get("truncation", B))
    if not 1 <= k <= shift.n or not 2 <= B <= truncation:
        raise UsageError("need 1 <= k <= n and 2 <= B <= truncation")
    basis = hilbert.make_basis("chebyshev", truncation)
    spec = sampling.SubspaceSpec(tuple(range(k)), tuple(range(B)))
    per_vertex = int(cfg.param("points_per_vertex", B // 2))
    n_vertices = int(cfg.param("vertices", min(2 * k, shift.n)))
    if n_vertices * per_vertex < spec.dim:
        raise UsageError("fewer samples than the band dimension")
    counts = np.zeros(shift.n, dtype=int)
    counts[rng.choice(shift.n, size=n_vertices, replace=False)] = per_vertex
    strategy = sampling.Strategy("random_async", distribution="truncnorm",
                                 mu=float(cfg.param("mu", 0.0)),
                                 sigma=float(np.sqrt(cfg.param("var", 0.5))),
                                 counts=tuple(counts), seed=int(rng.integers(2**31)))
    w = sampling.plan_samples(spec, shift, basis, strategy)

    band = rng.normal(size=(k, B))
    truth = GeneralizedSignal(shift, basis, spec.scatter(band, shift.n, basis.size))
    clean = truth.evaluate(w.vertices, w.xs)
    noisy = add_noise(clean.real, cfg.snr_db, rng)
    rec = sampling.recover(w, noisy, spec, shift, basis)
    est = GeneralizedSignal(shift, basis, rec.coeffs)

    metrics = {
        "relative_error": np.linalg.norm(rec.band - band) / np.linalg.norm(band),
        "residual_norm": rec.residual_norm,
        "rank": rec.rank,
        "num_samples": len(w),
    }
    for name, x in (("left", -1.0), ("right", 1.0)):
        t, e = truth.values([x])[:, 0], est.values([x])[:, 0]
        metrics[f"endpoint_error_{name}"] = np.linalg.norm(e - t) / np.linalg.norm(t)
    artifacts = {}
    if out_dir is not None:
        write_samples_csv(w.vertices, w.xs, noisy, _out(out_dir, "samples.csv"))
        write_grid_csv(rec.coeffs, _out(out_dir, "recovered_grid.csv"))
        artifacts = {"samples": "samples.csv", "recovered_grid": "recovered_grid.csv"}
    return _finish(cfg, metrics, artifacts)


# ------------------------------------------------------------- learn filter

def _fit_real(columns, target):
    """Real x minimising ||sum_j x_j columns[j] - target||."""
    a = np.stack([c.ravel() for c in columns], axis=1)
    b = target.ravel()
    a_r = np.vstack([a.real, a.imag])
    b_r = np.concatenate([b.real, b.imag])
    return numerics.lstsq(a_r, b_r)


def run_learn_filter(cfg, out_dir=None):
    """Identify P2 in F = A_G (x) P2(L), L = cyclic translation by T0.

    Each f^(i) lives on [0, T] with T = q T0, in the span of the first ``k``
    adjacency eigenvectors times Fourier modes 0..B-1.  Samples are taken on
    a vertex subset V' at B equispaced times of [0, T].
    """
    rng = np.random.default_rng(cfg.seed)
    g = _graph(cfg, 30, default_p=0.3)
    shift = graph.build_shift(g, cfg.shift or "adjacency")
    n = shift.n
    B = int(cfg.B if cfg.B is not None else 10)
    k = int(cfg.k if cfg.k is not None else max(1, round(0.4 * n)))
    q = int(cfg.param("q", 5))
    t0 = float(cfg.param("T0", 2 * np.pi))
    if not 1 <= k <= n or B < 1 or q < 2:
        raise UsageError("need 1 <= k <= n, B >= 1 and q >= 2")
    period = q * t0
    basis = hilbert.make_basis("fourier_series", max(B - 1, 1), period=period)
    xi_pos = [basis.position(j) for j in range(B)]
    mu = np.exp(-1j * basis.freq_labels[xi_pos] * t0)        # L on each mode
    lam = shift.eigenvalues[:k]
    phi = shift.eigenvectors[:, :k]

    p2 = np.asarray(cfg.param("P2", rng.uniform(0.0, 1.0, 3)), dtype=float)
    if p2.shape != (3,):
        raise UsageError("P2 must have three coefficients")
    grids = [rng.uniform(0.0, 1.0, (k, B)).astype(complex)]
    for _ in range(q - 1):
        grids.append(lam[:, None] * grids[-1] * np.polyval(p2[::-1], mu)[None, :])

    vprime = graph.select_vertex_subset(phi)
    times = np.arange(B) * period / B
    ev = basis.eval_matrix(times, xi_pos)                    # ev[s, p]
    clean = [phi[vprime] @ c @ ev.T for c in grids]          # h^(i): |V'| x B
    noisy = [add_noise(h, cfg.snr_db, rng) for h in clean]

    # (a) graph recovery per sample time, (b) P2 by real least squares
    est = [phi @ numerics.lstsq(phi[vprime], h).x for h in noisy]
    ev_inv = np.linalg.inv(ev.T)

    def basis_terms(samples):
        coeff = shift.matrix @ samples @ ev_inv                # A_G applied, Xi-coefficients
        return [coeff * mu[None, :] ** j @ ev.T for j in range(3)]

    columns = [[], [], []]
    for i in range(q - 1):
        for j, term in enumerate(basis_terms(est[i])):
            columns[j].append(term)
    fit = _fit_real([np.concatenate(c) for c in columns], np.concatenate(est[1:]))
    p2_hat = fit.x

    errs = []
    for i in range(q - 1):
        pred_coeff = lam[:, None] * grids[i] * np.polyval(p2_hat[::-1], mu)[None, :]
        pred = phi[vprime] @ pred_coeff @ ev.T
        scale = np.linalg.norm(clean[i + 1])
        diff = np.linalg.norm(pred - clean[i + 1])
        errs.append(diff / scale if scale > 0 else diff)
    metrics = {
        "prediction_error": float(np.mean(errs)),
        "p2_error": float(np.max(np.abs(p2_hat - p2))),
        **{f"p2_hat_{j}": p2_hat[j] for j in range(3)},
        **{f"p2_true_{j}": p2[j] for j in range(3)},
    }
    artifacts = {}
    if out_dir is not None:
        path = _out(out_dir, "p2.json")
        with open(path, "w") as fh:
            json.dump({"true": p2.tolist(), "estimate": p2_hat.tolist()}, fh, indent=2)
        artifacts = {"p2": "p2.json"}
    return _finish(cfg, metrics, artifacts)


# ----------------------------------------------------------------- adaptive

def evolve_graphs(g0, steps, p, rng):
    """Per step, each edge independently moves one endpoint to a random
    non-neighbour with probability ``p``."""
    out = [g0]
    for _ in range(steps):
        cur = out[-1]
        present = {(u, v) for u, v, _ in cur.edges}
        edges = []
        for u, v, w in cur.edges:
            if rng.random() < p:
                choices = [x for x in range(cur.n)
                           if x != u and (min(u, x), max(u, x)) not in present]
                if choices:
                    x = int(rng.choice(choices))
                    present.discard((u, v))
                    present.add((min(u, x), max(u, x)))
                    v = x
            edges.append((min(u, v), max(u, v), w))
        out.append(graph.Graph(cur.n, tuple(edges)))
    return out


def factor_rank1(c):
    """Best rank-1 ``a b^T`` for a 2x2 ``c``; ||a|| = 1 and a[0] real >= 0."""
    u, s, vh = np.linalg.svd(c)
    if s[0] <= 1e-14 * max(1.0, np.abs(c).max()):
        raise DegenerateFactorization("product matrix is numerically zero")
    a = u[:, 0]
    b = s[0] * vh[0]
    lead = a[0] if abs(a[0]) > 1e-14 else a[1]
    phase = np.conj(lead) / abs(lead)
    return a * phase, b / phase


def run_adaptive(cfg, out_dir=None):
    """Fit f(t) = sum_u P1(M)[t, u] P2(A_u) g(u) with degree-1 P1, P2 from
    noisy odd-t observations; score on even t."""
    rng = np.random.default_rng(cfg.seed)
    g0 = _graph(cfg, 20, default_p=0.2)
    m = g0.n
    steps = int(cfg.param("steps", 40))
    graphs = evolve_graphs(g0, steps - 1, float(cfg.param("p", 0.05)), rng)
    local = [gr.adjacency() for gr in graphs]
    mix = np.diag(np.ones(steps - 1), -1)                     # t-1 -> t on the time path
    a = np.asarray(cfg.param("a", rng.uniform(0.0, 1.0, 2)), dtype=float)
    b = np.asarray(cfg.param("b", rng.uniform(0.0, 1.0, 2)), dtype=float)
    base = rng.normal(size=(steps, m))
    # every input is real, so the filter output is too
    truth = AdaptiveFilter(tuple(a), mix, tuple(local), tuple(b)).apply_values(base).real

    # rows indexed from t = 1; odd t >= 3 are observed
    tt = np.arange(1, steps + 1)
    observed = np.nonzero((tt % 2 == 1) & (tt >= 3))[0]
    scored = np.nonzero(tt % 2 == 0)[0]
    noisy = add_noise(truth[observed], cfg.snr_db, rng)

    def terms(rows):
        z = []
        for r in rows:
            prev = base[r - 1] if r > 0 else np.zeros(m)
            aprev = local[r - 1] @ prev if r > 0 else np.zeros(m)
            z.append(np.stack([base[r], local[r] @ base[r], prev, aprev], axis=1))
        return np.concatenate(z)                              # (rows*m) x 4

    z_obs = terms(observed)
    prod = numerics.lstsq(z_obs, noisy.ravel()).x
    a_hat, b_hat = factor_rank1(prod.reshape(2, 2))
    for _ in range(int(cfg.param("refine_iters", 20))):
        zb = z_obs.reshape(-1, 2, 2) @ b_hat                  # columns for a
        a_new = numerics.lstsq(zb, noisy.ravel()).x
        za = np.einsum("lij,i->lj", z_obs.reshape(-1, 2, 2), a_new)
        b_new = numerics.lstsq(za, noisy.ravel()).x
        a_hat, b_hat = factor_rank1(np.outer(a_new, b_new))

    pred = (terms(scored) @ np.outer(a_hat, b_hat).ravel()).reshape(len(scored), m)
    errs = np.linalg.norm(pred - truth[scored], axis=1) / np.linalg.norm(truth[scored], axis=1)
    metrics = {
        "recovery_error": float(errs.sum()),
        "mean_recovery_error": float(errs.mean()),
        "product_error": float(np.abs(np.outer(a_hat, b_hat) - np.outer(a, b)).max()),
    }
    artifacts = {}
    if out_dir is not None:
        path = _out(out_dir, "parameters.json")
        with open(path, "w") as fh:
            json.dump({"a": a.tolist(), "b": b.tolist(),
                       "a_hat": np.real_if_close(a_hat).tolist(),
                       "b_hat": np.real_if_close(b_hat).tolist()}, fh, indent=2)
        artifacts = {"parameters": "parameters.json"}
    return _finish(cfg, metrics, artifacts)


# ----------------------------------------------------------------- spectrum

DEFAULT_RUNS = (
    {"label": "SI", "model": "SI", "lambda_I": 1.0},
    {"label": "SIR", "model": "SIR", "lambda_I": 1.0, "lambda_R": 1.0},
)


def cascade_spreads(g, shift, basis, run, horizon, num_slots, seed):
    """Step and TV spectral spread of one simulated cascade."""
    rng = np.random.default_rng(seed)
    start = int(rng.integers(g.n))
    trace = cascade.simulate(g, run["model"], run["lambda_I"], run.get("lambda_R"),
                             horizon, (start,), int(rng.integers(2**31)))
    ascending = shift.kind == "laplacian"
    step = cascade.step_spectrum(trace, shift, basis)
    tv = cascade.tv_spectrum(trace, shift, num_slots)
    return (trace, step, tv, cascade.spectral_spread(step, ascending),
            cascade.spectral_spread(tv, ascending))


def run_spectrum(cfg, out_dir=None):
    g = _graph(cfg, 50, default_p=0.1)
    shift = graph.build_shift(g, cfg.shift or "laplacian")
    horizon = float(cfg.param("T", 10.0))
    truncation = int((cfg.basis or {}).get("truncation", 32))
    basis = hilbert.make_basis("fourier_series", truncation, period=horizon)
    num_slots = int(cfg.param("num_slots", 64))
    trials = int(cfg.param("trials", 1))
    runs = cfg.param("runs", DEFAULT_RUNS)
    metrics, artifacts = {}, {}
    for run in runs:
        label = run.get("label", run["model"])
        steps, tvs = [], []
        for trial in range(trials):
            trace, step, tv, s_step, s_tv = cascade_spreads(
                g, shift, basis, run, horizon, num_slots, cfg.seed * 100003 + trial)
            steps.append(s_step)
            tvs.append(s_tv)
            if out_dir is not None and trial == 0:
                for name, obj, writer in (("trace", trace, cascade.write_trace_csv),
                                          ("step_spectrum", step, cascade.write_spectrum_csv),
                                          ("tv_spectrum", tv, cascade.write_spectrum_csv)):
                    fname = f"{label}_{name}.csv"
                    writer(obj, _out(out_dir, fname))
                    artifacts[f"{label}_{name}"] = fname
        metrics[f"spread_step_{label}"] = float(np.mean(steps))
        metrics[f"spread_tv_{label}"] = float(np.mean(tvs))
    return _finish(cfg, metrics, artifacts)


RUNNERS = {"recover": run_recover, "learn_filter": run_learn_filter,
           "adaptive": run_adaptive, "spectrum": run_spectrum}


def run(cfg, out_dir=None):
    report = RUNNERS[cfg.experiment](cfg, out_dir)
    if out_dir is not None:
        with open(_out(out_dir, "report.json"), "w") as fh:
            fh.write(report.to_json() + "\n")
    return report

"""SI / SIR / SIRI cascades on a graph and their joint spectra.

Each infected node runs one exponential infection clock per susceptible
neighbour and, outside SI, one exponential recovery clock.  Clocks are held in
a heap; a per-node epoch counter invalidates clocks of nodes that recovered.
"""
import csv
import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BasisMismatch, UsageError
from .signal import _fmt, _rows

MODELS = ("SI", "SIR", "SIRI")
SUSCEPTIBLE, INFECTED, RECOVERED = 0, 1, 2
STATUS_NAMES = {INFECTED: "infected", RECOVERED: "recovered", SUSCEPTIBLE: "susceptible"}
_STATUS_CODES = {v: k for k, v in STATUS_NAMES.items()}


@dataclass(frozen=True)
class CascadeTrace:
    """``events[v]`` is the time-sorted tuple of ``(timestamp, status)`` for node v."""

    model: str
    n: int
    horizon: float
    lambda_i: float
    lambda_r: float
    events: tuple

    def intervals(self):
        """Maximal infected intervals as arrays ``(nodes, starts, ends)``;
        intervals still open at the horizon end there."""
        nodes, starts, ends = [], [], []
        for v, evs in enumerate(self.events):
            start = None
            for t, status in evs:
                if status == INFECTED:
                    start = t
                elif start is not None:
                    nodes.append(v)
                    starts.append(start)
                    ends.append(t)
                    start = None
            if start is not None:
                nodes.append(v)
                starts.append(start)
                ends.append(self.horizon)
        return (np.array(nodes, dtype=np.int64), np.array(starts, dtype=float),
                np.array(ends, dtype=float))

    def status_at(self, t):
        """Right-continuous status of every node at time ``t``."""
        out = np.zeros(self.n, dtype=int)
        for v, evs in enumerate(self.events):
            for when, status in evs:
                if when <= t:
                    out[v] = status
        return out

    def infected_duration(self):
        nodes, starts, ends = self.intervals()
        return np.bincount(nodes, weights=ends - starts, minlength=self.n)


def simulate(g, model, lambda_i, lambda_r=None, horizon=1.0, seeds=(0,), rng_seed=None):
    """Event-driven simulation with means ``lambda_i`` (infection, per edge)
    and ``lambda_r`` (recovery).  Edge weights do not affect the clocks."""
    if model not in MODELS:
        raise UsageError(f"model must be one of {MODELS}")
    if not lambda_i > 0:
        raise UsageError("lambda_I must be positive")
    if model != "SI" and not (lambda_r is not None and lambda_r > 0):
        raise UsageError(f"{model} needs a positive lambda_R")
    if not horizon > 0:
        raise UsageError("horizon must be positive")
    seeds = sorted(set(int(s) for s in seeds))
    if not seeds or seeds[0] < 0 or seeds[-1] >= g.n:
        raise UsageError("seeds must be a nonempty set of vertex ids")

    rng = np.random.default_rng(rng_seed)
    nbrs = g.neighbors()
    status = np.zeros(g.n, dtype=int)
    epoch = np.zeros(g.n, dtype=int)
    events = [[] for _ in range(g.n)]
    heap = []
    counter = 0

    def push(t, kind, src, dst):
        nonlocal counter
        heapq.heappush(heap, (t, counter, kind, src, dst, epoch[src]))
        counter += 1

    def infect(v, t):
        status[v] = INFECTED
        epoch[v] += 1
        events[v].append((t, INFECTED))
        for u in nbrs[v]:
            if status[u] == SUSCEPTIBLE:
                push(t + rng.exponential(lambda_i), "infect", v, u)
        if model != "SI":
            push(t + rng.exponential(lambda_r), "recover", v, v)

    for s in seeds:
        infect(s, 0.0)
    while heap:
        t, _, kind, src, dst, ep = heapq.heappop(heap)
        if t > horizon:
            break
        if ep != epoch[src] or status[src] != INFECTED:
            continue
        if kind == "infect":
            if status[dst] == SUSCEPTIBLE:
                infect(dst, t)
            continue
        epoch[src] += 1
        if model == "SIR":
            status[src] = RECOVERED
            events[src].append((t, RECOVERED))
        else:
            status[src] = SUSCEPTIBLE
            events[src].append((t, SUSCEPTIBLE))
            for u in nbrs[src]:
                if status[u] == INFECTED:
                    push(t + rng.exponential(lambda_i), "infect", u, src)
    return CascadeTrace(model, g.n, float(horizon), float(lambda_i),
                        None if lambda_r is None else float(lambda_r),
                        tuple(tuple(e) for e in events))


# ------------------------------------------------------------------ spectra

@dataclass(frozen=True, eq=False)
class Spectrum:
    graph_eigs: np.ndarray
    freqs: np.ndarray
    coeffs: np.ndarray

    @property
    def magnitude(self):
        return np.abs(self.coeffs)


def _basis_norm(trace, basis):
    if basis.kind == "fourier_series":
        if not np.isclose(basis.period, trace.horizon, rtol=1e-12):
            raise BasisMismatch(f"basis period {basis.period} != horizon {trace.horizon}")
        return np.sqrt(basis.period)
    if basis.kind == "half_integer_fourier":
        if not np.isclose(2 * np.pi, trace.horizon, rtol=1e-12):
            raise BasisMismatch("half_integer_fourier lives on [0, 2pi]; horizon must be 2pi")
        return np.sqrt(2 * np.pi)
    raise BasisMismatch(f"step spectra need a Fourier basis, not {basis.kind}")


def step_h_transform(trace, basis):
    """Closed-form <1_infected(v, .), xi_m> for every node and element."""
    norm = _basis_norm(trace, basis)
    nodes, starts, ends = trace.intervals()
    return _kernels.step_coeffs(nodes, starts, ends,
                                np.ascontiguousarray(basis.freq_labels, dtype=float),
                                trace.n, norm)


def step_spectrum(trace, shift, basis):
    """Joint coefficients Phi^H h of the infected-indicator signal."""
    if shift.n != trace.n:
        raise BasisMismatch("shift and trace have different vertex counts")
    coeffs = shift.eigenvectors.conj().T @ step_h_transform(trace, basis)
    return Spectrum(shift.eigenvalues, np.asarray(basis.freq_labels, dtype=float), coeffs)


def slot_status(trace, num_slots):
    if num_slots < 2:
        raise UsageError("need at least 2 slots")
    times = np.arange(num_slots) * trace.horizon / num_slots
    nodes, starts, ends = trace.intervals()
    return _kernels.slot_status(nodes, starts, ends, times, trace.n)


def tv_spectrum(trace, shift, num_slots):
    """Slot-sampled status, unitary DFT along time (zero frequency centred,
    angular frequencies) and Phi-projection along vertices."""
    status = slot_status(trace, num_slots)
    dft = np.fft.fftshift(np.fft.fft(status, axis=1, norm="ortho"), axes=1)
    freqs = np.fft.fftshift(np.fft.fftfreq(num_slots, d=trace.horizon / num_slots)) * 2 * np.pi
    return Spectrum(shift.eigenvalues, freqs, shift.eigenvectors.conj().T @ dft)


def spectral_spread(spectrum, ascending=True):
    """Fraction of energy outside the low-frequency quadrant.

    Rows are ordered from smoothest graph frequency (ascending eigenvalue for
    the Laplacian, ``ascending=False`` for the adjacency), columns by |freq|;
    the quadrant is the first half of each.
    """
    energy = spectrum.magnitude ** 2
    total = energy.sum()
    if total == 0.0:
        return 0.0
    rows = np.argsort(spectrum.graph_eigs if ascending else -spectrum.graph_eigs, kind="stable")
    cols = np.argsort(np.abs(spectrum.freqs), kind="stable")
    r = (len(rows) + 1) // 2
    c = (len(cols) + 1) // 2
    low = energy[np.ix_(rows[:r], cols[:c])].sum()
    return float(1.0 - low / total)


# ---------------------------------------------------------------------- I/O

def write_trace_csv(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex", "timestamp", "status"])
        for v, evs in enumerate(trace.events):
            for t, status in evs:
                w.writerow([v, _fmt(t), STATUS_NAMES[status]])


def read_trace_csv(path, n, horizon, model="SIR", lambda_i=float("nan"), lambda_r=None):
    events = [[] for _ in range(n)]
    for lineno, row in _rows(path, ["vertex", "timestamp", "status"]):
        try:
            v, t, status = int(row[0]), float(row[1]), _STATUS_CODES[row[2].strip()]
        except (ValueError, KeyError) as exc:
            raise UsageError(f"{path}:{lineno}: malformed row") from exc
        if not 0 <= v < n or not 0.0 <= t <= horizon:
            raise UsageError(f"{path}:{lineno}: vertex or timestamp out of range")
        events[v].append((t, status))
    for evs in events:
        evs.sort()
    return CascadeTrace(model, n, float(horizon), lambda_i, lambda_r, tuple(tuple(e) for e in events))


def write_spectrum_csv(spectrum, path):
    mag = spectrum.magnitude
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["graph_eig", "freq", "magnitude"])
        for i, g in enumerate(spectrum.graph_eigs):
            for m, f in enumerate(spectrum.freqs):
                w.writerow([_fmt(float(g)), _fmt(float(f)), _fmt(float(mag[i, m]))])

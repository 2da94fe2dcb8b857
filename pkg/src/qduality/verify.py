"""Randomised verification of the trade-off and complementarity inequalities.

Campaign samples are evaluated in fixed-size chunks. Each sample draws from
its own RNG stream keyed by ``(seed, d, sample_id)`` and chunk boundaries do
not depend on the worker count, so results are bit-identical however many
threads run them.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import measures as M
from .config import DEFAULT_TOLERANCES
from .errors import BadDimension, ParamOutOfRange, UnknownMeasure
from .linalg import hermitian_eig, numerical_zero, sqrtm_psd
from .states import ginibre_states, portable_rng, random_states, validate, werner_matrix

CHUNK_SIZE = 250
MAX_DIM = 16

MEASURE_FIELDS = (
    "c_hs", "c_wy", "c_l1", "s_l_iota", "s_vn_iota", "upsilon", "omega",
    "p_hs_l", "p_hs_vn", "p_l1", "bound_pop_hs", "bound_pop_wy",
)

# verdict -> which tolerance applies ("validation" for exact arithmetic,
# "derived" for anything built on the matrix square root)
VERDICTS = {
    "tohs_l": "validation",     # C_hs <= S_l(iota)
    "tohs_vn": "validation",    # S_l(iota) <= S_vn(iota)
    "heub": "derived",          # C_wy <= upsilon
    "heub2": "derived",         # upsilon <= omega
    "tocp": "validation",       # C_hs <= 2 sum rho_mm rho_nn
    "tocph": "derived",         # C_wy <= 2 sum sqrt(rho)_mm sqrt(rho)_nn
    "cpwy": "derived",          # C_wy + P_hs^l <= (d-1)/d
    "cpl1": "validation",       # C_l1 + P_l1 <= d - 1
    "sqrt_diag": "validation",  # sqrt(rho)_jj >= rho_jj
    "positivity": "validation", # smallest eigenvalue >= 0
}


def default_workers():
    cap = os.environ.get("QDUALITY_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"QDUALITY_THREADS must be a positive integer, got {cap!r}") from None
    return n


@dataclass(frozen=True)
class TradeoffRecord:
    """All measures, bounds, and inequality slacks (bound minus lhs) for one state."""

    dim: int
    sample_id: int
    seed: int
    rank: int
    c_hs: float
    c_wy: float
    c_l1: float
    s_l_iota: float
    s_vn_iota: float
    upsilon: float
    omega: float
    p_hs_l: float
    p_hs_vn: float
    p_l1: float
    bound_pop_hs: float
    bound_pop_wy: float
    slacks: dict
    pass_all: bool
    w: float = None
    a: float = None

    def verdicts(self, tolerances=DEFAULT_TOLERANCES):
        return {k: v >= -getattr(tolerances, VERDICTS[k]) for k, v in self.slacks.items()}

    def failed(self, tolerances=DEFAULT_TOLERANCES):
        return [k for k, ok in self.verdicts(tolerances).items() if not ok]


def evaluate_stack(mats, tolerances=DEFAULT_TOLERANCES):
    """Evaluate every measure and slack on a stack ``(n, d, d)``.

    One eigendecomposition per state feeds the square root and the
    positivity verdict. Negative eigenvalues are clipped for the square root
    so that invalid (e.g. injected) states still produce a row.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    d = mats.shape[-1]
    eig = hermitian_eig(mats)
    lam = eig.eigenvalues
    S = eig.reconstruct(np.sqrt(np.where(numerical_zero(lam), 0.0, np.clip(lam, 0.0, None))))
    pops = np.clip(np.real(np.diagonal(mats, axis1=-2, axis2=-1)), 0.0, None)
    cols = {
        "c_hs": M.c_hs(mats),
        "c_wy": M.c_wy(mats, "sqrt_offdiag", sqrt_rho=S),
        "c_l1": M.c_l1(mats),
        "s_l_iota": M.linear_entropy_of(pops),
        "s_vn_iota": M.vn_entropy_of(pops),
        "p_hs_l": M.p_hs_linear(mats),
        "p_hs_vn": M.p_hs_vn(mats),
        "p_l1": M.p_l1(mats),
        "bound_pop_hs": M.population_bound(mats, "hs"),
        "bound_pop_wy": M.population_bound(mats, "wy", sqrt_rho=S),
    }
    cols["upsilon"], cols["omega"] = M.wy_bounds(mats, sqrt_rho=S)
    sdiag = np.real(np.diagonal(S, axis1=-2, axis2=-1))
    slacks = {
        "tohs_l": cols["s_l_iota"] - cols["c_hs"],
        "tohs_vn": cols["s_vn_iota"] - cols["s_l_iota"],
        "heub": cols["upsilon"] - cols["c_wy"],
        "heub2": cols["omega"] - cols["upsilon"],
        "tocp": cols["bound_pop_hs"] - cols["c_hs"],
        "tocph": cols["bound_pop_wy"] - cols["c_wy"],
        "cpwy": M.max_linear_entropy(d) - cols["c_wy"] - cols["p_hs_l"],
        "cpl1": (d - 1) - cols["c_l1"] - cols["p_l1"],
        "sqrt_diag": np.min(sdiag - pops, axis=-1),
        "positivity": lam[..., -1],
    }
    ok = np.ones(mats.shape[0], dtype=bool)
    for name, value in slacks.items():
        ok &= value >= -getattr(tolerances, VERDICTS[name])
    return cols, slacks, ok


def _records(mats, sample_ids, seed, rank, tolerances, extra=None):
    cols, slacks, ok = evaluate_stack(mats, tolerances)
    d = mats.shape[-1]
    out = []
    for i, sid in enumerate(sample_ids):
        kw = {name: float(cols[name][i]) for name in MEASURE_FIELDS}
        if extra is not None:
            kw.update(extra[i])
        out.append(TradeoffRecord(
            dim=d, sample_id=int(sid), seed=seed, rank=rank[i] if isinstance(rank, list) else rank,
            slacks={k: float(v[i]) for k, v in slacks.items()}, pass_all=bool(ok[i]), **kw,
        ))
    return out


def evaluate(rho, tolerances=DEFAULT_TOLERANCES, sample_id=0, seed=0):
    """Evaluate one validated state."""
    rho = validate(rho, tolerances.validation)
    lam = hermitian_eig(rho.matrix).eigenvalues
    rank = int(np.sum(lam > tolerances.validation))
    return _records(rho.matrix[None], [sample_id], seed, rank, tolerances)[0]


@dataclass
class Violation:
    dim: int
    sample_id: int
    failed: list
    slacks: dict
    matrix: np.ndarray

    def to_json(self):
        return {
            "d": self.dim,
            "sample_id": self.sample_id,
            "failed": self.failed,
            "slacks": self.slacks,
            "real": np.real(self.matrix).tolist(),
            "imag": np.imag(self.matrix).tolist(),
        }


@dataclass
class DimSummary:
    samples: int = 0
    passes: int = 0
    verdict_passes: dict = field(default_factory=lambda: dict.fromkeys(VERDICTS, 0))
    mean_slack_tohs_l: float = 0.0

    @property
    def pass_rate(self):
        return self.passes / self.samples if self.samples else float("nan")


@dataclass
class CampaignResult:
    records: list
    per_dim: dict
    violations: list
    seed: int

    @property
    def all_passed(self):
        return not self.violations

    def verdict_totals(self):
        totals = dict.fromkeys(VERDICTS, 0)
        for s in self.per_dim.values():
            for k, v in s.verdict_passes.items():
                totals[k] += v
        return totals

    def tightness_trend(self):
        """Mean ``S_l(iota) - C_hs`` per dimension, in increasing ``d``."""
        return {d: s.mean_slack_tohs_l for d, s in sorted(self.per_dim.items())}


def _check_dims(d_range):
    dims = list(d_range)
    if not dims or min(dims) < 2 or max(dims) > MAX_DIM:
        raise BadDimension(f"dimensions must lie in [2, {MAX_DIM}], got {dims}")
    return dims


def campaign(d_range, samples_per_d, rank=None, seed=1, tolerances=DEFAULT_TOLERANCES,
             workers=None, state_hook=None):
    """Evaluate ``samples_per_d`` random states for each dimension in ``d_range``.

    ``rank=None`` means full rank. ``state_hook(d, sample_id, matrix)``, if
    given, may replace a sample before evaluation (used to exercise the
    failure path). Violations are collected, not raised, so that the full
    table can still be written.
    """
    dims = _check_dims(d_range)
    if samples_per_d < 1:
        raise ValueError("samples_per_d must be at least 1")
    tasks = [(d, start, min(CHUNK_SIZE, samples_per_d - start))
             for d in dims for start in range(0, samples_per_d, CHUNK_SIZE)]

    def run(task):
        d, start, n = task
        r = d if rank is None else rank
        mats = random_states(d, n, r, seed, start)
        ids = list(range(start, start + n))
        if state_hook is not None:
            mats = np.stack([np.asarray(state_hook(d, i, m), dtype=np.complex128) for i, m in zip(ids, mats)])
        return mats, _records(mats, ids, seed, r, tolerances)

    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1:
        results = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))

    records, violations = [], []
    per_dim = {d: DimSummary() for d in dims}
    for mats, recs in results:
        for m, rec in zip(mats, recs):
            records.append(rec)
            summary = per_dim[rec.dim]
            summary.samples += 1
            summary.passes += rec.pass_all
            for k, ok in rec.verdicts(tolerances).items():
                summary.verdict_passes[k] += ok
            summary.mean_slack_tohs_l += rec.slacks["tohs_l"]
            if not rec.pass_all:
                violations.append(Violation(rec.dim, rec.sample_id, rec.failed(tolerances), rec.slacks, m))
    for s in per_dim.values():
        s.mean_slack_tohs_l /= s.samples
    return CampaignResult(records, per_dim, violations, seed)


def a_grid(steps):
    if steps < 2:
        raise ParamOutOfRange(f"a grid needs at least 2 points, got {steps}")
    return np.linspace(0.0, 1.0, steps)


def werner_sweep(w_values, a_values, tolerances=DEFAULT_TOLERANCES, seed=0):
    """Records for the Werner ququart on the grid ``w_values x a_values``.

    ``a_values`` may be an integer number of equally spaced points in [0, 1].
    Records are ordered by ``w`` then ``a``.
    """
    if np.isscalar(a_values):
        a_values = a_grid(int(a_values))
    params = [(float(w), float(a)) for w in w_values for a in a_values]
    mats = np.stack([werner_matrix(w, a) for w, a in params])
    ranks = [1 if w == 1.0 else 4 for w, _ in params]
    extra = [{"w": w, "a": a} for w, a in params]
    return _records(mats, list(range(len(params))), seed, ranks, tolerances, extra)


# -------------------------------------------------------------------------
# axiom suites

PREDICTABILITY = {
    "p_hs_l": (M.p_hs_linear, M.max_linear_entropy),
    "p_hs_vn": (M.p_hs_vn, M.max_vn_entropy),
    "p_l1": (M.p_l1, lambda d: d - 1.0),
}


def _c_wy(mats):
    return M.c_wy(mats, "sqrt_offdiag", sqrt_rho=sqrtm_psd(mats))


WAVE = {
    "c_hs": (M.c_hs, M.max_linear_entropy),
    "c_wy": (_c_wy, M.max_linear_entropy),
    "c_l1": (M.c_l1, lambda d: d - 1.0),
}

EPSILONS = (1e-3, 1e-4)
PERMUTATIONS_PER_STATE = 20


@dataclass
class AxiomReport:
    """Outcome of one numerical axiom check; ``worst_slack`` is kept even on a pass."""

    measure: str
    axiom: str
    trials: int = 0
    violations: int = 0
    skipped: int = 0
    worst_slack: float = math.inf
    tolerance: float = 0.0
    parameters: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0 and self.trials > 0

    def add(self, slacks):
        slacks = np.ravel(np.asarray(slacks, dtype=np.float64))
        if slacks.size:
            self.trials += slacks.size
            self.violations += int(np.sum(~(slacks >= -self.tolerance)))
            self.worst_slack = min(self.worst_slack, float(np.min(slacks)))
        return self

    def merge(self, other):
        self.trials += other.trials
        self.violations += other.violations
        self.skipped += other.skipped
        self.worst_slack = min(self.worst_slack, other.worst_slack)
        return self


def _stack(d, n, rng, rank=None):
    return ginibre_states(d, d if rank is None else rank, [rng] * n)


def _diag_stack(pops):
    d = pops.shape[-1]
    out = np.zeros(pops.shape + (d,), dtype=np.complex128)
    idx = np.arange(d)
    out[..., idx, idx] = pops
    return out


def _uniform_pure(d, n, rng):
    """Pure states with all populations 1/d and random phases."""
    phases = np.exp(2j * np.pi * rng.random((n, d)))
    psi = phases / np.sqrt(d)
    return psi[:, :, None] * np.conj(psi[:, None, :])


def _permute(mats, rng):
    d = mats.shape[-1]
    perms = np.stack([rng.permutation(d) for _ in range(mats.shape[0])])
    rows = np.take_along_axis(mats, perms[:, :, None], axis=1)
    return np.take_along_axis(rows, perms[:, None, :], axis=2)


def _lipschitz(fn, d, trials, rng, tolerances, name):
    rep = AxiomReport(name, "", tolerance=0.0, parameters={"K": tolerances.lipschitz_factor * d, "t": 1e-3})
    rho = _stack(d, trials, rng)
    sigma = _stack(d, trials, rng)
    t = rep.parameters["t"]
    moved = (1 - t) * rho + t * sigma
    dist = np.sqrt(np.sum(np.abs(rho - moved) ** 2, axis=(-2, -1)))
    return rep.add(rep.parameters["K"] * dist - np.abs(fn(rho) - fn(moved)))


def _convexity(fn, d, trials, rng, tol, name, axiom):
    rep = AxiomReport(name, axiom, tolerance=tol)
    xi, eta = _stack(d, trials, rng), _stack(d, trials, rng)
    omega = rng.random(trials)
    mix = omega[:, None, None] * xi + (1 - omega)[:, None, None] * eta
    return rep.add(omega * fn(xi) + (1 - omega) * fn(eta) - fn(mix))


def _permutation(fn, d, trials, rng, tol, name, axiom):
    rep = AxiomReport(name, axiom, tolerance=tol, parameters={"permutations": PERMUTATIONS_PER_STATE})
    rho = _stack(d, trials, rng)
    base = fn(rho)
    for _ in range(PERMUTATIONS_PER_STATE):
        rep.add(-np.abs(fn(_permute(rho, rng)) - base))
    return rep


def axiom_suite_predictability(measure, d=4, trials=1000, seed=1, tolerances=DEFAULT_TOLERANCES):
    """Numerical checks of axioms P1..P6 for a predictability measure.

    Returns one :class:`AxiomReport` per axiom, in order.
    """
    if measure not in PREDICTABILITY:
        raise UnknownMeasure(f"unknown predictability measure {measure!r}")
    fn, pmax_of = PREDICTABILITY[measure]
    pmax = pmax_of(d)
    rng = portable_rng(seed, (d << 32) | 0x5001)
    exact = tolerances.validation
    reports = []

    p1 = _lipschitz(fn, d, trials, rng, tolerances, measure)
    p1.axiom = "P1"
    reports.append(p1)

    reports.append(_permutation(fn, d, trials, rng, tolerances.permutation, measure, "P2"))

    p3 = AxiomReport(measure, "P3", tolerance=exact, parameters={"max": pmax})
    p3.add(-np.abs(fn(_diag_stack(np.eye(d))) - pmax))
    p3.add(pmax - fn(_stack(d, trials, rng)))
    reports.append(p3)

    p4 = AxiomReport(measure, "P4", tolerance=exact, parameters={"min": 0.0})
    weights = rng.random((trials, 3))
    weights /= weights.sum(axis=1, keepdims=True)
    uniform = sum(weights[:, i, None, None] * _uniform_pure(d, trials, rng) for i in range(3))
    p4.add(-np.abs(fn(uniform)))
    p4.add(fn(_stack(d, trials, rng)))
    reports.append(p4)

    p5 = AxiomReport(measure, "P5", tolerance=tolerances.permutation, parameters={"epsilons": list(EPSILONS)})
    pops = np.clip(np.real(np.diagonal(_stack(d, trials, rng), axis1=-2, axis2=-1)), 0.0, None)
    base = fn(_diag_stack(pops))
    for eps in EPSILONS:
        for j in range(d):
            for k in range(d):
                gap = pops[:, j] - pops[:, k]
                # ties within the step size are outside the axiom's premise
                use = gap >= 2 * eps
                p5.skipped += int(np.sum((gap > 0) & ~use))
                if not use.any():
                    continue
                shifted = pops[use].copy()
                shifted[:, j] -= eps
                shifted[:, k] += eps
                p5.add(base[use] - fn(_diag_stack(shifted)))
    reports.append(p5)

    reports.append(_convexity(fn, d, trials, rng, tolerances.validation, measure, "P6"))
    return reports


def _shrink_offdiag(mats, j, k, eps):
    out = mats.copy()
    out[:, j, k] *= 1 - eps
    out[:, k, j] *= 1 - eps
    return out


def _offdiag_weight(X):
    d = X.shape[-1]
    return np.sum(np.abs(X[..., ~np.eye(d, dtype=bool)]) ** 2, axis=-1)


def axiom_suite_wave(measure, d=4, trials=1000, seed=1, tolerances=DEFAULT_TOLERANCES, w5_mode=None):
    """Numerical checks of axioms W1..W6 for a coherence measure.

    W5 shrinks one off-diagonal pair ``rho_jk -> (1 - eps) rho_jk``, keeping
    only perturbed matrices that remain positive. For ``c_wy`` the default
    ``w5_mode="sqrt_row"`` instead scales row ``j`` of ``sqrt(rho)`` by
    ``1 - eps`` and compares the off-diagonal weight of that matrix;
    ``w5_mode="direct"`` applies the element shrinkage to ``c_wy`` as well,
    and ``w5_mode="sqrt_row_normalized"`` rebuilds the state
    ``S S^dagger / Tr`` from the scaled root and recomputes ``c_wy``. Neither
    of the last two is monotone; they are kept as diagnostics.
    """
    if measure not in WAVE:
        raise UnknownMeasure(f"unknown wave measure {measure!r}")
    fn, wmax_of = WAVE[measure]
    wmax = wmax_of(d)
    rng = portable_rng(seed, (d << 32) | 0x3001)
    tol = tolerances.derived if measure == "c_wy" else tolerances.validation
    if w5_mode is None:
        w5_mode = "sqrt_row" if measure == "c_wy" else "direct"
    if w5_mode not in ("sqrt_row", "sqrt_row_normalized", "direct") or (
            w5_mode != "direct" and measure != "c_wy"):
        raise ValueError(f"unsupported W5 mode {w5_mode!r} for {measure}")
    reports = []

    w1 = _lipschitz(fn, d, trials, rng, tolerances, measure)
    w1.axiom = "W1"
    reports.append(w1)

    perm_tol = tolerances.derived if measure == "c_wy" else tolerances.permutation
    reports.append(_permutation(fn, d, trials, rng, perm_tol, measure, "W2"))

    w3 = AxiomReport(measure, "W3", tolerance=tol, parameters={"min": 0.0})
    w3.add(-np.abs(fn(_diag_stack(np.eye(d)))))
    w3.add(fn(_stack(d, trials, rng)))
    reports.append(w3)

    w4 = AxiomReport(measure, "W4", tolerance=tol, parameters={"max": wmax})
    w4.add(-np.abs(fn(_uniform_pure(d, trials, rng)) - wmax))
    w4.add(wmax - fn(_stack(d, trials, rng)))
    reports.append(w4)

    w5 = AxiomReport(measure, "W5", tolerance=tolerances.validation,
                     parameters={"epsilons": list(EPSILONS), "mode": w5_mode})
    rho = _stack(d, trials, rng)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    choice = rng.integers(len(pairs), size=trials)
    rows = rng.integers(d, size=trials)
    for eps in EPSILONS:
        if w5_mode == "sqrt_row":
            S = sqrtm_psd(rho)
            scaled = S.copy()
            scaled[np.arange(trials), rows, :] *= 1 - eps
            w5.add(_offdiag_weight(S) - _offdiag_weight(scaled))
            continue
        if w5_mode == "sqrt_row_normalized":
            S = sqrtm_psd(rho)
            scaled = S.copy()
            scaled[np.arange(trials), rows, :] *= 1 - eps
            moved = scaled @ np.conj(np.swapaxes(scaled, -1, -2))
            moved /= np.real(np.trace(moved, axis1=-2, axis2=-1))[:, None, None]
            w5.add(fn(rho) - fn(moved))
            continue
        base = fn(rho)
        for idx, (j, k) in enumerate(pairs):
            sel = choice == idx
            if not sel.any():
                continue
            moved = _shrink_offdiag(rho[sel], j, k, eps)
            valid = hermitian_eig(moved).eigenvalues[:, -1] >= -tolerances.validation
            w5.skipped += int(np.sum(~valid))
            if valid.any():
                w5.add(base[sel][valid] - fn(moved[valid]))
    reports.append(w5)

    reports.append(_convexity(fn, d, trials, rng, tol, measure, "W6"))
    return reports

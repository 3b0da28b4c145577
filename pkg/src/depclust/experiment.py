"""Monte-Carlo recovery experiments on the two-block model and theoretical bounds."""

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import cut_dendrogram, partitions_equivalent
from .correlation import CorrelationKind, UndefinedCorrelationError, correlation_distance
from .hcbm import MarginKind, TwoBlockSpec, make_rng, sample
from .linkage import LinkageKind, check_separability, cluster

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("axis1", "axis2", "kind", "linkage", "successes", "trials")


def kendall_concentration_bound(N, T, eps):
    """Lower bound on P(||U_hat - U||_inf <= eps) for Kendall matrices, clamped to [0, 1]."""
    if eps <= 0:
        return 0.0
    return float(min(max(1.0 - 2.0 * N**2 * np.exp(-T * eps**2 / 8.0), 0.0), 1.0))


def recovery_bound(N, T, contrast):
    """Lower bound on the probability that a space-conserving linkage on Kendall
    distances recovers the planted partition; ``contrast`` is the gap between
    the lowest within-block and the highest between-block correlation."""
    if contrast <= 0:
        return 0.0
    return float(min(max(1.0 - 2.0 * N**2 * np.exp(-T * contrast**2 / 32.0), 0.0), 1.0))


@dataclass(frozen=True)
class TrialCell:
    """One grid point of the two-block experiment."""

    n: int
    rho: float
    T: int
    margin: MarginKind = field(default_factory=MarginKind)
    fraction_big: float = 0.7
    index: int = 0

    @property
    def model(self):
        return TwoBlockSpec(self.n, self.rho, self.fraction_big)


def _simulate(cell, trial, base_seed):
    model = cell.model
    rng = make_rng(base_seed, cell.index, trial)
    X = sample(model.correlation(), MarginKind.parse(cell.margin), cell.T, rng)
    return X, model.partition()


def trial_outcomes(cell, trial, base_seed, kinds, linkages, debug=False):
    """Success of every (kind, linkage) pair on one simulated panel.

    The panel depends only on ``(base_seed, cell.index, trial)``. Returns
    ``(outcomes, warnings)`` where outcomes maps ``(kind, linkage)`` to bool.
    """
    X, planted = _simulate(cell, trial, base_seed)
    out = {}
    warnings = 0
    for kind in kinds:
        kind = CorrelationKind(kind)
        try:
            D = correlation_distance(X, kind)
        except UndefinedCorrelationError as exc:
            logger.warning("cell %d trial %d (%s): %s", cell.index, trial, kind.value, exc)
            warnings += 1
            for linkage in linkages:
                out[kind.value, LinkageKind(linkage).value] = False
            continue
        separable = check_separability(D, planted) if debug else False
        for linkage in linkages:
            linkage = LinkageKind(linkage)
            found = cut_dendrogram(cluster(D, linkage), 2)
            ok = partitions_equivalent(found, planted)
            if debug and separable and linkage.space_conserving and not ok:
                raise AssertionError(
                    f"separable matrix not recovered: cell {cell.index}, trial {trial}, "
                    f"{kind.value}/{linkage.value}")
            out[kind.value, linkage.value] = ok
    return out, warnings


def run_trial(cell, trial, base_seed=0, kind="pearson", linkage="average", debug=False):
    """Simulate, estimate, cluster, cut at 2 and compare with the planted blocks."""
    out, _ = trial_outcomes(cell, trial, base_seed, [kind], [linkage], debug)
    return out[CorrelationKind(kind).value, LinkageKind(linkage).value]


def _grid(lo, hi, num, integer=False):
    vals = np.linspace(lo, hi, num)
    return [int(round(v)) for v in vals] if integer else [round(float(v), 10) for v in vals]


@dataclass(frozen=True)
class ExperimentPlan:
    """Grid over ``axis1`` (N or rho) x T of two-block recovery trials.

    ``n`` is the fixed size when sweeping rho; ``rho`` is the fixed
    correlation when sweeping N.
    """

    axis1: str
    axis1_values: tuple
    T_values: tuple
    n: int = 100
    rho: float = 0.1
    margin: MarginKind = field(default_factory=MarginKind)
    corr_kinds: tuple = ("pearson", "spearman")
    linkages: tuple = ("single", "average", "complete", "ward")
    trials: int = 100
    base_seed: int = 0
    fraction_big: float = 0.7

    def __post_init__(self):
        if self.axis1 not in ("N", "rho"):
            raise ValueError(f"axis1 must be 'N' or 'rho', got {self.axis1!r}")
        object.__setattr__(self, "axis1_values", tuple(self.axis1_values))
        object.__setattr__(self, "T_values", tuple(int(t) for t in self.T_values))
        object.__setattr__(self, "margin", MarginKind.parse(self.margin))
        object.__setattr__(self, "corr_kinds",
                           tuple(CorrelationKind(k).value for k in self.corr_kinds))
        object.__setattr__(self, "linkages", tuple(LinkageKind(l).value for l in self.linkages))
        if not self.axis1_values or not self.T_values:
            raise ValueError("grids must be non-empty")
        if not self.corr_kinds or not self.linkages:
            raise ValueError("need at least one correlation kind and one linkage")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for cell in self.cells():
            cell.model  # validates block sizes and rho range

    def cells(self):
        cells = []
        for i, a in enumerate(self.axis1_values):
            for j, t in enumerate(self.T_values):
                n, rho = (int(a), self.rho) if self.axis1 == "N" else (self.n, float(a))
                cells.append(TrialCell(n, rho, t, self.margin, self.fraction_big,
                                       index=i * len(self.T_values) + j))
        return cells

    @classmethod
    def from_dict(cls, obj):
        """Parse ``{"N": [...] | "rho": [...], "T": [...], ...}``."""
        obj = dict(obj)
        if isinstance(obj.get("rho"), list):
            axis1, values = "rho", obj.pop("rho")
            kw = {"n": int(obj.pop("N", obj.pop("n", 100)))}
        elif isinstance(obj.get("N"), list):
            axis1, values = "N", obj.pop("N")
            kw = {"rho": float(obj.pop("rho", 0.1))}
        else:
            raise ValueError("plan needs a list under 'N' or 'rho'")
        T = obj.pop("T")
        allowed = {"margin", "corr_kinds", "linkages", "trials", "base_seed", "fraction_big"}
        unknown = set(obj) - allowed
        if unknown:
            raise ValueError(f"unknown plan keys: {sorted(unknown)}")
        return cls(axis1, values, T, **kw, **obj)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def nt_default(cls, full=False, **kw):
        """(N, T) sweep at rho = 0.1: N in 10..400, T in 10..390."""
        if full:
            return cls("N", range(10, 401, 10), range(10, 391, 10), **kw)
        return cls("N", _grid(10, 400, 20, True), _grid(10, 390, 20, True), **kw)

    @classmethod
    def rho_default(cls, margin="gaussian", full=False, **kw):
        """(rho, T) sweep: rho in 0..0.5 (Gaussian) or 0..0.1 (Student), T in 10..390."""
        top = 0.5 if MarginKind.parse(margin).kind == "gaussian" else 0.1
        num = 51 if full else 20
        T = range(10, 391, 10) if full else _grid(10, 390, 20, True)
        return cls("rho", _grid(0.0, top, num), T, margin=margin, **kw)


@dataclass
class SuccessGrid:
    """Success counts for one (kind, linkage) over the axis1 x T grid."""

    axis1: str
    axis1_values: tuple
    T_values: tuple
    kind: str
    linkage: str
    trials: int
    counts: np.ndarray

    def rates(self):
        return self.counts / self.trials

    def mean_rate(self):
        return float(self.rates().mean())


def _run_cell(args):
    cell, plan = args
    counts = {(k, l): 0 for k in plan.corr_kinds for l in plan.linkages}
    warnings = 0
    for trial in range(plan.trials):
        try:
            out, w = trial_outcomes(cell, trial, plan.base_seed, plan.corr_kinds, plan.linkages)
        except Exception as exc:  # keep the sweep going
            logger.warning("cell %d trial %d failed: %s", cell.index, trial, exc)
            warnings += 1
            continue
        warnings += w
        for key, ok in out.items():
            counts[key] += int(ok)
    return cell.index, counts, warnings


def run_grid(plan, workers=1):
    """Run every cell and trial of ``plan``.

    Returns ``(grids, n_warnings)`` with ``grids[(kind, linkage)]`` a
    :class:`SuccessGrid`. Results do not depend on ``workers``.
    """
    cells = plan.cells()
    tasks = [(c, plan) for c in cells]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, tasks, chunksize=1))
    else:
        results = [_run_cell(t) for t in tasks]

    shape = (len(plan.axis1_values), len(plan.T_values))
    grids = {
        (k, l): SuccessGrid(plan.axis1, plan.axis1_values, plan.T_values, k, l, plan.trials,
                            np.zeros(shape, dtype=np.int64))
        for k in plan.corr_kinds for l in plan.linkages
    }
    total_warnings = 0
    for index, counts, warnings in results:
        i, j = divmod(index, shape[1])
        for key, c in counts.items():
            grids[key].counts[i, j] = c
        total_warnings += warnings
    return grids, total_warnings


def grids_to_csv(grids, fh=None):
    """Write grids as ``axis1,axis2,kind,linkage,successes,trials`` rows."""
    own = fh is None
    fh = fh or io.StringIO()
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for (kind, linkage), g in grids.items():
        for i, a in enumerate(g.axis1_values):
            for j, t in enumerate(g.T_values):
                w.writerow([a, t, kind, linkage, int(g.counts[i, j]), g.trials])
    return fh.getvalue() if own else None

"""Spectral data of the system Hamiltonian.

Levels and projectors of ``H_S``, its Bohr frequencies, the eigenoperator
(jump operator) decomposition of coupling operators, and the reference split
``H_S = H0 + delta`` in which nearly degenerate levels of ``H_S`` become
exactly degenerate in ``H0``.  Clustering is done on energy levels; the
clustering of Bohr frequencies is induced by it, so a commuting ``H0`` always
exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import InvariantError, as_hermitian, as_square, hermitian_eig

__all__ = [
    "IncompatibleReferenceError",
    "SpectralDecomposition",
    "BohrSpectrum",
    "H0Level",
    "BohrCluster",
    "ReferenceSplit",
    "JumpOperatorSet",
    "ValidityReport",
    "decompose",
    "bohr_frequencies",
    "jump_operators",
    "reference_split_by_tolerance",
    "reference_split_explicit",
    "aggregate_jump_operators",
    "cluster_operator_direct",
    "validity_diagnostics",
]


class IncompatibleReferenceError(InvariantError):
    """The proposed reference Hamiltonian is not block-constant on the levels of H_S."""


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct levels ``energies[j]`` with eigenprojectors ``projectors[j]``."""

    matrix: np.ndarray
    energies: np.ndarray
    projectors: tuple[np.ndarray, ...]
    group_tol: float = 0.0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __len__(self):
        return len(self.energies)


@dataclass(frozen=True, eq=False)
class BohrSpectrum:
    """Bohr frequencies ``w = e_j - e_j'`` with the level pairs ``(j, j')`` producing each.

    Within a :class:`ReferenceSplit` a numerical frequency may appear twice
    when its level pairs fall into different clusters.
    """

    frequencies: np.ndarray
    pairs: tuple[tuple[tuple[int, int], ...], ...]
    dedup_tol: float = 0.0

    def __len__(self):
        return len(self.frequencies)

    def index_of(self, w: float, tol: float | None = None) -> int:
        tol = max(self.dedup_tol, 1e-12) if tol is None else tol
        hits = np.flatnonzero(np.abs(self.frequencies - w) <= tol)
        if len(hits) != 1:
            raise KeyError(f"frequency {w} not uniquely present")
        return int(hits[0])


@dataclass(frozen=True, eq=False)
class H0Level:
    energy: float
    projector: np.ndarray
    members: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class BohrCluster:
    """Bohr frequencies of ``H_S`` collapsing onto the Bohr frequency ``center`` of ``H0``."""

    center: float
    members: tuple[int, ...]  # indices into ReferenceSplit.bohr

    def spread(self, bohr: BohrSpectrum) -> float:
        if not self.members:
            return 0.0
        return float(np.max(np.abs(bohr.frequencies[list(self.members)] - self.center)))


@dataclass(frozen=True, eq=False)
class ReferenceSplit:
    base: SpectralDecomposition
    h0_levels: tuple[H0Level, ...]
    h0: np.ndarray
    delta: np.ndarray
    bohr: BohrSpectrum
    clusters: tuple[BohrCluster, ...]
    diagnostics: dict = field(default_factory=dict)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.clusters])

    def cluster_of(self, k: int) -> int:
        for i, c in enumerate(self.clusters):
            if k in c.members:
                return i
        raise KeyError(k)

    @property
    def is_trivial(self) -> bool:
        return all(len(lv.members) == 1 for lv in self.h0_levels)


@dataclass(frozen=True, eq=False)
class JumpOperatorSet:
    """Eigenoperators ``ops[a][k]`` of coupling ``a`` at Bohr frequency ``bohr.frequencies[k]``.

    When aggregated over a split, ``cluster_ops[a][c]`` holds the operator
    of cluster ``split.clusters[c]``.
    """

    decomposition: SpectralDecomposition
    bohr: BohrSpectrum
    couplings: tuple[np.ndarray, ...]
    ops: tuple[tuple[np.ndarray, ...], ...]
    split: ReferenceSplit | None = None
    cluster_ops: tuple[tuple[np.ndarray, ...], ...] | None = None


@dataclass
class ValidityReport:
    """Dimensionless ratios that should all be << 1 for the unified equation to apply."""

    weak_coupling: float
    cluster_separation: float
    intra_cluster_real: float
    intra_cluster_imag: float
    delta_ratio: float
    flags: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "weak_coupling": self.weak_coupling,
            "cluster_separation": self.cluster_separation,
            "intra_cluster_real": self.intra_cluster_real,
            "intra_cluster_imag": self.intra_cluster_imag,
            "delta_ratio": self.delta_ratio,
            "flags": list(self.flags),
        }


def decompose(h, group_tol: float = 0.0) -> SpectralDecomposition:
    """Distinct eigenvalues and eigenprojectors of ``h``."""
    h = as_hermitian(h)
    if group_tol == 0.0:
        # merge only numerical noise
        group_tol = 1e-10 * max(np.max(np.abs(h)), 1.0)
    levels = hermitian_eig(h, group_tol)
    return SpectralDecomposition(
        matrix=h,
        energies=np.array([e for e, _ in levels]),
        projectors=tuple(p for _, p in levels),
        group_tol=group_tol,
    )


def _group_sorted(values: np.ndarray, tol: float) -> list[list[int]]:
    order = np.argsort(values, kind="stable")
    groups: list[list[int]] = []
    last = None
    for i in order:
        if last is not None and values[i] - last <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
        last = values[i]
    return groups


def bohr_frequencies(d: SpectralDecomposition, dedup_tol: float | None = None) -> BohrSpectrum:
    """All differences ``e_j - e_j'``, deduplicated within ``dedup_tol``."""
    e = d.energies
    if dedup_tol is None:
        dedup_tol = 1e-9 * max(float(np.max(np.abs(e))), 1e-300)
    n = len(e)
    pair_list = [(j, jp) for j in range(n) for jp in range(n)]
    diffs = np.array([e[j] - e[jp] for j, jp in pair_list])
    groups = _group_sorted(diffs, dedup_tol)
    freqs = np.array([np.mean(diffs[g]) for g in groups])
    # the difference set is symmetric, so group k mirrors group n-1-k
    freqs = 0.5 * (freqs - freqs[::-1])
    pairs = tuple(tuple(pair_list[i] for i in g) for g in groups)
    return BohrSpectrum(frequencies=freqs, pairs=pairs, dedup_tol=dedup_tol)


def _as_couplings(couplings, dim) -> tuple[np.ndarray, ...]:
    out = []
    for a in couplings:
        a = as_square(a)
        if a.shape[0] != dim:
            raise InvariantError(f"coupling of dimension {a.shape[0]} does not match system dimension {dim}")
        out.append(a)
    return tuple(out)


def _eigenoperator(d: SpectralDecomposition, pairs, a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    for j, jp in pairs:
        out += d.projectors[jp] @ a @ d.projectors[j]
    return out


def jump_operators(d: SpectralDecomposition, F: BohrSpectrum, couplings) -> JumpOperatorSet:
    """``A_{a,w} = sum_{e_j - e_j' = w} P_j' A_a P_j`` for every coupling and Bohr frequency."""
    cs = _as_couplings(couplings, d.dim)
    ops = tuple(tuple(_eigenoperator(d, pr, a) for pr in F.pairs) for a in cs)
    return JumpOperatorSet(decomposition=d, bohr=F, couplings=cs, ops=ops)


def _build_split(d: SpectralDecomposition, members: list[list[int]],
                 energies0: list[float]) -> ReferenceSplit:
    level_of = np.empty(len(d), dtype=int)
    h0_levels = []
    for k, (mem, e0) in enumerate(zip(members, energies0)):
        level_of[mem] = k
        proj = sum(d.projectors[j] for j in mem)
        h0_levels.append(H0Level(energy=float(e0), projector=proj, members=tuple(mem)))
    h0 = sum(lv.energy * lv.projector for lv in h0_levels)
    delta = d.matrix - h0

    e0 = np.array(energies0)
    scale = max(float(np.max(np.abs(d.energies))), 1e-300)
    tol = 1e-9 * scale

    # centers: Bohr frequencies of H0
    k_pairs = [(k, kp) for k in range(len(e0)) for kp in range(len(e0))]
    cdiffs = np.array([e0[k] - e0[kp] for k, kp in k_pairs])
    cgroups = _group_sorted(cdiffs, tol)
    centers = np.array([np.mean(cdiffs[g]) for g in cgroups])
    centers = 0.5 * (centers - centers[::-1])
    center_of_kpair = {}
    for ci, g in enumerate(cgroups):
        for i in g:
            center_of_kpair[k_pairs[i]] = ci

    # induced clustering; a frequency whose level pairs land in two clusters is split
    base = bohr_frequencies(d)
    freqs, pairs, cmembers = [], [], [[] for _ in centers]
    for w, prs in zip(base.frequencies, base.pairs):
        by_center: dict[int, list[tuple[int, int]]] = {}
        for j, jp in prs:
            ci = center_of_kpair[(int(level_of[j]), int(level_of[jp]))]
            by_center.setdefault(ci, []).append((j, jp))
        for ci in sorted(by_center):
            cmembers[ci].append(len(freqs))
            freqs.append(w)
            pairs.append(tuple(by_center[ci]))
    bohr = BohrSpectrum(frequencies=np.array(freqs), pairs=tuple(pairs), dedup_tol=base.dedup_tol)
    clusters = tuple(BohrCluster(center=float(c), members=tuple(m)) for c, m in zip(centers, cmembers))

    dnorm = float(np.linalg.norm(delta, 2))
    hnorm = float(np.linalg.norm(d.matrix, 2))
    diag = {"delta_ratio": dnorm / hnorm if hnorm > 0 else 0.0, "flags": []}
    if len(h0_levels) == 1 and len(d) > 1 and diag["delta_ratio"] > 0.1:
        diag["flags"].append("single_reference_level")
    return ReferenceSplit(base=d, h0_levels=tuple(h0_levels), h0=h0, delta=delta,
                          bohr=bohr, clusters=clusters, diagnostics=diag)


def reference_split_by_tolerance(d: SpectralDecomposition, level_cluster_tol: float) -> ReferenceSplit:
    """Merge levels closer than ``level_cluster_tol`` (single linkage) into one ``H0`` level.

    The merged level sits at the degeneracy-weighted mean of its members.
    """
    if level_cluster_tol < 0:
        raise ValueError("level_cluster_tol must be non-negative")
    groups = [[0]]
    for j in range(1, len(d)):
        if d.energies[j] - d.energies[j - 1] <= level_cluster_tol:
            groups[-1].append(j)
        else:
            groups.append([j])
    energies0 = []
    for g in groups:
        ranks = np.array([np.real(np.trace(d.projectors[j])) for j in g])
        energies0.append(float(np.dot(ranks, d.energies[g]) / ranks.sum()))
    return _build_split(d, groups, energies0)


def reference_split_explicit(d: SpectralDecomposition, h0, atol: float = 1e-10) -> ReferenceSplit:
    """Split with a user-supplied reference Hamiltonian ``h0``.

    Every eigenprojector of ``h0`` must be a sum of eigenprojectors of ``H_S``.
    """
    h0 = as_hermitian(h0)
    if h0.shape != d.matrix.shape:
        raise InvariantError("reference Hamiltonian dimension mismatch")
    lv0 = hermitian_eig(h0, 1e-9 * max(np.max(np.abs(h0)), 1.0))
    members: list[list[int]] = []
    energies0 = []
    assigned = set()
    for e0, q in lv0:
        mem = [j for j, p in enumerate(d.projectors)
               if np.linalg.norm(q @ p - p) <= 1e-8 * max(1.0, np.linalg.norm(p))]
        recon = sum((d.projectors[j] for j in mem), np.zeros_like(q))
        if not mem or np.max(np.abs(recon - q)) > atol:
            raise IncompatibleReferenceError(
                f"eigenprojector of H0 at {e0:.6g} is not a sum of eigenprojectors of H_S"
            )
        if assigned & set(mem):
            raise IncompatibleReferenceError("overlapping reference levels")
        assigned |= set(mem)
        members.append(mem)
        energies0.append(e0)
    split = _build_split(d, members, energies0)
    if np.max(np.abs(split.h0 - h0)) > atol * max(1.0, np.max(np.abs(h0))):
        raise IncompatibleReferenceError("reconstructed H0 deviates from the supplied one")
    return split


def aggregate_jump_operators(j: JumpOperatorSet, split: ReferenceSplit) -> JumpOperatorSet:
    """Cluster operators ``A_{a,wbar} = sum_{w in cluster} A_{a,w}``.

    ``j`` must have been built on ``split.bohr``; otherwise it is rebuilt there.
    """
    if j.decomposition is not split.base:
        raise InvariantError("jump operators and split come from different decompositions")
    if j.bohr is not split.bohr:
        j = jump_operators(split.base, split.bohr, j.couplings)
    cluster_ops = []
    for ops_a, a in zip(j.ops, j.couplings):
        row = []
        for c in split.clusters:
            row.append(sum((ops_a[k] for k in c.members), np.zeros_like(a)))
        cluster_ops.append(tuple(row))
    return JumpOperatorSet(decomposition=j.decomposition, bohr=j.bohr, couplings=j.couplings,
                           ops=j.ops, split=split, cluster_ops=tuple(cluster_ops))


def cluster_operator_direct(split: ReferenceSplit, a, center: float, tol: float = 1e-9) -> np.ndarray:
    """``sum P0_k' A P0_k`` over reference levels with ``e0_k - e0_k' = center``."""
    a = as_square(a)
    out = np.zeros_like(a)
    scale = max(1.0, max(abs(lv.energy) for lv in split.h0_levels))
    for lk in split.h0_levels:
        for lkp in split.h0_levels:
            if abs(lk.energy - lkp.energy - center) <= tol * scale:
                out += lkp.projector @ a @ lk.projector
    return out


def validity_diagnostics(split: ReferenceSplit, baths, couplings=None, op_tol: float = 1e-12) -> ValidityReport:
    """Ratios quantifying the three validity conditions of the unified equation.

    weak_coupling
        ``max |Gamma(w)| / decay_scale`` over Bohr frequencies and baths.
    cluster_separation
        ``max |Gamma(wbar)| / |wbar' - wbar|`` over pairs of distinct centers.
    intra_cluster_real, intra_cluster_imag
        ``max |Gamma'(wbar)| * dw / |Gamma(wbar)|`` for real and imaginary
        parts, ``dw`` the cluster spread; ``Gamma'`` by central differences
        with step ``dw / 100``.

    When ``couplings`` is given only frequencies carrying a nonzero jump
    operator are considered.
    """
    baths = list(baths)
    active = np.ones(len(split.bohr), dtype=bool)
    if couplings is not None:
        j = jump_operators(split.base, split.bohr, couplings)
        active = np.array([any(np.max(np.abs(ops[k])) > op_tol for ops in j.ops)
                           for k in range(len(split.bohr))])
    freqs = split.bohr.frequencies[active]
    clusters = [c for c in split.clusters if any(active[k] for k in c.members)]
    centers = np.array([c.center for c in clusters])

    weak = 0.0
    sep = 0.0
    re_ratio = 0.0
    im_ratio = 0.0
    for b in baths:
        if len(freqs):
            weak = max(weak, float(np.max(np.abs(b.Gamma(freqs)))) / b.decay_scale)
        for c in centers:
            others = centers[np.abs(centers - c) > 1e-12]
            if len(others):
                sep = max(sep, float(np.abs(b.Gamma(c))) / float(np.min(np.abs(others - c))))
        for cl in clusters:
            members = [k for k in cl.members if active[k]]
            dw = float(np.max(np.abs(split.bohr.frequencies[members] - cl.center)))
            if dw == 0.0:
                continue
            h = dw / 100.0
            g0 = complex(b.Gamma(cl.center))
            dg = complex((b.Gamma(cl.center + h) - b.Gamma(cl.center - h)) / (2 * h))
            if g0.real != 0:
                re_ratio = max(re_ratio, abs(dg.real) * dw / abs(g0.real))
            if g0.imag != 0:
                im_ratio = max(im_ratio, abs(dg.imag) * dw / abs(g0.imag))
    diag = split.diagnostics
    return ValidityReport(weak_coupling=weak, cluster_separation=sep,
                          intra_cluster_real=re_ratio, intra_cluster_imag=im_ratio,
                          delta_ratio=float(diag.get("delta_ratio", 0.0)),
                          flags=list(diag.get("flags", [])))

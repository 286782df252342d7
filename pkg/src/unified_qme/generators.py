"""Master-equation generators as dense superoperators.

All generators share the layout

    L = -i [H_S + sum_b H_LS_b, .] + sum_b D_b

with one Lamb-shift Hamiltonian ``H_LS_b`` and one dissipator ``D_b`` per
bath label ``b``.  Coupling operators are paired one-to-one with bath
descriptors; operators whose baths share a label are cross-correlated
through the same ``Gamma``, which is equivalent to summing them into a single
coupling.

Kinds
-----
redfield            all pairs (w, w') with gamma(w, w') and S(w, w')
nonsecular_davies   all pairs with the arguments swapped: gamma(w', w), S(w', w)
davies              only w == w'
unified             cluster dissipator with gamma at the cluster centre, Lamb
                    shift over intra-cluster pairs with S at the member frequencies
unified_simplified  cluster dissipator, Lamb shift with S at the cluster centre
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .linalg import InvariantError, apply_super, lift_commutator, lift_left, lift_right, lift_sandwich
from .spectral import (
    JumpOperatorSet,
    ReferenceSplit,
    SpectralDecomposition,
    aggregate_jump_operators,
    bohr_frequencies,
    jump_operators,
)

__all__ = [
    "KINDS",
    "Generator",
    "CertificateBlock",
    "GKLSCertificate",
    "build_redfield",
    "build_davies",
    "build_unified",
    "build_unified_simplified",
    "build_nonsecular_davies",
    "build",
    "gkls_certificate",
]

KINDS = ("redfield", "davies", "unified", "unified_simplified", "nonsecular_davies")

# jump operators with max|entry| below this are treated as absent
_OP_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class CertificateBlock:
    bath: str
    label: str  # e.g. "wbar=100.02" or "full"
    frequencies: tuple[float, ...]
    matrix: np.ndarray

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    @property
    def max_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[-1])


@dataclass(frozen=True)
class GKLSCertificate:
    kind: str
    blocks: tuple[CertificateBlock, ...]

    @property
    def min_eigenvalue(self) -> float:
        return min((b.min_eigenvalue for b in self.blocks), default=0.0)

    @property
    def max_eigenvalue(self) -> float:
        return max((b.max_eigenvalue for b in self.blocks), default=0.0)

    def is_psd(self, atol: float = 1e-12) -> bool:
        return self.min_eigenvalue >= -atol

    def summary(self) -> list[dict]:
        return [{"bath": b.bath, "block": b.label, "size": int(b.matrix.shape[0]),
                 "min_eigenvalue": b.min_eigenvalue} for b in self.blocks]


@dataclass(frozen=True, eq=False)
class Generator:
    """Dense generator with its per-bath decomposition (energies in cm^-1)."""

    kind: str
    hamiltonian: np.ndarray
    lamb_shifts: dict
    dissipators: dict
    total: np.ndarray
    baths: dict
    split: ReferenceSplit | None = None
    certificate_blocks: tuple[CertificateBlock, ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def lamb_shift(self) -> np.ndarray:
        return sum(self.lamb_shifts.values(), np.zeros_like(self.hamiltonian))

    def bath_part(self, label: str) -> np.ndarray:
        """Superoperator ``L_b = -i[H_LS_b, .] + D_b`` of a single bath."""
        return -1j * lift_commutator(self.lamb_shifts[label]) + self.dissipators[label]

    def __call__(self, rho) -> np.ndarray:
        return apply_super(self.total, rho)


def _group_baths(couplings, baths):
    couplings = list(couplings)
    baths = list(baths)
    if len(couplings) != len(baths):
        raise InvariantError(f"{len(couplings)} couplings but {len(baths)} baths")
    groups: OrderedDict = OrderedDict()
    for alpha, b in enumerate(baths):
        if b.label in groups:
            if groups[b.label][0] != b:
                raise InvariantError(f"two different baths share the label {b.label!r}")
            groups[b.label][1].append(alpha)
        else:
            groups[b.label] = (b, [alpha])
    return groups


def _summed(ops_by_alpha, alphas):
    return sum((ops_by_alpha[a] for a in alphas[1:]), ops_by_alpha[alphas[0]].copy())


def _is_zero(m) -> bool:
    return float(np.max(np.abs(m), initial=0.0)) <= _OP_TOL


def _gkls_term(gamma, a, b_dag):
    """Superoperator of ``gamma * (a rho b_dag - 1/2 {b_dag a, rho})``."""
    x = b_dag @ a
    return gamma * (lift_sandwich(a, b_dag) - 0.5 * (lift_left(x) + lift_right(x)))


def _assemble(kind, h, lamb, diss, bath_objs, split=None, blocks=()):
    dim = h.shape[0]
    total = -1j * lift_commutator(h + sum(lamb.values(), np.zeros((dim, dim), complex)))
    for d in diss.values():
        total = total + d
    return Generator(kind=kind, hamiltonian=h, lamb_shifts=dict(lamb), dissipators=dict(diss),
                     total=total, baths=dict(bath_objs), split=split, certificate_blocks=tuple(blocks))


def _pair_generator(kind, d: SpectralDecomposition, couplings, baths, secular: bool, swap: bool):
    F = bohr_frequencies(d)
    jops = jump_operators(d, F, couplings)
    freqs = F.frequencies
    dim = d.dim
    lamb, diss, bath_objs, blocks = {}, {}, {}, []
    for label, (bath, alphas) in _group_baths(couplings, baths).items():
        ops = [_summed([jops.ops[a][k] for a in range(len(jops.ops))], alphas) for k in range(len(freqs))]
        live = [k for k in range(len(freqs)) if not _is_zero(ops[k])]
        gam = np.zeros((len(freqs), len(freqs)), complex)
        lam = np.zeros_like(gam)
        G = bath.Gamma(freqs)
        for k in live:
            for kp in live:
                if secular and k != kp:
                    continue
                # gamma(w, w') = G(w) + G*(w'),  S(w, w') = (G(w) - G*(w')) / 2i
                w, wp = (kp, k) if swap else (k, kp)
                gam[k, kp] = G[w] + np.conj(G[wp])
                lam[k, kp] = (G[w] - np.conj(G[wp])) / 2j
        D = np.zeros((dim * dim, dim * dim), complex)
        H_ls = np.zeros((dim, dim), complex)
        for k in live:
            for kp in live:
                if gam[k, kp] == 0 and lam[k, kp] == 0:
                    continue
                b_dag = ops[kp].conj().T
                D += _gkls_term(gam[k, kp], ops[k], b_dag)
                H_ls += lam[k, kp] * (b_dag @ ops[k])
        lamb[label] = 0.5 * (H_ls + H_ls.conj().T)
        diss[label] = D
        bath_objs[label] = bath
        blocks.extend(_pair_blocks(kind, label, jops, alphas, freqs, gam, secular))
    return _assemble(kind, d.matrix, lamb, diss, bath_objs, blocks=blocks)


def _pair_blocks(kind, label, jops, alphas, freqs, gam, secular):
    # double index (alpha, w): rows carry w', columns carry w; entry gamma(w, w')
    index = [(a, k) for a in alphas for k in range(len(freqs)) if not _is_zero(jops.ops[a][k])]
    if secular:
        out = []
        for k in sorted({k for _, k in index}):
            sub = [(a, kk) for a, kk in index if kk == k]
            m = np.full((len(sub), len(sub)), gam[k, k])
            out.append(CertificateBlock(label, f"w={freqs[k]:.6g}", (float(freqs[k]),), m))
        return out
    m = np.array([[gam[k, kp] for (_, k) in index] for (_, kp) in index])
    return [CertificateBlock(label, "full", tuple(float(freqs[k]) for _, k in index), m)]


def build_redfield(d: SpectralDecomposition, couplings, baths) -> Generator:
    """Time-independent Redfield generator in the Schrodinger picture."""
    return _pair_generator("redfield", d, couplings, baths, secular=False, swap=False)


def build_nonsecular_davies(d: SpectralDecomposition, couplings, baths) -> Generator:
    """Redfield structure with the coefficient arguments swapped."""
    return _pair_generator("nonsecular_davies", d, couplings, baths, secular=False, swap=True)


def build_davies(d: SpectralDecomposition, couplings, baths) -> Generator:
    """Fully secular (Davies) generator."""
    return _pair_generator("davies", d, couplings, baths, secular=True, swap=False)


def _cluster_generator(kind, split: ReferenceSplit, couplings, baths, refined: bool):
    d = split.base
    jops: JumpOperatorSet = aggregate_jump_operators(jump_operators(d, split.bohr, couplings), split)
    freqs = split.bohr.frequencies
    centers = split.centers
    dim = d.dim
    lamb, diss, bath_objs, blocks = {}, {}, {}, []
    n_alpha = len(jops.ops)
    for label, (bath, alphas) in _group_baths(couplings, baths).items():
        ops = [_summed([jops.ops[a][k] for a in range(n_alpha)], alphas) for k in range(len(freqs))]
        cops = [_summed([jops.cluster_ops[a][c] for a in range(n_alpha)], alphas)
                for c in range(len(centers))]
        Gc = bath.Gamma(centers)
        Gw = bath.Gamma(freqs)
        D = np.zeros((dim * dim, dim * dim), complex)
        H_ls = np.zeros((dim, dim), complex)
        for c, cl in enumerate(split.clusters):
            if _is_zero(cops[c]):
                continue
            D += _gkls_term(2.0 * Gc[c].real, cops[c], cops[c].conj().T)
            if refined:
                for k in cl.members:
                    for kp in cl.members:
                        if _is_zero(ops[k]) or _is_zero(ops[kp]):
                            continue
                        s = (Gw[k] - np.conj(Gw[kp])) / 2j
                        H_ls += s * (ops[kp].conj().T @ ops[k])
            else:
                H_ls += Gc[c].imag * (cops[c].conj().T @ cops[c])
            index = [a for a in alphas if not _is_zero(jops.cluster_ops[a][c])]
            m = np.full((len(index), len(index)), 2.0 * Gc[c].real, dtype=complex)
            blocks.append(CertificateBlock(label, f"wbar={centers[c]:.6g}", (float(centers[c]),), m))
        lamb[label] = 0.5 * (H_ls + H_ls.conj().T)
        diss[label] = D
        bath_objs[label] = bath
    return _assemble(kind, d.matrix, lamb, diss, bath_objs, split=split, blocks=blocks)


def build_unified(split: ReferenceSplit, couplings, baths) -> Generator:
    """Unified GKLS generator with the refined (member-frequency) Lamb shift."""
    return _cluster_generator("unified", split, couplings, baths, refined=True)


def build_unified_simplified(split: ReferenceSplit, couplings, baths) -> Generator:
    """Unified dissipator with the Lamb shift evaluated at the cluster centres."""
    return _cluster_generator("unified_simplified", split, couplings, baths, refined=False)


def build(kind: str, split: ReferenceSplit, couplings, baths) -> Generator:
    """Dispatch on ``kind``; pair-type generators use ``split.base``."""
    if kind == "redfield":
        return build_redfield(split.base, couplings, baths)
    if kind == "davies":
        return build_davies(split.base, couplings, baths)
    if kind == "nonsecular_davies":
        return build_nonsecular_davies(split.base, couplings, baths)
    if kind == "unified":
        return build_unified(split, couplings, baths)
    if kind == "unified_simplified":
        return build_unified_simplified(split, couplings, baths)
    raise ValueError(f"unknown generator kind {kind!r}; expected one of {KINDS}")


def gkls_certificate(g: Generator) -> GKLSCertificate:
    """Coefficient matrices of ``g`` whose positivity decides the GKLS form."""
    return GKLSCertificate(kind=g.kind, blocks=g.certificate_blocks)

"""Scenario descriptions, the two built-in experiments, and dimer closed forms.

A :class:`ScenarioSpec` is declarative: it stores parameters in canonical
units (cm^-1, fs, K) and resolves them into operators, bath descriptors and a
reference split on demand.  :meth:`ScenarioSpec.to_dict` /
:meth:`ScenarioSpec.from_dict` convert to and from the unit-annotated mapping
used in scenario files.

Built-ins
---------
``paper-fig2``
    Two coupled qubits, ``H = E1 sz1 + E2 sz2 + J sx1 sx2``, with a common
    bath (coupling ``sx1 + sx2``) and two local dephasing baths.
``paper-fig3``
    The dephasing dimer restricted to span{|01>, |10>}: ``H = J (|01><10| + h.c.)``,
    couplings ``-Z`` and ``+Z``, reference Hamiltonian zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from .bath import BathDescriptor, drude_lorentz_exact_gamma, drude_lorentz_high_temp
from .linalg import as_density_matrix, as_square, matrix_exp
from .spectral import ReferenceSplit, decompose, reference_split_by_tolerance, reference_split_explicit
from .units import CM_TO_RAD_PER_FS, KB_REPRODUCTION, rate_from_lifetime_fs

__all__ = [
    "ScenarioError",
    "BathSpec",
    "CouplingSpec",
    "ScenarioSpec",
    "BUILTINS",
    "builtin",
    "builtin_two_qubit_three_bath",
    "builtin_dephasing_dimer",
    "two_qubit_hamiltonian",
    "two_qubit_coupling",
    "dimer_coefficients",
    "dephasing_analytic_coherences",
    "slowest_decay_rate",
    "parse_quantity",
]

SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)  # |1><1| - |0><0|
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
METHODS = ("redfield", "davies", "unified", "unified_simplified", "nonsecular_davies", "heom")


class ScenarioError(ValueError):
    """Invalid scenario content; ``path`` locates the offending entry."""

    def __init__(self, message: str, path: tuple = ()):
        super().__init__(message)
        self.path = tuple(path)


# --- quantities -------------------------------------------------------------

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S.*?)?\s*$")
_UNITS = {
    "energy": {"cm^-1": 1.0, "cm-1": 1.0, "1/cm": 1.0},
    "time": {"fs": 1.0, "ps": 1000.0},
    "temperature": {"K": 1.0},
    "kB": {"cm^-1/K": 1.0, "cm-1/K": 1.0},
}
_CANONICAL = {"energy": "cm^-1", "time": "fs", "temperature": "K", "kB": "cm^-1/K"}


def parse_quantity(value, kind: str, path: tuple = ()) -> float:
    """Parse ``"<number> <unit>"`` into canonical units; bare numbers are rejected."""
    if isinstance(value, bool) or not isinstance(value, str):
        raise ScenarioError(f"expected a quantity with a {kind} unit such as "
                            f"'1.0 {_CANONICAL[kind]}', got {value!r}", path)
    m = _QTY.match(value)
    if not m or not m.group(2):
        raise ScenarioError(f"missing unit in {value!r}; expected {kind} in {sorted(_UNITS[kind])}", path)
    unit = m.group(2)
    if unit not in _UNITS[kind]:
        raise ScenarioError(f"unit {unit!r} is not a {kind} unit; expected one of {sorted(_UNITS[kind])}", path)
    return float(m.group(1)) * _UNITS[kind][unit]


def _qty(x: float, kind: str) -> str:
    return f"{float(x)!r} {_CANONICAL[kind]}"


def _matrix_to_dict(m: np.ndarray, unit: str | None = None) -> dict:
    out = {}
    if unit:
        out["unit"] = unit
    out["real"] = [[float(v) for v in row] for row in np.real(m)]
    if np.any(np.imag(m) != 0):
        out["imag"] = [[float(v) for v in row] for row in np.imag(m)]
    return out


def _matrix_from_dict(d, path, unit_kind: str | None = None) -> np.ndarray:
    if not isinstance(d, dict):
        raise ScenarioError("matrix must be a mapping with 'real' (and optional 'imag')", path)
    _check_keys(d, {"unit", "real", "imag"}, path)
    if unit_kind is not None:
        unit = d.get("unit")
        if unit is None:
            raise ScenarioError(f"matrix needs a 'unit' ({_CANONICAL[unit_kind]})", path)
        if unit not in _UNITS[unit_kind]:
            raise ScenarioError(f"unit {unit!r} is not a {unit_kind} unit", path + ("unit",))
    try:
        re_ = np.array(d["real"], dtype=float)
        im_ = np.array(d.get("imag", np.zeros_like(re_)), dtype=float)
        m = re_ + 1j * im_
        as_square(m)
    except KeyError:
        raise ScenarioError("matrix lacks 'real'", path) from None
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"malformed matrix: {exc}", path) from None
    return m


def _check_keys(d: dict, allowed: set, path: tuple, required: set = frozenset()):
    for k in d:
        if k not in allowed:
            raise ScenarioError(f"unknown key {k!r}; allowed: {sorted(allowed)}", path + (k,))
    for k in required:
        if k not in d:
            raise ScenarioError(f"missing required key {k!r}", path)


# --- specs -------------------------------------------------------------------

@dataclass
class BathSpec:
    """Drude-Lorentz bath; ``gamma`` is ``"high_temp"`` or ``"exact_kms"``."""

    label: str
    eta: float
    cutoff: float
    temperature: float
    gamma: str = "high_temp"

    def descriptor(self, kB: float) -> BathDescriptor:
        make = drude_lorentz_exact_gamma if self.gamma == "exact_kms" else drude_lorentz_high_temp
        return make(self.eta, self.cutoff, self.temperature, kB=kB, label=self.label)


@dataclass
class CouplingSpec:
    """System operator coupled to bath ``bath``: either two-qubit Pauli form or an explicit matrix."""

    bath: str
    qubit: int | None = None
    kx: float = 0.0
    kz: float = 0.0
    matrix: np.ndarray | None = None

    def operator(self) -> np.ndarray:
        if self.matrix is not None:
            return np.asarray(self.matrix, dtype=complex)
        return two_qubit_coupling(self.qubit, self.kx, self.kz)


@dataclass
class ScenarioSpec:
    name: str
    baths: list[BathSpec]
    couplings: list[CouplingSpec]
    two_qubit: tuple[float, float, float] | None = None  # (E1, E2, J)
    hamiltonian_matrix: np.ndarray | None = None
    kB: float = KB_REPRODUCTION
    level_tolerance: float | None = None
    h0_matrix: np.ndarray | None = None
    initial_index: int | None = 0
    initial_matrix: np.ndarray | None = None
    t_max_fs: float = 1000.0
    dt_fs: float | None = None
    methods: list[str] = field(default_factory=lambda: ["unified"])
    heom_depth: int = 6
    coherence: tuple[int, int] | None = None
    fit_window_fs: tuple[float, float] | None = None
    description: str = ""

    # -- resolution
    def hamiltonian(self) -> np.ndarray:
        if self.two_qubit is not None:
            return two_qubit_hamiltonian(*self.two_qubit)
        return np.asarray(self.hamiltonian_matrix, dtype=complex)

    @property
    def dim(self) -> int:
        return self.hamiltonian().shape[0]

    def coupling_operators(self) -> list[np.ndarray]:
        return [c.operator() for c in self.couplings]

    def bath_descriptors(self) -> list[BathDescriptor]:
        """One descriptor per coupling (couplings sharing a bath share the descriptor)."""
        by_label = {b.label: b.descriptor(self.kB) for b in self.baths}
        return [by_label[c.bath] for c in self.couplings]

    def split(self) -> ReferenceSplit:
        d = decompose(self.hamiltonian())
        if self.h0_matrix is not None:
            return reference_split_explicit(d, self.h0_matrix)
        return reference_split_by_tolerance(d, self.level_tolerance or 0.0)

    def initial_state(self) -> np.ndarray:
        if self.initial_matrix is not None:
            return as_density_matrix(self.initial_matrix)
        rho = np.zeros((self.dim, self.dim), complex)
        rho[self.initial_index, self.initial_index] = 1.0
        return rho

    def eigenbasis(self) -> np.ndarray:
        """Eigenvectors of H_S as columns, ascending energy."""
        h = self.hamiltonian()
        return np.linalg.eigh(0.5 * (h + h.conj().T))[1]

    def validate(self):
        if not self.methods:
            raise ScenarioError("at least one method is required", ("methods",))
        for i, m in enumerate(self.methods):
            if m not in METHODS:
                raise ScenarioError(f"unknown method {m!r}; expected one of {METHODS}", ("methods", i))
        if (self.two_qubit is None) == (self.hamiltonian_matrix is None):
            raise ScenarioError("give exactly one of two_qubit or matrix", ("system",))
        h = self.hamiltonian()
        dim = h.shape[0]
        labels = [b.label for b in self.baths]
        if len(set(labels)) != len(labels):
            raise ScenarioError("bath labels must be unique", ("baths",))
        for i, b in enumerate(self.baths):
            if b.eta <= 0 or b.cutoff <= 0 or b.temperature <= 0:
                raise ScenarioError("eta, cutoff and temperature must be positive", ("baths", i))
            if b.gamma not in ("high_temp", "exact_kms"):
                raise ScenarioError(f"gamma must be high_temp or exact_kms, got {b.gamma!r}", ("baths", i, "gamma"))
        for i, c in enumerate(self.couplings):
            if c.bath not in labels:
                raise ScenarioError(f"coupling refers to unknown bath {c.bath!r}", ("couplings", i, "bath"))
            if c.matrix is None and dim != 4:
                raise ScenarioError("two-qubit couplings need a 4-dimensional system", ("couplings", i))
            if c.matrix is None and c.qubit not in (0, 1, 2):
                raise ScenarioError("qubit must be 0 (both), 1 or 2", ("couplings", i, "qubit"))
            if c.operator().shape != (dim, dim):
                raise ScenarioError(f"coupling dimension {c.operator().shape} does not match system {dim}",
                                    ("couplings", i))
        if self.h0_matrix is not None and np.asarray(self.h0_matrix).shape != (dim, dim):
            raise ScenarioError("h0 dimension mismatch", ("reference", "h0"))
        if self.initial_matrix is not None:
            if np.asarray(self.initial_matrix).shape != (dim, dim):
                raise ScenarioError("initial state dimension mismatch", ("initial_state",))
            try:
                as_density_matrix(self.initial_matrix)
            except ValueError as exc:
                raise ScenarioError(str(exc), ("initial_state",)) from None
        elif not 0 <= int(self.initial_index) < dim:
            raise ScenarioError("initial basis index out of range", ("initial_state", "basis_index"))
        if self.t_max_fs <= 0 or (self.dt_fs is not None and self.dt_fs <= 0):
            raise ScenarioError("times must be positive", ("grid",))
        if self.heom_depth < 1:
            raise ScenarioError("HEOM depth must be at least 1", ("heom", "depth"))
        if self.coherence is not None and not all(0 <= k < dim for k in self.coherence):
            raise ScenarioError("coherence indices out of range", ("observables", "coherence"))
        return self

    # -- serialization
    def to_dict(self) -> dict:
        out: dict = {"name": self.name}
        if self.description:
            out["description"] = self.description
        if self.two_qubit is not None:
            e1, e2, j = self.two_qubit
            out["system"] = {"two_qubit": {"E1": _qty(e1, "energy"), "E2": _qty(e2, "energy"),
                                           "J": _qty(j, "energy")}}
        else:
            out["system"] = {"matrix": _matrix_to_dict(self.hamiltonian_matrix, "cm^-1")}
        out["kB"] = _qty(self.kB, "kB")
        out["baths"] = [{"label": b.label, "model": "drude_lorentz", "eta": _qty(b.eta, "energy"),
                         "cutoff": _qty(b.cutoff, "energy"), "temperature": _qty(b.temperature, "temperature"),
                         "gamma": b.gamma} for b in self.baths]
        cs = []
        for c in self.couplings:
            if c.matrix is not None:
                cs.append({"bath": c.bath, "matrix": _matrix_to_dict(c.matrix)})
            else:
                cs.append({"bath": c.bath, "two_qubit": {"qubit": int(c.qubit), "kx": float(c.kx),
                                                         "kz": float(c.kz)}})
        out["couplings"] = cs
        if self.h0_matrix is not None:
            out["reference"] = {"h0": _matrix_to_dict(self.h0_matrix, "cm^-1")}
        else:
            out["reference"] = {"level_tolerance": _qty(self.level_tolerance or 0.0, "energy")}
        if self.initial_matrix is not None:
            out["initial_state"] = {"matrix": _matrix_to_dict(self.initial_matrix)}
        else:
            out["initial_state"] = {"basis_index": int(self.initial_index)}
        grid = {"t_max": _qty(self.t_max_fs, "time")}
        if self.dt_fs is not None:
            grid["dt"] = _qty(self.dt_fs, "time")
        out["grid"] = grid
        out["methods"] = list(self.methods)
        out["heom"] = {"depth": int(self.heom_depth)}
        obs = {}
        if self.coherence is not None:
            obs["coherence"] = [int(k) for k in self.coherence]
        if self.fit_window_fs is not None:
            obs["fit_window"] = [_qty(t, "time") for t in self.fit_window_fs]
        if obs:
            out["observables"] = obs
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        if not isinstance(d, dict):
            raise ScenarioError("scenario must be a mapping")
        top = {"name", "description", "system", "kB", "baths", "couplings", "reference",
               "initial_state", "grid", "methods", "heom", "observables"}
        _check_keys(d, top, (), required={"name", "system", "baths", "couplings"})
        kw: dict = {"name": str(d["name"]), "description": str(d.get("description", ""))}

        sysd = d["system"]
        if not isinstance(sysd, dict) or len(sysd) != 1:
            raise ScenarioError("system needs exactly one of 'two_qubit' or 'matrix'", ("system",))
        _check_keys(sysd, {"two_qubit", "matrix"}, ("system",))
        if "two_qubit" in sysd:
            p = ("system", "two_qubit")
            tq = sysd["two_qubit"]
            if not isinstance(tq, dict):
                raise ScenarioError("two_qubit must be a mapping", p)
            _check_keys(tq, {"E1", "E2", "J"}, p, required={"E1", "E2", "J"})
            kw["two_qubit"] = tuple(parse_quantity(tq[k], "energy", p + (k,)) for k in ("E1", "E2", "J"))
        else:
            kw["hamiltonian_matrix"] = _matrix_from_dict(sysd["matrix"], ("system", "matrix"), "energy")

        if "kB" in d:
            kw["kB"] = parse_quantity(d["kB"], "kB", ("kB",))

        if not isinstance(d["baths"], list) or not d["baths"]:
            raise ScenarioError("baths must be a non-empty list", ("baths",))
        baths = []
        for i, b in enumerate(d["baths"]):
            p = ("baths", i)
            if not isinstance(b, dict):
                raise ScenarioError("bath entry must be a mapping", p)
            _check_keys(b, {"label", "model", "eta", "cutoff", "temperature", "gamma"}, p,
                        required={"label", "eta", "cutoff", "temperature"})
            if b.get("model", "drude_lorentz") != "drude_lorentz":
                raise ScenarioError(f"unsupported bath model {b['model']!r}", p + ("model",))
            cutoff_raw = b["cutoff"]
            if isinstance(cutoff_raw, str) and cutoff_raw.strip().endswith(("fs", "ps")):
                cutoff = rate_from_lifetime_fs(parse_quantity(cutoff_raw, "time", p + ("cutoff",)))
            else:
                cutoff = parse_quantity(cutoff_raw, "energy", p + ("cutoff",))
            baths.append(BathSpec(label=str(b["label"]), eta=parse_quantity(b["eta"], "energy", p + ("eta",)),
                                  cutoff=cutoff,
                                  temperature=parse_quantity(b["temperature"], "temperature", p + ("temperature",)),
                                  gamma=str(b.get("gamma", "high_temp"))))
        kw["baths"] = baths

        if not isinstance(d["couplings"], list) or not d["couplings"]:
            raise ScenarioError("couplings must be a non-empty list", ("couplings",))
        cps = []
        for i, c in enumerate(d["couplings"]):
            p = ("couplings", i)
            if not isinstance(c, dict):
                raise ScenarioError("coupling entry must be a mapping", p)
            _check_keys(c, {"bath", "two_qubit", "matrix"}, p, required={"bath"})
            if ("two_qubit" in c) == ("matrix" in c):
                raise ScenarioError("coupling needs exactly one of 'two_qubit' or 'matrix'", p)
            if "matrix" in c:
                cps.append(CouplingSpec(bath=str(c["bath"]), matrix=_matrix_from_dict(c["matrix"], p + ("matrix",))))
            else:
                tq = c["two_qubit"]
                if not isinstance(tq, dict):
                    raise ScenarioError("two_qubit must be a mapping", p + ("two_qubit",))
                _check_keys(tq, {"qubit", "kx", "kz"}, p + ("two_qubit",), required={"qubit"})
                try:
                    cps.append(CouplingSpec(bath=str(c["bath"]), qubit=int(tq["qubit"]),
                                            kx=float(tq.get("kx", 0.0)), kz=float(tq.get("kz", 0.0))))
                except (TypeError, ValueError) as exc:
                    raise ScenarioError(f"malformed two_qubit coupling: {exc}", p + ("two_qubit",)) from None
        kw["couplings"] = cps

        ref = d.get("reference", {"level_tolerance": "0 cm^-1"})
        if not isinstance(ref, dict) or len(ref) != 1:
            raise ScenarioError("reference needs exactly one of 'level_tolerance' or 'h0'", ("reference",))
        _check_keys(ref, {"level_tolerance", "h0"}, ("reference",))
        if "h0" in ref:
            if ref["h0"] == "zero":
                kw["h0_matrix"] = np.zeros((0, 0))  # sized below
            else:
                kw["h0_matrix"] = _matrix_from_dict(ref["h0"], ("reference", "h0"), "energy")
        else:
            kw["level_tolerance"] = parse_quantity(ref["level_tolerance"], "energy", ("reference", "level_tolerance"))

        init = d.get("initial_state", {"basis_index": 0})
        if not isinstance(init, dict) or len(init) != 1:
            raise ScenarioError("initial_state needs exactly one of 'basis_index' or 'matrix'", ("initial_state",))
        _check_keys(init, {"basis_index", "matrix"}, ("initial_state",))
        if "matrix" in init:
            kw["initial_matrix"] = _matrix_from_dict(init["matrix"], ("initial_state", "matrix"))
            kw["initial_index"] = None
        else:
            kw["initial_index"] = int(init["basis_index"])

        grid = d.get("grid", {})
        _check_keys(grid, {"t_max", "dt"}, ("grid",))
        if "t_max" in grid:
            kw["t_max_fs"] = parse_quantity(grid["t_max"], "time", ("grid", "t_max"))
        if "dt" in grid:
            kw["dt_fs"] = parse_quantity(grid["dt"], "time", ("grid", "dt"))

        if "methods" in d:
            if not isinstance(d["methods"], list):
                raise ScenarioError("methods must be a list", ("methods",))
            kw["methods"] = [str(m) for m in d["methods"]]
        heom = d.get("heom", {})
        _check_keys(heom, {"depth"}, ("heom",))
        if "depth" in heom:
            kw["heom_depth"] = int(heom["depth"])
        obs = d.get("observables", {})
        _check_keys(obs, {"coherence", "fit_window"}, ("observables",))
        if "coherence" in obs:
            kw["coherence"] = tuple(int(k) for k in obs["coherence"])
        if "fit_window" in obs:
            kw["fit_window_fs"] = tuple(parse_quantity(t, "time", ("observables", "fit_window", i))
                                        for i, t in enumerate(obs["fit_window"]))
        spec = cls(**kw)
        if spec.h0_matrix is not None and spec.h0_matrix.size == 0:
            spec.h0_matrix = np.zeros((spec.dim, spec.dim), complex)
        return spec.validate()

    def with_overrides(self, **changes) -> "ScenarioSpec":
        return replace(self, **changes).validate()


# --- operators ---------------------------------------------------------------

def _on_qubit(op, qubit):
    eye = np.eye(2)
    return np.kron(op, eye) if qubit == 1 else np.kron(eye, op)


def two_qubit_hamiltonian(E1: float, E2: float, J: float) -> np.ndarray:
    """``E1 sz1 + E2 sz2 + J sx1 sx2`` in the basis |q1 q2> (index 2*q1 + q2)."""
    return (E1 * _on_qubit(SIGMA_Z, 1) + E2 * _on_qubit(SIGMA_Z, 2)
            + J * np.kron(SIGMA_X, SIGMA_X))


def two_qubit_coupling(qubit: int, kx: float, kz: float) -> np.ndarray:
    """``kx sx^(q) + kz sz^(q)``; ``qubit = 0`` means the sum over both qubits."""
    if qubit == 0:
        return two_qubit_coupling(1, kx, kz) + two_qubit_coupling(2, kx, kz)
    return kx * _on_qubit(SIGMA_X, qubit) + kz * _on_qubit(SIGMA_Z, qubit)


# --- built-ins ---------------------------------------------------------------

def builtin_two_qubit_three_bath(temperatures=(350.0, 300.0, 400.0), gamma: str = "high_temp",
                                 E1: float = 50.0, E2: float = 50.0, J: float = 2.0) -> ScenarioSpec:
    """Two qubits with a common bath (index 0) and local dephasing baths 1 and 2."""
    cutoff = rate_from_lifetime_fs(100.0)
    baths = [BathSpec(f"bath{j}", 1.0, cutoff, float(t), gamma) for j, t in enumerate(temperatures)]
    couplings = [CouplingSpec("bath0", qubit=0, kx=1.0, kz=0.0),
                 CouplingSpec("bath1", qubit=1, kx=0.0, kz=1.0),
                 CouplingSpec("bath2", qubit=2, kx=0.0, kz=1.0)]
    return ScenarioSpec(
        name="paper-fig2",
        description="two weakly interacting qubits, three Drude-Lorentz baths",
        baths=baths, couplings=couplings, two_qubit=(E1, E2, J),
        level_tolerance=10.0, initial_index=1,  # |01>
        t_max_fs=2000.0, dt_fs=2.0, methods=["unified", "davies", "redfield", "heom"], heom_depth=10,
        coherence=(1, 2),
    ).validate()


def builtin_dephasing_dimer(J: float = 2.0, temperature: float = 300.0, gamma: str = "high_temp",
                            full: bool = False, E: float = 50.0) -> ScenarioSpec:
    """Dimer with two local dephasing baths.

    The default is the two-dimensional model on span{|01>, |10>}; ``full=True``
    gives the four-dimensional two-qubit system with the same baths.
    """
    cutoff = rate_from_lifetime_fs(100.0)
    baths = [BathSpec(f"bath{j}", 1.0, cutoff, temperature, gamma) for j in (1, 2)]
    common = dict(
        name="paper-fig3",
        description="dephasing dimer, reference Hamiltonian zero on the single-excitation subspace",
        baths=baths, t_max_fs=5000.0, dt_fs=2.0,
        methods=["unified", "unified_simplified", "redfield", "davies", "heom"],
        heom_depth=10, fit_window_fs=(500.0, 2000.0),
    )
    if full:
        couplings = [CouplingSpec("bath1", qubit=1, kz=1.0), CouplingSpec("bath2", qubit=2, kz=1.0)]
        return ScenarioSpec(couplings=couplings, two_qubit=(E, E, J), level_tolerance=10.0,
                            initial_index=1, coherence=(2, 1), **common).validate()
    z = np.diag([1.0, -1.0]).astype(complex)
    couplings = [CouplingSpec("bath1", matrix=-z), CouplingSpec("bath2", matrix=z)]
    h = J * np.array([[0, 1], [1, 0]], dtype=complex)
    return ScenarioSpec(couplings=couplings, hamiltonian_matrix=h, h0_matrix=np.zeros((2, 2), complex),
                        initial_index=0, coherence=(1, 0), **common).validate()


BUILTINS = {
    "paper-fig2": builtin_two_qubit_three_bath,
    "paper-fig3": builtin_dephasing_dimer,
}


def builtin(name: str) -> ScenarioSpec:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ScenarioError(f"unknown built-in scenario {name!r}; available: {sorted(BUILTINS)}") from None


# --- dimer closed forms ---------------------------------------------------------

def dimer_coefficients(baths, J: float) -> dict:
    """Summed dimer coefficients ``gamma(0)``, ``S(2J)``, ``S(-2J)`` over the dephasing baths."""
    gamma0 = sum(float(b.rate(0.0)) for b in baths)
    s_plus = sum(float(b.lamb(2 * J)) for b in baths)
    s_minus = sum(float(b.lamb(-2 * J)) for b in baths)
    return {"gamma0": gamma0, "S_plus": s_plus, "S_minus": s_minus, "delta_S": s_plus - s_minus}


def dephasing_analytic_coherences(J: float, S_plus: float, S_minus: float, gamma0: float, grid,
                                  x0: complex = 0.5, y0: complex = 0.5):
    """Coherences ``x = <+|rho|->`` and ``y = <-|rho|+>`` of the dimer.

        x' = -i [2J + S(2J) - S(-2J)] x + gamma0 (y - x)
        y' = +i [2J + S(2J) - S(-2J)] y - gamma0 (y - x)

    solved with the exact 2x2 propagator on ``grid`` (rates in cm^-1, times in fs).
    """
    omega = 2 * J + S_plus - S_minus
    m = np.array([[-1j * omega - gamma0, gamma0],
                  [gamma0, 1j * omega - gamma0]]) * CM_TO_RAD_PER_FS
    step = matrix_exp(m * grid.dt)
    out = np.empty((grid.steps + 1, 2), complex)
    out[0] = (x0, y0)
    for n in range(grid.steps):
        out[n + 1] = step @ out[n]
    return out[:, 0], out[:, 1]


def slowest_decay_rate(gamma0: float, J: float, delta_S: float) -> float:
    """``-gamma0 + sqrt(gamma0^2 - (2J + delta_S)^2)`` (real part), in cm^-1."""
    if not gamma0 > 0:
        raise ValueError("gamma0 must be positive")
    root = np.sqrt(complex(gamma0**2 - (2 * J + delta_S) ** 2))
    return float(-gamma0 + root.real)

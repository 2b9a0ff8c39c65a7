"""Parameter types and built-in presets for microwave-to-optics entanglement links.

All times are microseconds (field names carry the unit), efficiencies and
probabilities are unitless in [0, 1]. Types are frozen dataclasses: values
are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import PresetNotFoundError


class PhotonBasis(Enum):
    ONE_PHOTON = "one_photon"
    TWO_PHOTON = "two_photon"


class PumpMode(Enum):
    UPCONVERSION = "upconversion"
    TMS = "tms"


class MemoryKind(Enum):
    SPIN_CAVITY = "spin_cavity"
    CATCH_RELEASE = "catch_release"


class FidelityModel(Enum):
    """How protocol and thermal infidelity combine into the heralded fidelity.

    THERMAL_HALF: thermal false heralds deliver a fidelity-1/2 state, so only
    half of i_th is lost (F = 1 - i_prot - i_th/2). Reproduces the worked
    examples and is the default. LINEAR_SUM subtracts both in full.
    """

    THERMAL_HALF = "thermal_half"
    LINEAR_SUM = "linear_sum"


@dataclass(frozen=True)
class TransducerParams:
    """One transducer channel: efficiencies, added noise and attempt timing."""

    name: str
    eta_mw: float  # microwave loading/heralding efficiency
    p_mo: float  # microwave<->optical conversion probability per attempt
    eta_det: float  # optical detection chain efficiency
    n_th: float  # added thermal photons per attempt
    t_rep_us: float  # attempt period
    bandwidth_mhz: float | None = None  # informational
    eta_per_uw: float | None = None  # informational, % per uW of pump

    @property
    def eta_tot(self) -> float:
        """Total qubit-to-detector efficiency eta_mw * p_mo * eta_det."""
        return self.eta_mw * self.p_mo * self.eta_det


@dataclass(frozen=True)
class StorageQubitParams:
    """Storage qubit holding the heralded state until delivery.

    t_coh_us defaults to t2_us (dephasing-dominated storage). Override it to
    model a different effective decay, e.g. t2/2 for two-sided accounting.
    """

    t1_us: float
    t2_us: float
    t_coh_us: float | None = None

    def __post_init__(self):
        if self.t_coh_us is None:
            object.__setattr__(self, "t_coh_us", self.t2_us)


@dataclass(frozen=True)
class MemoryParams:
    """Optical memory used to boost the heralding probability."""

    kind: MemoryKind
    eta_mem: float  # store-and-reemit efficiency
    lifetime_us: float  # upper bound on t_del


@dataclass(frozen=True)
class ProtocolSpec:
    """Which heralding protocol runs on the link.

    alpha is the qubit emission probability, required exactly for the
    one-photon upconversion protocol. p_mo_override deliberately lowers the
    transducer's scattering probability (used to trade rate for protocol
    fidelity); it feeds every formula that involves p_mo.
    """

    basis: PhotonBasis
    pump: PumpMode
    alpha: float | None = None
    p_mo_override: float | None = None

    def effective_p_mo(self, transducer: TransducerParams) -> float:
        if self.p_mo_override is not None:
            return self.p_mo_override
        return transducer.p_mo


@dataclass(frozen=True)
class DeliveryPolicy:
    """On-demand delivery settings for one link."""

    t_del_us: float  # fixed delivery time / timeout
    n_parallel: int = 1  # parallel transducer channels racing for a herald
    distill_rounds: int = 0
    fidelity_model: FidelityModel = FidelityModel.THERMAL_HALF


@dataclass(frozen=True)
class LinkConfig:
    """Full description of one inter-module entanglement link."""

    transducer: TransducerParams
    qubit: StorageQubitParams
    protocol: ProtocolSpec
    policy: DeliveryPolicy
    memory: MemoryParams | None = None


@dataclass(frozen=True)
class LinkMetrics:
    """Derived link analytics at the policy's delivery time."""

    p_her: float  # herald probability per attempt, single channel
    i_prot: float  # protocol infidelity
    i_th: float  # thermal noise infidelity
    f_her: float  # heralded-state fidelity
    eta_link: float  # link capacity t_coh * p_her / t_rep
    p_success: float  # probability of any herald within t_del
    f_del: float  # delivered fidelity at t_del

    def to_dict(self) -> dict:
        return {
            "p_her": self.p_her,
            "i_prot": self.i_prot,
            "i_th": self.i_th,
            "f_her": self.f_her,
            "eta_link": self.eta_link,
            "p_success": self.p_success,
            "f_del": self.f_del,
        }


@dataclass(frozen=True)
class DeviceSummary:
    """Informational survey row for a demonstrated transducer device.

    These lack the eta_mw/p_mo/eta_det split, so they cannot drive the
    protocol formulas; they exist for reference output only.
    """

    name: str
    technology: str  # EMO, EO or REI
    eta_tot: float
    t_rep_us: float
    bandwidth_mhz: float
    n_add: float  # input-referred added noise
    eta_per_uw: float | None = None
    note: str | None = None


# Projected parameter sets used by the worked examples. Set 1 is within
# current experimental reach; set 2 assumes modest transducer improvements.
TRANSDUCER_PRESETS = {
    "transducer1": TransducerParams(
        name="transducer1", eta_mw=0.8, p_mo=0.01, eta_det=0.5, n_th=0.1, t_rep_us=1.0
    ),
    "transducer2": TransducerParams(
        name="transducer2", eta_mw=0.95, p_mo=0.1, eta_det=0.5, n_th=0.01, t_rep_us=1.0
    ),
}

QUBIT_PRESETS = {
    "qubit1": StorageQubitParams(t1_us=500.0, t2_us=200.0),
    "qubit2": StorageQubitParams(t1_us=1e5, t2_us=2500.0),
}

# Published device survey (informational presets; see DeviceSummary).
DEVICE_PRESETS = {
    "weaver2024": DeviceSummary(
        "weaver2024", "EMO", 3e-6, 10.0, 15.0, 6.0, 0.05, note="1 %/uW in CW operation"
    ),
    "jiang2023": DeviceSummary("jiang2023", "EMO", 1e-4, 5.9, 1.5, 2.0),
    "brubaker2022": DeviceSummary(
        "brubaker2022", "EMO", 0.38, 5000.0, 2.2e-4, 3.2, 16.0,
        note="repetition time limited by bandwidth",
    ),
    "meesala2024": DeviceSummary(
        "meesala2024", "EMO", 6e-3, 20.0, 5.5, 0.14, note="eta_tot is an upper bound"
    ),
    "zhao2024": DeviceSummary(
        "zhao2024", "EMO", 8e-3, 11.2, 8.9e-2, 0.94, 5.0,
        note="eta_tot upper bound; repetition time limited by bandwidth",
    ),
    "warner2025": DeviceSummary(
        "warner2025", "EO", 1e-3, 1.0, 30.0, 0.12, 0.05,
        note="eta_tot upper bound; N_add microwave-output-referred (12 optical-input-referred)",
    ),
    "shen2024": DeviceSummary(
        "shen2024", "EO", 1e-4, 6e-5, 17000.0, 23.0, 1e-7,
        note="eta_tot well below 1e-4; repetition time limited by bandwidth",
    ),
    "xie2025": DeviceSummary("xie2025", "REI", 3.4e-5, 10000.0, 0.5, 1.24, 1e-5),
}


def preset(name: str):
    """Look up a built-in preset by name.

    Returns TransducerParams or StorageQubitParams for the projected
    parameter sets, or a DeviceSummary for the published device rows.
    Raises PresetNotFoundError for unknown names.
    """
    for table in (TRANSDUCER_PRESETS, QUBIT_PRESETS, DEVICE_PRESETS):
        if name in table:
            return table[name]
    valid = list(TRANSDUCER_PRESETS) + list(QUBIT_PRESETS) + list(DEVICE_PRESETS)
    raise PresetNotFoundError(name, valid)


def _check_range(violations, prefix, value, name, lo, hi):
    try:
        ok = lo <= value <= hi
    except TypeError:
        violations.append(f"{prefix}{name} is not a number")
        return
    if not ok:
        violations.append(f"{prefix}{name} out of [{lo:g}, {hi:g}]")


def _require(violations, message, predicate):
    """Record `message` unless predicate() is true; TypeError counts as false."""
    try:
        ok = bool(predicate())
    except TypeError:
        ok = False
    if not ok:
        violations.append(message)


def validate(config: LinkConfig) -> list[str]:
    """Check every invariant of a LinkConfig; returns a list of violations.

    Total: never raises for any finite input. An empty list means the
    config is valid.
    """
    v: list[str] = []
    t = config.transducer
    _check_range(v, "transducer.", t.eta_mw, "eta_mw", 0.0, 1.0)
    _check_range(v, "transducer.", t.p_mo, "p_mo", 0.0, 1.0)
    _check_range(v, "transducer.", t.eta_det, "eta_det", 0.0, 1.0)
    _require(v, "transducer.n_th must be >= 0", lambda: t.n_th >= 0)
    _require(v, "transducer.t_rep_us must be > 0", lambda: t.t_rep_us > 0)

    q = config.qubit
    _require(v, "qubit.t1_us must be > 0", lambda: q.t1_us > 0)
    _require(v, "qubit.t2_us must be > 0", lambda: q.t2_us > 0)
    if q.t_coh_us is not None:
        _require(v, "qubit.t_coh_us must be > 0", lambda: q.t_coh_us > 0)

    p = config.protocol
    one_photon_upconv = (
        p.basis is PhotonBasis.ONE_PHOTON and p.pump is PumpMode.UPCONVERSION
    )
    if one_photon_upconv:
        if p.alpha is None:
            v.append("protocol.alpha required for the one-photon upconversion protocol")
        else:
            _require(
                v, "protocol.alpha out of (0, 1]", lambda: 0.0 < p.alpha <= 1.0
            )
    elif p.alpha is not None:
        v.append("protocol.alpha only applies to the one-photon upconversion protocol")
    if p.p_mo_override is not None:
        _require(
            v,
            "protocol.p_mo_override out of (0, transducer.p_mo]",
            lambda: 0.0 < p.p_mo_override <= t.p_mo,
        )

    pol = config.policy
    _require(
        v,
        "policy.t_del_us must be >= transducer.t_rep_us",
        lambda: pol.t_del_us >= t.t_rep_us,
    )
    _require(v, "policy.n_parallel must be >= 1", lambda: pol.n_parallel >= 1)
    _require(
        v, "policy.distill_rounds out of [0, 10]",
        lambda: 0 <= pol.distill_rounds <= 10,
    )

    m = config.memory
    if m is not None:
        _check_range(v, "memory.", m.eta_mem, "eta_mem", 0.0, 1.0)
        _require(v, "memory.lifetime_us must be > 0", lambda: m.lifetime_us > 0)
        compatible = {
            MemoryKind.SPIN_CAVITY: (PhotonBasis.TWO_PHOTON, PumpMode.UPCONVERSION),
            MemoryKind.CATCH_RELEASE: (PhotonBasis.TWO_PHOTON, PumpMode.TMS),
        }
        if (p.basis, p.pump) != compatible[m.kind]:
            v.append(
                f"memory.kind {m.kind.value} incompatible with protocol "
                f"{p.basis.value}/{p.pump.value}"
            )
        try:
            exceeds = m.lifetime_us > 0 and pol.t_del_us > m.lifetime_us
        except TypeError:
            exceeds = False
        if exceeds:
            v.append("policy.t_del_us exceeds memory.lifetime_us")

    # NaN poisons every comparison above into silence; catch it explicitly.
    numeric = {
        "transducer.eta_mw": t.eta_mw,
        "transducer.p_mo": t.p_mo,
        "transducer.eta_det": t.eta_det,
        "transducer.n_th": t.n_th,
        "transducer.t_rep_us": t.t_rep_us,
        "qubit.t1_us": q.t1_us,
        "qubit.t2_us": q.t2_us,
        "policy.t_del_us": pol.t_del_us,
    }
    for field_name, value in numeric.items():
        try:
            if math.isnan(value):
                v.append(f"{field_name} is NaN")
        except TypeError:
            v.append(f"{field_name} is not a number")
    return v

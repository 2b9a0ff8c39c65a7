"""Parameter types, presets and the validate() totality contract."""

import math

import numpy as np
import pytest

from translink import (
    DeliveryPolicy,
    DeviceSummary,
    LinkConfig,
    MemoryKind,
    MemoryParams,
    PhotonBasis,
    PresetNotFoundError,
    ProtocolSpec,
    PumpMode,
    QUBIT_PRESETS,
    StorageQubitParams,
    TRANSDUCER_PRESETS,
    TransducerParams,
    preset,
    validate,
)

# Published eta_tot values carry table rounding; 5% covers the worst row.
ETA_TOT_TABLE = {"transducer1": 4e-3, "transducer2": 5e-2}
ETA_TOT_RTOL = 0.05 + 1e-12


def _link(transducer="transducer1", qubit="qubit1", protocol=None, policy=None,
          memory=None):
    return LinkConfig(
        transducer=preset(transducer),
        qubit=preset(qubit),
        protocol=protocol or ProtocolSpec(PhotonBasis.ONE_PHOTON, PumpMode.TMS),
        policy=policy or DeliveryPolicy(t_del_us=88.0),
        memory=memory,
    )


def test_preset_transducer1_exact_row():
    t = preset("transducer1")
    assert (t.eta_mw, t.p_mo, t.eta_det) == (0.8, 0.01, 0.5)
    assert t.n_th == 0.1
    assert t.t_rep_us == 1.0


def test_preset_transducer2_exact_row():
    t = preset("transducer2")
    assert (t.eta_mw, t.p_mo, t.eta_det) == (0.95, 0.1, 0.5)
    assert t.n_th == 0.01
    assert t.t_rep_us == 1.0


def test_preset_qubits():
    q1 = preset("qubit1")
    assert (q1.t2_us, q1.t1_us) == (200.0, 500.0)
    assert q1.t_coh_us == 200.0  # defaults to T2
    q2 = preset("qubit2")
    assert (q2.t2_us, q2.t1_us) == (2500.0, 1e5)
    assert q2.t_coh_us == 2500.0


def test_eta_tot_matches_published_within_rounding():
    for name, published in ETA_TOT_TABLE.items():
        t = preset(name)
        assert t.eta_tot == t.eta_mw * t.p_mo * t.eta_det
        assert abs(t.eta_tot - published) <= ETA_TOT_RTOL * published


def test_unknown_preset_lists_valid_names():
    with pytest.raises(PresetNotFoundError) as err:
        preset("transducerX")
    assert "transducer1" in str(err.value)
    assert "qubit2" in str(err.value)


def test_device_presets_are_informational():
    dev = preset("brubaker2022")
    assert isinstance(dev, DeviceSummary)
    assert dev.eta_tot == 0.38
    assert dev.t_rep_us == 5000.0


def test_t_coh_override_respected():
    q = StorageQubitParams(t1_us=500.0, t2_us=200.0, t_coh_us=100.0)
    assert q.t_coh_us == 100.0


def test_validate_accepts_preset_combination():
    assert validate(_link()) == []


def test_validate_flags_out_of_range_efficiency():
    bad = TransducerParams(
        name="bad", eta_mw=1.2, p_mo=0.01, eta_det=0.5, n_th=0.1, t_rep_us=1.0
    )
    cfg = LinkConfig(
        transducer=bad,
        qubit=preset("qubit1"),
        protocol=ProtocolSpec(PhotonBasis.ONE_PHOTON, PumpMode.TMS),
        policy=DeliveryPolicy(t_del_us=88.0),
    )
    assert any("eta_mw out of [0, 1]" in v for v in validate(cfg))


def test_validate_alpha_exactly_for_one_photon_upconversion():
    missing = _link(protocol=ProtocolSpec(PhotonBasis.ONE_PHOTON, PumpMode.UPCONVERSION))
    assert any("alpha required" in v for v in validate(missing))
    spurious = _link(
        protocol=ProtocolSpec(PhotonBasis.ONE_PHOTON, PumpMode.TMS, alpha=0.1)
    )
    assert any("alpha only applies" in v for v in validate(spurious))
    ok = _link(
        protocol=ProtocolSpec(PhotonBasis.ONE_PHOTON, PumpMode.UPCONVERSION, alpha=0.1)
    )
    assert validate(ok) == []


def test_validate_p_mo_override_bounds():
    too_big = _link(
        protocol=ProtocolSpec(PhotonBasis.ONE_PHOTON, PumpMode.TMS, p_mo_override=0.5)
    )
    assert any("p_mo_override" in v for v in validate(too_big))


def test_validate_memory_compatibility():
    mem = MemoryParams(kind=MemoryKind.SPIN_CAVITY, eta_mem=0.9, lifetime_us=500.0)
    wrong = _link(memory=mem)  # one-photon protocol
    assert any("incompatible" in v for v in validate(wrong))
    right = _link(
        protocol=ProtocolSpec(PhotonBasis.TWO_PHOTON, PumpMode.UPCONVERSION),
        memory=mem,
    )
    assert validate(right) == []


def test_validate_t_del_against_memory_lifetime():
    mem = MemoryParams(kind=MemoryKind.SPIN_CAVITY, eta_mem=0.9, lifetime_us=50.0)
    cfg = _link(
        protocol=ProtocolSpec(PhotonBasis.TWO_PHOTON, PumpMode.UPCONVERSION),
        policy=DeliveryPolicy(t_del_us=88.0),
        memory=mem,
    )
    assert any("exceeds memory.lifetime_us" in v for v in validate(cfg))


def test_validate_t_del_at_least_one_attempt():
    cfg = _link(policy=DeliveryPolicy(t_del_us=0.5))
    assert any("t_del_us must be >=" in v for v in validate(cfg))


def test_validate_distill_rounds_cap():
    cfg = _link(policy=DeliveryPolicy(t_del_us=88.0, distill_rounds=11))
    assert any("distill_rounds" in v for v in validate(cfg))


def test_validate_is_total_over_random_garbage():
    """validate never raises, whatever finite or non-finite junk it gets."""
    rng = np.random.default_rng(2024)
    specials = [0.0, -1.0, 1.5, math.nan, math.inf, -math.inf, None, "x"]
    for _ in range(300):
        pick = lambda: (
            specials[rng.integers(len(specials))]
            if rng.random() < 0.4
            else float(rng.normal())
        )
        cfg = LinkConfig(
            transducer=TransducerParams(
                name="junk", eta_mw=pick(), p_mo=pick(), eta_det=pick(),
                n_th=pick(), t_rep_us=pick(),
            ),
            qubit=StorageQubitParams(t1_us=pick(), t2_us=pick() or 1.0),
            protocol=ProtocolSpec(
                PhotonBasis.ONE_PHOTON, PumpMode.TMS,
                p_mo_override=pick() if rng.random() < 0.5 else None,
            ),
            policy=DeliveryPolicy(t_del_us=pick(), n_parallel=1),
        )
        violations = validate(cfg)
        assert isinstance(violations, list)


def test_presets_are_frozen():
    t = preset("transducer1")
    with pytest.raises(Exception):
        t.eta_mw = 0.9
    assert TRANSDUCER_PRESETS["transducer1"].eta_mw == 0.8
    assert QUBIT_PRESETS["qubit1"].t2_us == 200.0

import math

import numpy as np
import pytest

from modeflow.channels import (
    KrausChannel,
    StochasticMatrix,
    channel_from_dict,
    channel_to_dict,
    check_cptp,
    check_gibbs_preserving,
    check_symmetric,
    classify,
    compose,
    convex_combine,
    dephasing_channel,
    dump_channel,
    identity_channel,
    induced_stochastic,
    load_channel,
    merge_channel,
    qubit_extremal_symmetric_channel,
    shift_channel,
    unitary_channel,
)
from modeflow.errors import DomainError, FormatError
from modeflow.qstate import DensityMatrix, HamiltonianSpec, gibbs_state

QUBIT = HamiltonianSpec((0.0, 1.0))
QUTRIT = HamiltonianSpec.equidistant(3)
HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def _ket(i, d=3):
    v = np.zeros(d)
    v[i] = 1.0
    return v


def test_identity_channel_is_identity(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = A @ A.conj().T
    rho /= np.trace(rho)
    ch = identity_channel(QUTRIT)
    assert np.allclose(ch(rho), rho)
    assert np.array_equal(induced_stochastic(ch).matrix, np.eye(3))


def test_dephasing_channel():
    beta = 1.1
    psi = np.array([1.0, math.exp(-beta / 2)])
    psi /= np.linalg.norm(psi)
    out = dephasing_channel(QUBIT)(np.outer(psi, psi))
    assert np.allclose(out, gibbs_state(QUBIT, beta).data)
    assert np.allclose(induced_stochastic(dephasing_channel(QUTRIT)).matrix, np.eye(3))


def test_extremal_symmetric_qubit_map():
    ch = qubit_extremal_symmetric_channel(0.5, 0.75)
    out = ch(DensityMatrix.qubit(0.5, 0.4))
    assert out[0, 1] == pytest.approx(0.4 * math.sqrt(0.5), abs=1e-15)
    assert out[0, 0].real == pytest.approx(0.75, abs=1e-15)
    assert check_symmetric(ch)[0]


def test_check_symmetric_examples():
    M1 = np.outer(_ket(1), _ket(0)) + np.outer(_ket(2), _ket(1))
    M2 = np.outer(_ket(2), _ket(2))
    ok, v = check_symmetric(KrausChannel([M1, M2], QUTRIT))
    assert ok and v == 0.0
    assert not check_symmetric(unitary_channel(HADAMARD, QUBIT))[0]
    for x in (0.0, 0.3, 0.8, 1.0):
        assert check_symmetric(merge_channel(x))[0]


def test_gibbs_preserving_examples():
    for beta in (0.0, 0.7, math.inf):
        assert check_gibbs_preserving(identity_channel(QUBIT), beta)[0]
    damp = KrausChannel([np.diag([1.0, 0.0]), np.array([[0.0, 1.0], [0.0, 0.0]])], QUBIT)
    assert check_symmetric(damp)[0]
    assert not check_gibbs_preserving(damp, 1.0)[0]
    assert check_gibbs_preserving(damp, math.inf)[0]


def test_shift_down_is_thermal():
    ch = shift_channel("down", 0.5, 1.0, 30)
    assert check_symmetric(ch)[0]
    assert check_gibbs_preserving(ch, 0.5)[0]
    L = induced_stochastic(ch).matrix
    assert L[1, 2] == pytest.approx(1.0, abs=1e-5)
    assert L[0, 1] == pytest.approx(1.0, abs=1e-5)


def test_shift_down_and_up_transfer():
    c = 0.3
    X = np.zeros((3, 3), dtype=complex)
    X[2, 1] = c
    assert abs(shift_channel("down", 0.5, 1.0, 40)(X)[1, 0]) == pytest.approx(c, rel=1e-6)
    Y = np.zeros((3, 3), dtype=complex)
    Y[1, 0] = c
    got = abs(shift_channel("up", 0.5, 1.0, 40)(Y)[2, 1])
    assert got == pytest.approx(c * math.exp(-0.5), rel=1e-6)
    assert abs(shift_channel("up", 40.0, 1.0, 10)(Y)[2, 1]) < 1e-15


def test_shift_channel_zero_temperature_exact():
    X = np.zeros((3, 3), dtype=complex)
    X[2, 1] = 1.0
    assert abs(shift_channel("down", math.inf, 1.0, 3)(X)[1, 0]) == pytest.approx(1.0, abs=1e-15)


def test_shift_channel_bad_direction():
    with pytest.raises(DomainError):
        shift_channel("left", 1.0)


def test_merge_channel_outputs():
    a, b = 0.3, 0.4
    X = np.zeros((3, 3), dtype=complex)
    X[1, 0], X[2, 1] = a, b
    assert abs(merge_channel(0.8)(X)[1, 0]) == pytest.approx(0.5, abs=1e-15)
    assert abs(merge_channel(0.0)(X)[1, 0]) == pytest.approx(a, abs=1e-15)
    assert abs(merge_channel(1.0)(X)[1, 0]) == pytest.approx(b, abs=1e-15)
    with pytest.raises(DomainError):
        merge_channel(1.5)


def test_convex_combine():
    rho = DensityMatrix.qubit(0.5, 0.4)
    ch = convex_combine(identity_channel(QUBIT), dephasing_channel(QUBIT), 0.5)
    assert abs(ch(rho)[0, 1]) == pytest.approx(0.2, abs=1e-15)
    one = convex_combine(unitary_channel(HADAMARD, QUBIT), identity_channel(QUBIT), 1.0)
    assert np.allclose(one(rho), HADAMARD @ rho.data @ HADAMARD)


def test_convex_combine_keeps_thermal_class():
    d, u = shift_channel("down", 0.5, 1.0, 20), shift_channel("up", 0.5, 1.0, 20)
    rep = classify(convex_combine(d, u, 2 / 3), [0.5])
    assert rep.is_cptp and rep.is_symmetric and rep.is_gibbs_preserving(0.5)


def test_compose_order():
    X = np.zeros((2, 2))
    X[0, 0] = 1.0
    flip = unitary_channel(np.array([[0, 1], [1, 0]]), QUBIT)
    kill = dephasing_channel(QUBIT)
    out = compose(flip, kill)(X)
    assert np.allclose(out, np.diag([0.0, 1.0]))


def test_cptp_validation():
    with pytest.raises(DomainError):
        KrausChannel([np.eye(2) * 0.5], QUBIT)
    raw = KrausChannel([np.eye(2) * 0.5], QUBIT, validate=False)
    ok, v = check_cptp(raw)
    assert not ok and v == pytest.approx(0.75 * math.sqrt(2))  # Frobenius norm of K^dag K - I


def test_stochastic_matrix_validation():
    with pytest.raises(DomainError):
        StochasticMatrix([[0.5, 0.5], [0.4, 0.5]])
    with pytest.raises(DomainError):
        StochasticMatrix([[1.2, 0.0], [-0.2, 1.0]])


def test_classify_report_dict():
    rep = classify(merge_channel(0.5), [0.0, math.inf])
    d = rep.to_dict()
    assert d["is_cptp"] and d["is_symmetric"]
    assert [g["beta"] for g in d["gibbs_preserving"]] == [0.0, "inf"]


def test_channel_json_roundtrip(tmp_path):
    ch = merge_channel(0.6)
    path = tmp_path / "c.json"
    dump_channel(ch, path)
    back = load_channel(path)
    assert np.array_equal(back.kraus, ch.kraus)
    assert back.h_in == ch.h_in


def test_channel_json_errors():
    with pytest.raises(FormatError):
        channel_from_dict({"energies_in": [0, 1]})
    with pytest.raises(FormatError):
        channel_from_dict({"energies_in": [0, 1], "kraus": [{"re": [[1, 0, 0]]}]})
    with pytest.raises(FormatError):
        channel_from_dict({"energies_in": [0, 1], "kraus": []})
    obj = channel_to_dict(KrausChannel([np.eye(2) * 0.5], QUBIT, validate=False))
    with pytest.raises(DomainError):
        channel_from_dict(obj)
    assert channel_from_dict(obj, validate=False).completeness_error > 0

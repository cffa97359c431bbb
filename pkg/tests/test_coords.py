"""Coordinate transforms: frozen symbolic oracles plus round-trip properties."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from msctrack.coords import (
    SphericalPoint,
    cart_kinematics_to_msc,
    cart_to_spherical,
    msc_to_cart_kinematics,
    rotation_c_to_s,
    rotation_y,
    rotation_z,
    spherical_to_cart,
    wrap_angle,
)
from msctrack.errors import (
    ElevationSingularity,
    MissingInput,
    NonpositiveInverseRange,
    ZeroVector,
)
from msctrack.state import ModelId

# Reference values computed with sympy exact rationals at 30 digits
# (scripts/gen_test_oracles.py) for pos=(-2000, 500, 700),
# vel=(200, 0, 50), acc=(1.5, -2, 0.25).
ORACLE_POS = np.array([-2000.0, 500.0, 700.0])
ORACLE_VEL = np.array([200.0, 0.0, 50.0])
ORACLE_ACC = np.array([1.5, -2.0, 0.25])
ORACLE_PSI = 2.89661399046292908429056090207
ORACLE_THETA = 0.327334969058149966698010382192
ORACLE_R = 2177.15410570772412651495024987
ORACLE_MSC = {
    "omega": -0.0222800604146937308363350106224,
    "thetadot": 0.0504003355824447212903212795748,
    "tau": -0.0770042194092827004219409282700,
    "psi": ORACLE_PSI,
    "theta": ORACLE_THETA,
    "s": 0.000459315212174625343146613976766,
    "sigma_x": 0.000688972818261938014719920965149,
    "sigma_y": -0.000918630424349250686293227953531,
    "sigma_z": 0.000114828803043656335786653494191,
}


def test_cart_to_spherical_against_oracle():
    pt = cart_to_spherical(ORACLE_POS)
    assert_allclose(pt.psi, ORACLE_PSI, rtol=1e-14)
    assert_allclose(pt.theta, ORACLE_THETA, rtol=1e-14)
    assert_allclose(pt.r, ORACLE_R, rtol=1e-14)


def test_cart_kinematics_to_msc_against_oracle():
    state = cart_kinematics_to_msc(ORACLE_POS, ORACLE_VEL, ModelId.NCA, acc=ORACLE_ACC)
    expected = np.array([ORACLE_MSC[k] for k in
                         ("omega", "thetadot", "tau", "psi", "theta", "s",
                          "sigma_x", "sigma_y", "sigma_z")])
    assert_allclose(state.values, expected, rtol=1e-13)


def test_ct_conversion_carries_turn_rate():
    state = cart_kinematics_to_msc(ORACLE_POS, ORACLE_VEL, ModelId.CT, turn_rate=0.22)
    assert state.values.shape == (7,)
    assert state.values[6] == 0.22


@pytest.mark.parametrize("model,kwargs", [
    (ModelId.NCA, {}),
    (ModelId.CT, {}),
])
def test_missing_extras_raise(model, kwargs):
    with pytest.raises(MissingInput):
        cart_kinematics_to_msc(ORACLE_POS, ORACLE_VEL, model, **kwargs)


def test_zero_vector_raises():
    with pytest.raises(ZeroVector):
        cart_to_spherical(np.zeros(3))


def test_pole_raises():
    with pytest.raises(ElevationSingularity):
        cart_to_spherical(np.array([0.0, 0.0, 100.0]))


def test_nonpositive_s_raises():
    state = cart_kinematics_to_msc(ORACLE_POS, ORACLE_VEL, ModelId.NCV)
    state.values[5] = -1e-9
    with pytest.raises(NonpositiveInverseRange):
        msc_to_cart_kinematics(state)


@pytest.mark.parametrize("x,expected", [
    (0.0, 0.0),
    (np.pi, np.pi),
    (-np.pi, np.pi),
    (3 * np.pi, np.pi),
    (np.pi + 1e-3, -np.pi + 1e-3),
    (-np.pi - 1e-3, np.pi - 1e-3),
])
def test_wrap_angle_values(x, expected):
    assert_allclose(wrap_angle(x), expected, atol=1e-12)


@given(st.floats(-50.0, 50.0))
def test_wrap_angle_in_range(x):
    w = wrap_angle(x)
    assert -np.pi < w <= np.pi
    # wrapping only shifts by whole turns
    assert abs((x - w) / (2 * np.pi) - round((x - w) / (2 * np.pi))) < 1e-9


def test_wrap_angle_vectorized():
    xs = np.array([0.0, 4.0, -4.0, 10.0])
    assert wrap_angle(xs).shape == (4,)


finite_angle = st.floats(-1.5, 1.5)


@given(finite_angle, finite_angle)
def test_rotations_orthonormal(a, b):
    for m in (rotation_y(a), rotation_z(b), rotation_c_to_s(b, a)):
        assert_allclose(m @ m.T, np.eye(3), atol=1e-12)
        assert_allclose(np.linalg.det(m), 1.0, atol=1e-12)


def test_rotation_c_to_s_sends_los_to_x_axis():
    # the defining property: the unit line-of-sight maps to e_x
    pt = cart_to_spherical(ORACLE_POS)
    u = ORACLE_POS / np.linalg.norm(ORACLE_POS)
    assert_allclose(rotation_c_to_s(pt.psi, pt.theta) @ u, [1.0, 0.0, 0.0], atol=1e-12)


@given(
    st.floats(-3.0, 3.0),
    st.floats(-1.4, 1.4),
    st.floats(100.0, 1e5),
)
def test_spherical_round_trip(psi, theta, r):
    pos = spherical_to_cart(SphericalPoint(psi=psi, theta=theta, r=r))
    pt = cart_to_spherical(pos)
    assert_allclose(wrap_angle(pt.psi - psi), 0.0, atol=1e-9)
    assert_allclose(pt.theta, theta, atol=1e-9)
    assert_allclose(pt.r, r, rtol=1e-12)


pos_coord = st.floats(-5e4, 5e4)
vel_coord = st.floats(-400.0, 400.0)


@given(st.tuples(pos_coord, pos_coord, pos_coord),
       st.tuples(vel_coord, vel_coord, vel_coord))
def test_msc_round_trip_ncv(pos, vel):
    pos = np.array(pos)
    vel = np.array(vel)
    r = np.linalg.norm(pos)
    rho = np.hypot(pos[0], pos[1])
    if r < 100.0 or rho < 1e-3 * r:
        return  # too close to origin or pole for a meaningful track
    state = cart_kinematics_to_msc(pos, vel, ModelId.NCV)
    p2, v2 = msc_to_cart_kinematics(state)
    assert_allclose(p2, pos, rtol=1e-9, atol=1e-6)
    assert_allclose(v2, vel, rtol=1e-9, atol=1e-6)


def test_msc_round_trip_oracle_state():
    state = cart_kinematics_to_msc(ORACLE_POS, ORACLE_VEL, ModelId.NCV)
    p2, v2 = msc_to_cart_kinematics(state)
    assert_allclose(p2, ORACLE_POS, rtol=1e-12)
    assert_allclose(v2, ORACLE_VEL, rtol=1e-10, atol=1e-10)

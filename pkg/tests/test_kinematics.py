"""Kinematics: forward chain vs. a brute-force matrix oracle, analytic
single-joint cases, finite-difference Jacobian, and IK round trips."""

import json

import numpy as np
import pytest

from armgest.kinematics import (CHAIN_FORMAT, CHAIN_VERSION,
                                ChainFormatError, IKSettings,
                                InvalidSeedError, KinematicChain,
                                MAX_PATH_STEP_M, UnreachableError,
                                densify_path, ee_position, follow_path,
                                forward_kinematics, jacobian,
                                load_default_chain, solve_ik_position)


def _rx(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0],
                     [0, 0, 0, 1.0]])


def _rz(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0],
                     [0, 0, 0, 1.0]])


def _tx(x):
    m = np.eye(4)
    m[0, 3] = x
    return m


def _tz(z):
    m = np.eye(4)
    m[2, 3] = z
    return m


def oracle_fk(chain, q):
    """Independent end-effector position: explicit 4x4 products in the
    modified convention Rx(alpha) Tx(a) Rz(q + offset) Tz(d) per joint."""
    T = _tz(chain.base_height)
    for i in range(chain.n_joints):
        T = (T @ _rx(chain.alpha[i]) @ _tx(chain.a[i])
             @ _rz(q[i] + chain.theta_offset[i]) @ _tz(chain.d[i]))
    return (T @ np.append(chain.tool, 1.0))[:3]


def random_configs(chain, n, seed):
    rng = np.random.default_rng(seed)
    span = chain.upper - chain.lower
    # stay off the exact limits so finite differences remain two-sided
    return chain.lower + span * rng.uniform(0.05, 0.95, size=(n, 7))


def test_fk_matches_brute_force_oracle(chain):
    for q in random_configs(chain, 50, seed=1):
        expected = oracle_fk(chain, q)
        pose = forward_kinematics(chain, q)
        assert np.allclose(pose.position, expected, atol=1e-12)
        assert np.allclose(ee_position(chain, q), expected, atol=1e-12)


def test_single_revolute_joint_traces_a_circle():
    one = KinematicChain(alpha=[0.0], a=[0.0], d=[0.3],
                         theta_offset=[0.0], limits=[(-np.pi, np.pi)],
                         tool=(0.2, 0.0, 0.0))
    for angle in (0.0, np.pi / 2, -np.pi / 3):
        p = ee_position(one, [angle])
        assert np.allclose(p, [0.2 * np.cos(angle), 0.2 * np.sin(angle),
                               0.3], atol=1e-12)


def test_base_height_shifts_z_only(chain):
    q = np.zeros(7)
    raised = KinematicChain(alpha=chain.alpha, a=chain.a, d=chain.d,
                            theta_offset=chain.theta_offset,
                            limits=np.stack([chain.lower, chain.upper],
                                            axis=1),
                            base_height=chain.base_height + 0.25,
                            tool=chain.tool)
    delta = ee_position(raised, q) - ee_position(chain, q)
    assert np.allclose(delta, [0.0, 0.0, 0.25], atol=1e-12)


def test_jacobian_matches_finite_differences(chain):
    h = 1e-7
    worst = 0.0
    for q in random_configs(chain, 100, seed=2):
        J = jacobian(chain, q)[:3]
        fd = np.empty((3, 7))
        for j in range(7):
            dq = np.zeros(7)
            dq[j] = h
            fd[:, j] = (ee_position(chain, q + dq)
                        - ee_position(chain, q - dq)) / (2 * h)
        worst = max(worst, float(np.abs(J - fd).max()))
    assert worst < 1e-5


def test_ik_round_trip_hits_tolerance(chain):
    settings = IKSettings()
    targets = [ee_position(chain, q)
               for q in random_configs(chain, 200, seed=3)]
    seed_q = chain.mid_configuration()
    hits = 0
    for target in targets:
        try:
            q = solve_ik_position(chain, target, seed_q, settings)
        except UnreachableError:
            continue
        assert chain.within_limits(q)
        assert np.linalg.norm(ee_position(chain, q) - target) <= \
            settings.tolerance
        hits += 1
    assert hits / len(targets) >= 0.99


def test_ik_zero_iterations_when_seed_already_solves(chain):
    q0 = chain.mid_configuration()
    target = ee_position(chain, q0)
    q = solve_ik_position(chain, target, q0)
    assert np.array_equal(q, q0)


def test_ik_rejects_unreachable_target(chain):
    with pytest.raises(UnreachableError):
        solve_ik_position(chain, [5.0, 0.0, 0.0], chain.mid_configuration())


def test_ik_rejects_out_of_limit_seed(chain):
    bad = chain.upper + 1.0
    with pytest.raises(InvalidSeedError):
        solve_ik_position(chain, [0.4, 0.0, 0.8], bad)


def test_follow_path_requires_dense_waypoints(chain):
    q0 = chain.mid_configuration()
    p0 = ee_position(chain, q0)
    far = [p0, p0 + [2 * MAX_PATH_STEP_M, 0.0, 0.0]]
    with pytest.raises(ValueError):
        follow_path(chain, far, q0)
    dense = densify_path(far, max_step=0.01)
    assert np.linalg.norm(np.diff(dense, axis=0), axis=1).max() <= 0.01 + 1e-12
    joints = follow_path(chain, dense, q0)
    assert len(joints) == len(dense)
    steps = np.linalg.norm(np.diff(np.asarray(joints), axis=0), axis=1)
    assert steps.max() < 0.5  # no configuration jumps along the drag


def test_follow_path_reports_failing_index(chain):
    q0 = chain.mid_configuration()
    p0 = ee_position(chain, q0)
    path = np.array([p0, p0 + [0.0, 0.0, 4.0]])
    dense = densify_path(path, max_step=0.04)
    with pytest.raises(UnreachableError) as exc:
        follow_path(chain, dense, q0)
    assert exc.value.index is not None and exc.value.index > 0


def test_chain_file_round_trip(tmp_path, chain):
    doc = chain.to_dict()
    assert doc["format"] == CHAIN_FORMAT and doc["version"] == CHAIN_VERSION
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    again = KinematicChain.from_file(path)
    q = chain.mid_configuration()
    assert np.array_equal(ee_position(again, q), ee_position(chain, q))


def test_chain_file_rejects_malformed_documents(tmp_path):
    good = load_default_chain().to_dict()
    for mangle in (
        lambda d: d.pop("format"),
        lambda d: d.update(version=99),
        lambda d: d.update(joints=[]),
        lambda d: d["joints"][0].pop("alpha_rad"),
        lambda d: d.update(convention="classic-dh"),
    ):
        doc = json.loads(json.dumps(good))
        mangle(doc)
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ChainFormatError):
            KinematicChain.from_file(path)

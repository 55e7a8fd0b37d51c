import math

import numpy as np
import pytest

from loopdeg.measurements import (
    BodyFrameSample,
    MeasurementFormatError,
    body_to_world,
    euler_zyx,
    load_measurements,
)
from loopdeg.tube import TubeConstructionError


def test_identity_rotation():
    s = BodyFrameSample(t=0.0, vr=(1, 0, 0), psi=0, theta=0, phi=0)
    assert body_to_world(s) == (0.0, pytest.approx(1.0), pytest.approx(0.0))


def test_quarter_turn_yaw():
    s = BodyFrameSample(t=1.0, vr=(1, 0, 0), psi=math.pi / 2, theta=0, phi=0)
    _, vx, vy = body_to_world(s)
    assert vx == pytest.approx(0.0, abs=1e-15)
    assert vy == pytest.approx(1.0)


def test_yaw_pitch_first_column():
    psi, theta = math.pi / 4, math.pi / 6
    s = BodyFrameSample(t=0.0, vr=(1, 0, 0), psi=psi, theta=theta, phi=0)
    _, vx, vy = body_to_world(s)
    assert vx == pytest.approx(math.cos(psi) * math.cos(theta))
    assert vy == pytest.approx(math.sin(psi) * math.cos(theta))


def test_rotation_is_isometry():
    rng = np.random.default_rng(0)
    for _ in range(50):
        angles = rng.uniform(-math.pi, math.pi, 3)
        vr = rng.normal(0, 2, 3)
        v = euler_zyx(*angles) @ vr
        assert np.linalg.norm(v) == pytest.approx(np.linalg.norm(vr))


def test_load_world_csv(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("t,vx,vy\n0.0,1.0,2.0\n1.0,1.5,2.5\n")
    s = load_measurements(p, "world_csv")
    assert len(s) == 2
    assert s.v[1, 1] == 2.5
    assert s.sigma is None


def test_load_world_csv_with_sigma_column(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("0,1,2,0.1\n1,1,2,0.2\n")  # headerless is fine too
    s = load_measurements(p, "world_csv")
    assert list(s.sigma) == [0.1, 0.2]


def test_load_body_csv_identity_matches_world(tmp_path):
    w = tmp_path / "w.csv"
    b = tmp_path / "b.csv"
    w.write_text("t,vx,vy\n0,1.0,2.0\n1,3.0,4.0\n")
    b.write_text("t,vr1,vr2,vr3,phi,theta,psi\n0,1.0,2.0,0,0,0,0\n1,3.0,4.0,0,0,0,0\n")
    sw = load_measurements(w, "world_csv")
    sb = load_measurements(b, "body_csv")
    assert np.allclose(sw.v, sb.v)


def test_load_rejects_nan_with_line_number(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("t,vx,vy\n0,1,2\n1,nan,2\n")
    with pytest.raises(MeasurementFormatError, match=":3"):
        load_measurements(p, "world_csv")


def test_load_rejects_non_monotone(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("0,1,2\n0,1,2\n")
    with pytest.raises(MeasurementFormatError, match="increasing"):
        load_measurements(p, "world_csv")


def test_load_rejects_wrong_columns(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("0,1\n1,2\n")
    with pytest.raises(MeasurementFormatError, match=":1"):
        load_measurements(p, "world_csv")


def test_load_rejects_single_row(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("t,vx,vy\n0,1,2\n")
    with pytest.raises(TubeConstructionError):
        load_measurements(p, "world_csv")


def test_unknown_format(tmp_path):
    with pytest.raises(MeasurementFormatError):
        load_measurements(tmp_path / "x.csv", "nmea")


def test_default_sigma_applied(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("0,1,2\n1,1,2\n")
    s = load_measurements(p, "world_csv", default_sigma=0.3)
    assert s.sigma == 0.3

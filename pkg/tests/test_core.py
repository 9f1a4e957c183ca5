import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherevirial.core import CurvedParams, GnomonicPoint, embed, project, unembed, unproject
from spherevirial.errors import DomainError

chis = st.floats(min_value=1e-6, max_value=math.pi / 2 - 1e-3)
thetas = st.floats(min_value=-math.pi, max_value=math.pi)
lams = st.floats(min_value=1e-4, max_value=10.0)


def test_params_radius():
    assert CurvedParams(4.0).radius == 0.5
    assert math.isinf(CurvedParams(0.0).radius)
    assert CurvedParams(0.0).is_flat
    with pytest.raises(DomainError):
        CurvedParams(-0.1)


def test_project_examples():
    assert project(math.pi / 4, 0.0, CurvedParams(1.0)).r == pytest.approx(1.0, rel=1e-15)
    assert project(0.0, 0.3, CurvedParams(1.0)).r == 0.0
    # independent 50-digit evaluation of tan(pi/3)/sqrt(4)
    with mpmath.workdps(50):
        ref = float(mpmath.tan(mpmath.pi / 3) / 2)
    assert project(math.pi / 3, 0.0, CurvedParams(4.0)).r == pytest.approx(ref, rel=1e-14)
    assert ref == pytest.approx(0.8660254, abs=1e-7)


@pytest.mark.parametrize("chi", [-0.1, math.pi / 2, 2.0])
def test_project_rejects_outside_hemisphere(chi):
    with pytest.raises(DomainError):
        project(chi, 0.0, CurvedParams(1.0))


def test_flat_projection_rejected():
    with pytest.raises(DomainError):
        project(0.3, 0.0, CurvedParams(0.0))


def test_embed_examples():
    p = CurvedParams(1.0)
    q = embed(GnomonicPoint(0.0, 0.0), p)
    assert (q.q1, q.q2, q.q0) == (0.0, 0.0, 1.0)
    q = embed(GnomonicPoint(1.0, 0.0), p)
    assert q.q1 == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert q.q2 == pytest.approx(0.0, abs=1e-15)
    assert q.q0 == pytest.approx(1 / math.sqrt(2), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(chis, thetas, lams)
def test_round_trips(chi, theta, lam):
    p = CurvedParams(lam)
    pt = project(chi, theta, p)
    assert pt.r == pytest.approx(p.radius * math.tan(chi), rel=1e-12)
    chi2, theta2 = unproject(pt, p)
    assert chi2 == pytest.approx(chi, rel=1e-12)
    assert theta2 == theta
    q = embed(pt, p)
    assert q.norm_sq() == pytest.approx(1 / lam, rel=1e-12)
    back = unembed(q, p)
    assert back.r == pytest.approx(pt.r, rel=1e-12, abs=1e-300)
    if pt.r > 1e-9 * p.radius:
        assert math.remainder(back.theta - theta, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)


def test_unembed_rejects_lower_sheet():
    p = CurvedParams(1.0)
    q = embed(GnomonicPoint(1.0, 0.5), p)
    from spherevirial.core import EmbeddingPoint

    with pytest.raises(DomainError):
        unembed(EmbeddingPoint(q.q1, q.q2, -q.q0), p)

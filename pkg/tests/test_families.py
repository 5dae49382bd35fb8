import pytest

from dualconv.errors import ConfigError
from dualconv.families import (
    generate_family,
    generate_tensors,
    sample_group_elements,
    sample_points,
)


def test_generate_family_deterministic():
    a = generate_family(123, 4)
    b = generate_family(123, 4)
    assert len(a) == 4
    for f, g in zip(a, b):
        assert f.support.intervals == g.support.intervals
        for lo, hi in f.support.intervals:
            x = 0.5 * (lo + hi)
            assert f(x) == g(x)


def test_generate_family_endpoint_bounds():
    for f in generate_family(7, 20):
        lo, hi = f.support.bounds()
        assert 0.25 - 1e-12 <= min(abs(lo), abs(hi))
        assert max(abs(lo), abs(hi)) <= 8.0 + 1e-12
        assert lo * hi > 0  # one half-line only


def test_generate_family_rejects_bad_size():
    with pytest.raises(ConfigError):
        generate_family(1, 0)
    with pytest.raises(ConfigError):
        generate_tensors(1, 0)


def test_tensor_parity_options():
    (Tp,) = generate_tensors(5, 1, parity="+")
    term = Tp.terms[0]
    assert term.left.support.bounds()[0] > 0
    assert term.right.support.bounds()[0] > 0

    (Tm,) = generate_tensors(5, 1, parity="-")
    term = Tm.terms[0]
    assert term.left.support.bounds()[1] < 0
    assert term.right.support.bounds()[1] < 0

    (Tx,) = generate_tensors(5, 1, parity="mixed")
    term = Tx.terms[0]
    assert term.left.support.bounds()[0] > 0
    assert term.right.support.bounds()[1] < 0

    (Txm,) = generate_tensors(5, 1, parity="mixed-")
    term = Txm.terms[0]
    assert term.left.support.bounds()[1] < 0
    assert term.right.support.bounds()[0] > 0

    (Tts,) = generate_tensors(5, 1, parity="two-sided")
    term = Tts.terms[0]
    for leg in (term.left, term.right):
        lo, hi = leg.support.bounds()
        assert lo < 0 < hi

    with pytest.raises(ConfigError):
        generate_tensors(5, 1, parity="diagonal")


def test_sample_points_inside_sets_and_deterministic():
    (T,) = generate_tensors(9, 1, parity="two-sided")
    s_set = T.terms[0].left.support
    t_set = T.terms[0].right.support
    pts = sample_points(11, 40, s_set, t_set)
    assert len(pts) == 40
    for s, t in pts:
        assert s_set.contains(s)
        assert t_set.contains(t)
    assert pts == sample_points(11, 40, s_set, t_set)


def test_sample_group_elements_bounds():
    xs = sample_group_elements(3, 100, b_max=10.0, a_min=0.25, a_max=4.0)
    assert len(xs) == 100
    assert all(abs(x.b) <= 10.0 for x in xs)
    assert all(0.25 <= abs(x.a) <= 4.0 for x in xs)
    assert any(x.a < 0 for x in xs) and any(x.a > 0 for x in xs)

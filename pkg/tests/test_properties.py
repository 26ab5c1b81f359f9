import pytest

from hilbsam.verify import EXTRA, _timed


@pytest.mark.parametrize("key,title,check", EXTRA, ids=[k for k, _, _ in EXTRA])
def test_property_suite(key, title, check):
    res = _timed(key, title, check, 0)
    assert res.passed, res.detail

import os
import subprocess
import sys

import pytest

from crossedprod import _core
from crossedprod._core import pure


def test_backend_reports_a_known_kind():
    assert _core.BACKEND in ("compiled", "pure")


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("n", range(5))
def test_ball_words_parity(k, n):
    active = _core.free_ball_words(k, n, 10**6)
    reference = pure.free_ball_words(k, n, 10**6)
    assert active == reference


@pytest.mark.parametrize(
    "k,t,n",
    [
        (2, (), 3),
        (2, (1,), 4),
        (2, (1, 2), 5),
        (2, (1, -2, 1), 6),
        (3, (1,), 3),
        (3, (2, 3), 5),
    ],
)
def test_t_count_parity(k, t, n):
    assert _core.free_t_count(k, t, n, 10**7) == pure.free_t_count(k, t, n, 10**7)


def test_cap_errors_in_both_backends():
    from crossedprod.errors import ResourceCapError

    with pytest.raises(ResourceCapError):
        pure.free_ball_words(3, 9, 10**4)
    with pytest.raises(ResourceCapError):
        _core.free_ball_words(3, 9, 10**4)


def test_force_pure_env_override():
    code = (
        "import crossedprod; "
        "print(crossedprod.BACKEND); "
        "print(len(crossedprod._core.free_ball_words(2, 3, 10**6)))"
    )
    env = dict(os.environ, CROSSEDPROD_FORCE_PURE="1")
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 0
    lines = proc.stdout.split()
    assert lines[0] == "pure"
    assert lines[1] == "53"


def test_word_multiplication_reduces():
    assert pure.free_mul((1, 2), (-2, -1)) == ()
    assert pure.free_mul((1, 2), (-2, 1)) == (1, 1)
    assert pure.free_mul((), (3,)) == (3,)

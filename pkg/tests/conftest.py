import pytest
from hypothesis import settings, strategies as st

from wwscales.coeff import ONE, C, I, S, W, const, k, w
from wwscales.hierarchy import run_pipeline
from wwscales.terms import FieldExpr, amp

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_GENS = (k, w, W, S, C, I)
# denominators nonzero at every positive (k, W) and on the dispersion branch
_DEN_POOL = (k, W, w, S, C, 1 + k * k, W + k, C + k, 2 + S)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def monomials(draw):
    out = ONE
    for g in _GENS:
        e = draw(st.integers(0, 2))
        if e:
            out = out * g**e
    return out


@st.composite
def scalars(draw, nonzero=False):
    n = draw(st.integers(1, 3))
    num = sum((const(draw(rationals)) * draw(monomials()) for _ in range(n)), const(0))
    if nonzero and num.is_zero():
        num = ONE
    for f in draw(st.lists(st.sampled_from(_DEN_POOL), max_size=2)):
        num = num / f
    return num


def points(seed=0, n=10):
    import random

    rng = random.Random(seed)
    return [(rng.uniform(0.3, 2.5), rng.uniform(0.5, 8.0)) for _ in range(n)]


_AMPS = (
    amp("A", 1),
    amp("A", 1, conj=True),
    amp("A", 2, "x1"),
    amp("psi", 1, "x1"),
    amp("xi", 2),
    amp("A", 1, "t1"),
)


@st.composite
def terms(draw):
    kind = draw(st.integers(0, 2))
    vertical = (kind, draw(st.integers(1, 2))) if kind else (0, 0)
    amps = tuple(draw(st.lists(st.sampled_from(_AMPS), max_size=2)))
    return FieldExpr.term(
        draw(scalars()),
        harmonic=draw(st.integers(-2, 2)),
        ypow=draw(st.integers(0, 2)),
        vertical=vertical,
        amps=amps,
    )


@st.composite
def exprs(draw, max_terms=3):
    return FieldExpr.sum(draw(st.lists(terms(), min_size=0, max_size=max_terms)))


@pytest.fixture(scope="session")
def ledger():
    return run_pipeline()


@pytest.fixture(scope="session")
def ledger3():
    return run_pipeline(max_order=3)


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

import os
import subprocess
import sys

import pytest
from hypothesis import strategies as st

from flatmap import expr as E

# ---------------------------------------------------------------------------
# Expression tree strategies.  Literals are kept moderate so folded constants
# and evaluation at |z| <= ~2 stay well inside double range even under
# exp(exp(...)) nesting at the chosen depth.
# ---------------------------------------------------------------------------

_lit_component = st.floats(min_value=-3.0, max_value=3.0,
                           allow_nan=False, allow_infinity=False)

literals = st.builds(E.Literal, _lit_component, _lit_component)

_leaves = st.one_of(st.builds(E.Var), literals)


def _branches(children):
    return st.one_of(
        st.builds(E.Add, children, children),
        st.builds(E.Sub, children, children),
        st.builds(E.Mul, children, children),
        st.builds(E.Pow, children, st.integers(min_value=0, max_value=4)),
        st.builds(E.Neg, children),
        st.builds(E.Exp, children),
        st.builds(E.Sin, children),
        st.builds(E.Cos, children),
    )


# quotient-free: analytic everywhere by construction
entire_trees = st.recursive(_leaves, _branches, max_leaves=10)


def _with_div(children):
    return st.one_of(_branches(children),
                     st.builds(E.Div, children, children))


all_trees = st.recursive(_leaves, _with_div, max_leaves=10)

points_in_unit_disc = st.builds(
    complex,
    st.floats(min_value=-0.7, max_value=0.7, allow_nan=False),
    st.floats(min_value=-0.7, max_value=0.7, allow_nan=False),
)


def run_cli(args, env_extra=None):
    """Run the CLI in a subprocess; returns (exit_code, stdout, stderr) bytes."""
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run([sys.executable, "-m", "flatmap.cli", *args],
                          capture_output=True, env=env)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def cli():
    return run_cli

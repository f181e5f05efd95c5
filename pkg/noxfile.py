from __future__ import annotations

import nox
from nox.command import CommandFailed

PYTHON = ["3.10", "3.11", "3.12", "3.13", "3.14"]

# (pin, allow_pre)
POLARS = [  # latest *
    ("polars==1.32.*", False),
    ("polars==1.33.*", False),
    ("polars==1.34.*", False),
    ("polars==1.35.*", False),
]

NUMPY = ["numpy<2", "numpy>=2"]

nox.options.default_venv_backend = "uv"
nox.options.reuse_existing_virtualenvs = True


def _install(session, *pins, allow_pre=False):
    install_cmd = ["uv", "pip", "install"]
    if allow_pre:
        install_cmd.append("--pre")  # allow alpha/beta/rc
    install_cmd += ["-e", ".[test]", *pins]
    session.run(*install_cmd, external=True)


@nox.session(python=PYTHON)
@nox.parametrize(("polars_pin", "allow_pre"), POLARS)
def tests(session, polars_pin, allow_pre):
    try:
        _install(session, polars_pin, allow_pre=allow_pre)
    except CommandFailed:
        if allow_pre:
            session.skip("No prerelease available (skipping this combo).")
        raise

    session.run("pytest", "-q", "-n", "auto", "-m", "not slow")


@nox.session(python="3.12")
@nox.parametrize("numpy_pin", NUMPY)
def numerics(session, numpy_pin):
    # the full suite, Monte Carlo ensembles included
    _install(session, numpy_pin)
    session.run("pytest", "-q", "-n", "auto", "--cov=lumaca")


@nox.session(python=PYTHON[-1])
def configs(session):
    _install(session)
    for name in ("special", "verify_step_fixture", "converge"):
        session.run("lumaca", "run", "--config", f"configs/{name}.ini")

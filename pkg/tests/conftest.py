from __future__ import annotations

import pytest

import lumaca as lm


@pytest.fixture(autouse=True)
def _default_config():
    lm.Config.restore_defaults()
    yield
    lm.Config.restore_defaults()

# This module has been adapted from:
#     https://github.com/pola-rs/polars/blob/main/py-polars/polars/meta/versions.py
#
# py-polars/polars/meta/versions.py is distributed with the following license
#
# '''
# Copyright (c) 2025 Ritchie Vink
# Some portions Copyright (c) 2024 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
# '''

from __future__ import annotations

import sys

_REQUIRED = ("numpy", "scipy", "polars", "mpmath", "rich")


def version_info() -> dict[str, str]:
    """Versions of lumaca, its dependencies, and the interpreter."""
    # note: we import 'platform' here as a micro-optimisation for initial import
    import platform

    from lumaca import __version__

    info = {"lumaca": __version__}
    info.update({name: _get_dependency_version(name) for name in _REQUIRED})
    info["platform"] = platform.platform()
    info["python"] = sys.version.split()[0]
    return info


def show_versions() -> None:
    """Print out version of `lumaca` and dependencies to stdout."""
    info = version_info()
    keylen = max(len(x) for x in info) + 2

    print("\n-------- Version info ---------")
    print(f"{'lumaca:':{keylen}s} {info['lumaca']}")

    print("\n---- Required dependencies ----")
    for name in _REQUIRED:
        print(f"{name + ':':{keylen}s} {info[name]}")

    print("\n-------------------------------")
    print(f"{'Platform:':{keylen}s} {info['platform']}")
    print(f"{'Python:':{keylen}s} {info['python']}\n")


def _get_dependency_version(dep_name: str) -> str:
    # note: we import 'importlib' here as a significiant optimisation for initial import
    import importlib
    import importlib.metadata

    try:
        module = importlib.import_module(dep_name)
    except ImportError:
        return "<not installed>"

    if hasattr(module, "__version__"):
        return str(module.__version__)
    return importlib.metadata.version(dep_name)  # pragma: no cover

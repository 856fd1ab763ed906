import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from whdet.corpus import DEFAULT_SYMBOLS, build_symbol, rational_pair  # noqa: E402
from whdet.identities import LabSymbol  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def rp():
    return rational_pair(0.5, 0.3)


@pytest.fixture(scope="session")
def corpus_symbols():
    return {name: build_symbol(spec) for name, spec in DEFAULT_SYMBOLS.items()}


@pytest.fixture(scope="session")
def labs(corpus_symbols):
    """Shared LabSymbols so factorizations are computed once per session."""
    return {name: LabSymbol(a) for name, a in corpus_symbols.items()}


# acceptance criteria register their outcome here; printed at the end of the run
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k} [{name}]: {'PASS' if ok else 'FAIL'}  {detail}")

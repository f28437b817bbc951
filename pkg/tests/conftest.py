import os
import tempfile

import pytest
from hypothesis import settings

DEFAULT_SEED = 20240601

# deterministic by default; --seed N reseeds every randomized test
settings.register_profile("fixed", derandomize=True, deadline=None)
settings.register_profile("seeded", derandomize=False, deadline=None)
settings.load_profile("fixed")

# keep cache files out of the user's home directory
os.environ.setdefault("DPWC_CACHE", tempfile.mkdtemp(prefix="dpwc-test-"))

def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=None,
                     help="seed for randomized tests (numpy and hypothesis); default is a fixed seed")


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    seed = config.getoption("--seed")
    if seed is not None:
        settings.load_profile("seeded")
        if config.getoption("hypothesis_seed", None) is None:
            config.option.hypothesis_seed = str(seed)


@pytest.fixture
def seed(request):
    s = request.config.getoption("--seed")
    return DEFAULT_SEED if s is None else s


ACCEPTANCE = {}  # criterion -> list of (name, ok, detail)


def record(criterion: int, name: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(ok), detail))
    return bool(ok)


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[crit]
        ok = all(r[1] for r in rows)
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}")
        for name, good, detail in rows:
            tr.write_line(f"    [{'pass' if good else 'FAIL'}] {name}{': ' + detail if detail else ''}")

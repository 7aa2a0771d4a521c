import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# criterion number -> list of (ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(n, ok, detail=""):
    ACCEPTANCE.setdefault(n, []).append((ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        if all(ok is None for ok, _ in parts):
            verdict = "SKIP"
        else:
            verdict = "PASS" if all(ok in (True, None) for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts if d)
        tr.write_line(f"criterion {n:>2}: {verdict}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

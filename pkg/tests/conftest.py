import numpy as np
import pytest

from silc import _backend, lifted_model, plant, reference, tv_prox

_USERS = (lifted_model, tv_prox, plant, reference)


@pytest.fixture(params=_backend.available())
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    k = _backend.get(request.param)
    for mod in _USERS:
        monkeypatch.setattr(mod, "kernels", k)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Acceptance criteria: name -> list of (check label, passed, detail)
CRITERIA = {}


class Criterion:
    def __init__(self, name):
        self.name = name
        CRITERIA.setdefault(name, [])

    def check(self, label, ok, detail=""):
        ok = bool(ok)
        CRITERIA[self.name].append((label, ok, detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {self.name} :: {label} {detail}".rstrip())
        assert ok, f"{self.name}: {label} {detail}"


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, checks in CRITERIA.items():
        failed = [f"{label} {detail}".strip() for label, ok, detail in checks if not ok]
        if failed:
            tr.write_line(f"FAIL  {name}: " + "; ".join(failed))
        else:
            tr.write_line(f"PASS  {name} ({len(checks)} checks)")

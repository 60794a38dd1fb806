import numpy as np
import pytest

from mleat import ResolvedGroup


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def make_groups(rng, sizes, dim=10, loc=0.0):
    return [ResolvedGroup(name, rng.normal(loc, 1.0, size=(n, dim))) for name, n in zip("XYAB", sizes)]


_ACCEPTANCE: dict[str, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    cid, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if rep.skipped:
            status, detail = "SKIP", str(rep.longrepr[2]).removeprefix("Skipped: ")
        elif rep.failed:
            status, detail = "FAIL", rep.longreprtext.strip().splitlines()[-1] if rep.longreprtext else ""
        else:
            status, detail = "PASS", "; ".join(c for _, c in getattr(item, "acceptance_notes", []))
        _ACCEPTANCE[cid] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: (int(c.rstrip("ab")), c)):
        status, title, detail = _ACCEPTANCE[cid]
        terminalreporter.write_line(f"AC{cid:<3} {status}  {title}" + (f"  ({detail})" if detail else ""))


@pytest.fixture
def note(request):
    """Attach a short measurement to the acceptance summary line."""
    notes = request.node.acceptance_notes = []
    return lambda key, text: notes.append((key, text))

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion."""

    def record(label, detail=""):
        ACCEPTANCE[request.node.nodeid] = (label, detail)

    yield record
    if request.node.nodeid in ACCEPTANCE:
        label, detail = ACCEPTANCE[request.node.nodeid]
        rep = getattr(request.node, "rep_call", None)
        ok = rep is not None and rep.passed
        ACCEPTANCE[request.node.nodeid] = (label, detail, "PASS" if ok else "FAIL")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    rows = [v for v in ACCEPTANCE.values() if len(v) == 3]
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for label, detail, status in sorted(rows, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"{status}  criterion {label}  {detail}")

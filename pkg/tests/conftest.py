import pytest

# criterion number -> [title, passed (bool), notes]
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.fixture
def note(request):
    """Attach a short summary string to the current criterion line."""
    marker = request.node.get_closest_marker("criterion")

    def add(text: str):
        if marker is not None:
            _CRITERIA.setdefault(marker.args[0], [marker.args[1], True, []])[2].append(text)

    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    entry = _CRITERIA.setdefault(marker.args[0], [marker.args[1], True, []])
    if rep.failed:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, notes = _CRITERIA[n]
        extra = f" [{'; '.join(notes)}]" if notes else ""
        tr.write_line(f"{'PASS' if ok else 'FAIL'} {n:2d} {title}{extra}")
    missing = sorted(set(range(1, 16)) - set(_CRITERIA))
    if missing and len(_CRITERIA) > 1:
        tr.write_line(f"not run: {', '.join(map(str, missing))}")

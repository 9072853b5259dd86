import pytest

_LOG = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """List of (number, title, passed, seconds, detail) shared with the summary hook."""
    return request.config.stash.setdefault(_LOG, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_LOG, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, secs, detail in sorted(log):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status} criterion {num}: {title} ({secs:.2f} s) {detail}".rstrip())

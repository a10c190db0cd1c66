import pytest


@pytest.fixture
def announce(capsys):
    """Print one pass/fail line per shipped guarantee past the capture.

    pytest captures file descriptor 1, so a plain print would only show
    up for failing tests; capsys.disabled() routes the line to the real
    terminal either way.
    """
    def _announce(num, name, ok, elapsed=None):
        extra = "" if elapsed is None else "  (%.1fs)" % elapsed
        line = "criterion %2d  %-34s %s%s" % (num, name,
                                              "PASS" if ok else "FAIL",
                                              extra)
        with capsys.disabled():
            print(line, flush=True)
        assert ok, line
    return _announce

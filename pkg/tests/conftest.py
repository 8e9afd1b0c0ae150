import time
from contextlib import contextmanager

# criterion number -> (status, title, seconds, note)
ACCEPTANCE: dict[int, tuple[str, str, float, str]] = {}


def _record(number, status, title, secs, note=""):
    # parametrized criteria report once: any failing case fails the criterion
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        secs += prev[2]
        if prev[0] == "FAIL":
            status, note = "FAIL", prev[3]
    ACCEPTANCE[number] = (status, title, secs, note)


@contextmanager
def criterion(number, title, limit_s=None):
    """Record a PASS/FAIL line for acceptance criterion ``number``; limit is per run."""
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        note = f"{type(exc).__name__}: {exc}".splitlines()[0][:160]
        _record(number, "FAIL", title, time.perf_counter() - start, note)
        raise
    elapsed = time.perf_counter() - start
    if limit_s is not None and elapsed > limit_s:
        _record(number, "FAIL", title, elapsed, f"took {elapsed:.2f} s, limit {limit_s} s")
        raise AssertionError(f"criterion {number} exceeded {limit_s} s ({elapsed:.2f} s)")
    _record(number, "PASS", title, elapsed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, secs, note = ACCEPTANCE[n]
        line = f"criterion {n}: {status}  {title}  ({secs:.2f} s)"
        terminalreporter.write_line(line + (f"  -- {note}" if note else ""))

from __future__ import annotations

import sys
from contextlib import contextmanager
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

RESULTS: list[tuple[str, bool, str]] = []


@contextmanager
def criterion(label: str):
    """Collect (name, ok, detail) checks; one summary line per criterion is printed at the end."""
    checks: list[tuple[str, bool, str]] = []
    try:
        yield checks
    except Exception as e:
        checks.append(("exception", False, f"{type(e).__name__}: {e}"))
        raise
    finally:
        failed = [c for c in checks if not c[1]]
        detail = "; ".join(f"{n}: {d}" if d else n for n, _, d in (failed or checks))
        RESULTS.append((label, bool(checks) and not failed, detail))


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}")
        if detail:
            terminalreporter.write_line(f"      {detail[:600]}")

"""Collects one line per acceptance criterion for the terminal summary."""

LINES: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    LINES[num] = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(LINES[num])
    return ok

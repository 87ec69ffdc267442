"""Collects one status line per acceptance criterion."""

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] criterion {number}: {title}"
    if detail:
        line += f" ({detail})"
    RESULTS.append(line)
    print(line)

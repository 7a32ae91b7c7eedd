"""Collects per-criterion outcomes of the acceptance suite for the terminal summary."""

from collections import defaultdict

# criterion number -> list of (part, status, detail); status is PASS, FAIL or SKIP
RESULTS: dict[int, list[tuple[str, str, str]]] = defaultdict(list)


def record(criterion: int, part: str, ok: bool | None, detail: str = "") -> bool | None:
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    RESULTS[criterion].append((part, status, detail))
    return ok


def lines() -> list[str]:
    out = []
    for criterion in sorted(RESULTS):
        parts = RESULTS[criterion]
        statuses = {s for _, s, _ in parts}
        overall = "FAIL" if "FAIL" in statuses else ("SKIP" if statuses == {"SKIP"} else "PASS")
        detail = "; ".join(f"{p} {s.lower()}" + (f" ({d})" if d else "") for p, s, d in parts)
        out.append(f"criterion {criterion:2d}: {overall}  {detail}")
    return out

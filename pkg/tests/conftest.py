import pytest

from shortcode.gf2 import GF2Matrix, GF2Vector, Subspace


def vec(text: str) -> int:
    return GF2Vector.parse(text).bits


def span(*rows: str) -> Subspace:
    return Subspace.span(len(rows[0]), [vec(r) for r in rows])


def mat(*rows: str) -> GF2Matrix:
    return GF2Matrix.from_rows(list(rows))


@pytest.fixture
def helpers():
    return {"vec": vec, "span": span, "mat": mat}


ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def record(number: int, title: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE.append((number, title, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")

ACCEPTANCE = {}


def record(criterion, passed, detail):
    """Remember one acceptance verdict for the end-of-run summary."""
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE, key=lambda c: int(c[1:])):
        passed, detail = ACCEPTANCE[criterion]
        terminalreporter.write_line(f"{criterion:>4s} {'PASS' if passed else 'FAIL'}  {detail}")

import helpers


def pytest_terminal_summary(terminalreporter):
    if helpers.CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in helpers.CRITERIA:
            terminalreporter.write_line(line)

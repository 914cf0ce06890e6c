import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(acceptance_log.LINES, key=lambda k: (int(k.rstrip("ab")), k)):
        terminalreporter.write_line(acceptance_log.LINES[key])

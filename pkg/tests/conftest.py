from hypothesis import settings

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import GATE

    if GATE:
        terminalreporter.section("acceptance gate")
        for line in GATE:
            terminalreporter.write_line(line)

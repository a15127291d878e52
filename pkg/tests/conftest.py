_criteria = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    key = props["criterion"]
    if report.when == "call" or report.failed:
        previous = _criteria.get(key, (props.get("title", ""), "PASS"))
        outcome = "FAIL" if report.failed or previous[1] == "FAIL" else "PASS"
        _criteria[key] = (props.get("title", ""), outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        title, outcome = _criteria[key]
        terminalreporter.write_line(f"{outcome}  criterion {key}: {title}")

"""Collects ``criterion``-marked tests and prints one PASS/FAIL line each."""

_results: dict[str, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, title): acceptance criterion")


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", marker.args))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    label, title = props["criterion"]
    if report.when == "call" or report.failed:
        outcome = "PASS" if report.passed else "FAIL"
        if _results.get(label, ("PASS",))[0] == "FAIL":
            return
        _results[label] = (outcome, title, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")

    def order(label):
        return int(label.lstrip("AC"))

    for label in sorted(_results, key=order):
        outcome, title, detail = _results[label]
        line = f"{label:<5} {outcome}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)

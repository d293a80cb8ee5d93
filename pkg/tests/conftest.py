"""Collects the outcome of every acceptance test and prints one line each."""

_RESULTS = {}


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    name = report.nodeid
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        _RESULTS[name] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    items = {i.nodeid: i for i in tr.config._acceptance_items} if hasattr(
        tr.config, "_acceptance_items") else {}
    for nodeid, outcome in sorted(_RESULTS.items(), key=lambda kv: _order(items, kv[0])):
        item = items.get(nodeid)
        mark = item.get_closest_marker("acceptance") if item else None
        label = (f"criterion {mark.kwargs['criterion']}: {mark.kwargs['title']}"
                 if mark else nodeid)
        tr.write_line(f"{outcome}  {label}")


def _order(items, nodeid):
    item = items.get(nodeid)
    mark = item.get_closest_marker("acceptance") if item else None
    return (mark.kwargs.get("criterion", 99) if mark else 99, nodeid)


def pytest_collection_finish(session):
    session.config._acceptance_items = [
        i for i in session.items if i.get_closest_marker("acceptance") is not None]

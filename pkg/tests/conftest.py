import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion with a one-line verdict")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, {"title": title, "ok": True, "notes": []})
    if rep.when == "call" or rep.failed:
        entry["ok"] = entry["ok"] and rep.passed
    if rep.when == "call":
        entry["notes"].extend(v for k, v in item.user_properties if k == "note")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS, key=int):
        entry = _RESULTS[number]
        tr.write_line(f"{'PASS' if entry['ok'] else 'FAIL'}  {number:>2}. {entry['title']}")
    for number in sorted(_RESULTS, key=int):
        for note in _RESULTS[number]["notes"]:
            tr.write_line("")
            tr.write_line(f"[{number}] {note}")

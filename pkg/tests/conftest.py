import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "notes": []})
    if call.excinfo is not None and not call.excinfo.errisinstance(KeyboardInterrupt):
        entry["ok"] = False
    for note in getattr(item, "criterion_notes", []) if call.when == "call" else []:
        entry["notes"].append(note)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        line = f"criterion {number}: {'PASS' if e['ok'] else 'FAIL'} - {e['title']}"
        if e["notes"]:
            line += " (" + "; ".join(e["notes"]) + ")"
        terminalreporter.write_line(line)

import pytest

from fbmadt.simulator import SimDesign, generate_dataset


@pytest.fixture(scope="session")
def reference_small():
    """Reference design with 6 units per level and 10 measurements."""
    return generate_dataset(SimDesign(n_units_per_level=6, n_measurements=10, master_seed=11))


@pytest.fixture(scope="session")
def reference_medium():
    return generate_dataset(SimDesign(n_units_per_level=12, n_measurements=20, master_seed=5))


_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "details": []})
    if rep.failed:
        entry["passed"] = False
    if rep.when == "call":
        entry["details"].extend(str(v) for k, v in item.user_properties if k == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["passed"] else "FAIL"
        detail = "; ".join(entry["details"])
        terminalreporter.write_line(f"criterion {number:2d} {status}  {entry['title']}" + (f"  [{detail}]" if detail else ""))

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from weft.dictionary import Dictionary, Synset

FIXTURES = Path(__file__).parent / "fixtures"

CARS_HTML = b"""<html><body>
<span>List of car manufacturers</span>
<ul>
\t<li>Name: <b>Audi</b></li>
\t<li>Name: <b>Ford</b></li>
\t<li>Name: <b>Volkswagen</b></li>
</ul>
</body></html>"""


@pytest.fixture
def name_dict():
    return Dictionary("en", [Synset("K1", "Name", ["Name"])])


@pytest.fixture
def cars_html():
    return CARS_HTML


def make_dict(*synsets, language="en"):
    return Dictionary(language, [Synset(*args) for args in synsets])


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\nACCEPTANCE {status}: {name}")

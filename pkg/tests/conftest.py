import time

import pytest

from freemarkov.audit import random_corpus
from freemarkov.corpus import all_odags, enumerate_diagrams, orbit_representatives
from freemarkov.signature import Signature

# one line per acceptance criterion, echoed in the terminal summary
CRITERIA = []

SWAP = ({"a": "b", "b": "a"}, {"f": "g", "g": "f"})


def two_letter_sig():
    return Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})


def report(n, ok, detail, seconds, bound):
    within = seconds < bound
    line = (f"criterion {n}: {'PASS' if ok and within else 'FAIL'}  {detail}  "
            f"[{seconds:.1f} s, bound {bound:g} s]")
    print(line)
    CRITERIA.append(line)
    return ok and within


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split()[1][:-1])):
            terminalreporter.write_line(line)


class Corpus:
    """Shared test data, built once and timed separately from the checks."""

    def __init__(self):
        self._cache = {}
        self.build_seconds = {}

    def _get(self, key, make):
        if key not in self._cache:
            t = time.perf_counter()
            self._cache[key] = make()
            self.build_seconds[key] = time.perf_counter() - t
        return self._cache[key]

    @property
    def sig(self):
        return self._get("sig", two_letter_sig)

    @property
    def exhaustive(self):
        return self._get("exhaustive", lambda: enumerate_diagrams(self.sig, 5))

    @property
    def orbits(self):
        return self._get("orbits", lambda: orbit_representatives(self.exhaustive, [SWAP]))

    @property
    def random12(self):
        return self._get("random12", lambda: random_corpus(self.sig, 10_000, 12, seed=1))

    def odags(self, n):
        return self._get(("odags", n), lambda: list(all_odags(n)))


@pytest.fixture(scope="session")
def corpus():
    return Corpus()


@pytest.fixture
def sig2():
    return two_letter_sig()

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from blochlab.sampling import SamplerConfig
from blochlab.weights import power_weight, standard_weight

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def std():
    return standard_weight()


@pytest.fixture(scope="session")
def sqrt_weight():
    return power_weight(0.5)


@pytest.fixture(scope="session")
def quick_sampler():
    return SamplerConfig(shells=10, directions=128, refinement_passes=2, refine_top=4)


# criterion number -> list of (passed, detail), filled by the acceptance suite
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}
ACCEPTANCE_TITLES: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    def record(number: int, title: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_TITLES[number] = title
        ACCEPTANCE.setdefault(number, []).append((bool(passed), detail))
        print(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        status = "PASS" if all(p for p, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"[{status}] {number:2d} {ACCEPTANCE_TITLES[number]}: {detail}")

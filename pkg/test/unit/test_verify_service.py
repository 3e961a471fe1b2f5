import pytest

from src.dsp.models import FilterSpec
from src.services.policy_service import PolicyConfig
from src.services.verify_service import CheckResult, VerificationService


@pytest.fixture(scope="module")
def quick_service():
    return VerificationService(PolicyConfig(), seed=0, quick=True)


def test_summary_line_format():
    line = CheckResult("roundtrip", 3.2e-16, "<1e-06", True).summary_line()
    assert line == "check=roundtrip value=3.2e-16 threshold=<1e-06 status=PASS"
    assert CheckResult("x", 1.0, "<0.5", False).summary_line().endswith("status=FAIL")


def test_check_names_unique(quick_service):
    names = [check.check_name for check in quick_service.checks()]
    assert len(names) == len(set(names))


@pytest.mark.parametrize(
    "check",
    [
        "check_roundtrip",
        "check_rotation_magnitude",
        "check_shift_fidelity",
        "check_shift_composition",
        "check_filter_noise_gain",
        "check_variance_anchor",
        "check_phase_dc",
        "check_determinism",
        "check_batch_independence",
        "check_adjoint",
        "check_loss_gradient",
        "check_shift_derivative",
    ],
)
def test_quick_checks_pass(quick_service, check):
    result = getattr(quick_service, check)()
    assert result.passed, result.summary_line()


def test_low_sigma2_fails_variance_check():
    service = VerificationService(PolicyConfig(sigma2=1.0), seed=0, quick=True)
    result = service.check_shift_variance()
    assert not result.passed
    assert result.value < 0.5



def test_wider_filter_fails_fixed_variance_target():
    service = VerificationService(PolicyConfig(filter_spec=FilterSpec(cutoff=0.1)), seed=0, quick=True)
    # still self-consistent with its own noise gain
    assert service.check_shift_variance().passed
    anchor = service.check_variance_anchor()
    assert not anchor.passed
    assert anchor.value > 0.63

@pytest.mark.slow
def test_quick_suite_passes():
    results = VerificationService(PolicyConfig(), seed=5, quick=True).run()
    assert all(r.passed for r in results), [r.summary_line() for r in results if not r.passed]


@pytest.mark.slow
def test_full_suite_passes():
    results = VerificationService(PolicyConfig(), seed=0).run()
    assert all(r.passed for r in results), [r.summary_line() for r in results if not r.passed]

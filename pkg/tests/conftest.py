import secrets

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and "test_acceptance" in str(item.fspath):
        status = "PASS" if rep.passed else "FAIL"
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        print(f"\n[{status}] {doc}")

from drlia import ManualClock, Service, ServiceConfig

PASSWORD = "correct-horse-battery"
ADMIN = "EMP/00001"
OFFICER = "EMP/00002"
READONLY = "EMP/00003"


def fast_config(**overrides) -> ServiceConfig:
    """In-memory journal and a 1-iteration KDF so tests stay fast."""
    defaults = dict(
        journal_path=None,
        master_key=secrets.token_bytes(32),
        kdf_iterations=1,
        rate_limit_per_second=10_000,
    )
    defaults.update(overrides)
    return ServiceConfig(**defaults)


def make_service(**overrides) -> Service:
    clock = overrides.pop("clock", None) or ManualClock()
    return Service(fast_config(**overrides), clock)


def add_staff(svc: Service, staff_number: str, role: str,
              password: str = PASSWORD) -> dict:
    """Register an identity and activate it with the given role."""
    n = staff_number.split("/")[1]
    out = svc.register(f"Staff {n}", staff_number, f"user{n}@intra.local",
                       "+2348000000", "Female", password)
    svc.registry.grant("system", staff_number, role)
    return out


def login(svc: Service, staff_number: str, password: str = PASSWORD):
    """Full three-stage login; returns the Authenticated session."""
    session = svc.engine.begin_session()
    svc.engine.submit_credentials(session, staff_number, password)
    svc.engine.request_token(session)
    token = svc.engine.live_token_for(session.session_id)
    svc.engine.submit_token(session, token.code)
    assert session.state == "Authenticated"
    return session


@pytest.fixture
def svc():
    return make_service()


@pytest.fixture
def svc_with_admin(svc):
    add_staff(svc, ADMIN, "Admin")
    return svc

import pytest

from zzlab import FamilySpec, FiniteField, GroupSpec


@pytest.fixture(scope="session")
def F3():
    return FiniteField(3)


@pytest.fixture(scope="session")
def F5():
    return FiniteField(5)


@pytest.fixture(scope="session")
def F7():
    return FiniteField(7)


@pytest.fixture(scope="session")
def spec_q3_z2(F3):
    return FamilySpec(F3, GroupSpec((2,)))


@pytest.fixture(scope="session")
def spec_q5_z4(F5):
    return FamilySpec(F5, GroupSpec((4,)))


@pytest.fixture(scope="session")
def spec_q5_z22(F5):
    return FamilySpec(F5, GroupSpec((2, 2)))


@pytest.fixture(scope="session")
def spec_q7_z3(F7):
    return FamilySpec(F7, GroupSpec((3,)))

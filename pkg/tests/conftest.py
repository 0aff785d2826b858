import pytest

from antipodal.mesh import cube, random_convex, regular_tetrahedron


@pytest.fixture(scope="session")
def cube_mesh():
    return cube()


@pytest.fixture(scope="session")
def tet():
    return regular_tetrahedron(1.0)


@pytest.fixture(scope="session")
def rand12():
    return random_convex(12, 0)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

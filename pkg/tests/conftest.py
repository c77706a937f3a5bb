import pytest

from wcojmatch.graph import EdgeList, build_csr
from wcojmatch.query import parse_query

# data graph d0..d3 and triangle query q0->q1, q0->q2, q2->q1 of the worked example
FIG3_EDGES = [(0, 1), (1, 2), (2, 3), (2, 2), (3, 0), (0, 2), (3, 1)]
FIG3_QUERY = [(0, 1), (0, 2), (2, 1)]

# (q0, q1, q2) layout of S0..S5
FIG3_ISO = {(0, 2, 1), (3, 1, 0)}
FIG3_HOM = FIG3_ISO | {(0, 2, 2), (1, 2, 2), (2, 2, 2), (2, 3, 2)}


@pytest.fixture
def fig3_graph():
    return build_csr(EdgeList(FIG3_EDGES))


@pytest.fixture
def fig3_iso():
    return parse_query(FIG3_QUERY, directed=True, mode="iso")


@pytest.fixture
def fig3_hom():
    return parse_query(FIG3_QUERY, directed=True, mode="hom")

from fractions import Fraction as F

from cbgt.model import CbgtInstance
from cbgt.systems import Graphic


def six_vertex_graph():
    """Six vertices, ten edges: K4 on 0..3, vertex 4 hanging on 2 and 3,
    vertex 5 on 0 and 1. Every edge at rate 1/2."""
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (0, 5), (1, 5)]
    return CbgtInstance(tuple(f"e{i + 1}" for i in range(10)), Graphic(6, edges),
                        tuple([F(1, 2)] * 10))

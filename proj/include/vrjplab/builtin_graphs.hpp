#pragma once

#include "vrjplab/graph.hpp"

namespace vrjp {

Graph two_vertex_graph(double w = 1.0);
Graph triangle_graph(double w01 = 1.0, double w02 = 1.0, double w12 = 1.0);
// Path 0-1-...-(k-1); root at an end unless root_id says otherwise.
Graph path_graph(int k, double w = 1.0, long root_id = 0);
Graph cycle_graph(int k, double w = 1.0);

}  // namespace vrjp

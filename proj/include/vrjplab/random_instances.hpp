#pragma once

#include <vector>

#include "vrjplab/field.hpp"
#include "vrjplab/graph.hpp"
#include "vrjplab/rng.hpp"

namespace vrjp {

// Connected graph on min_v..max_v vertices: a random spanning tree plus each
// remaining pair independently with probability extra_edge_p, conductances
// log-uniform in [0.2, 5].
Graph random_connected_graph(Rng& rng, int min_v = 2, int max_v = 5,
                             double extra_edge_p = 0.4);

// Gaussian field pinned at the root, std dev `scale`.
std::vector<double> random_pinned_field(Rng& rng, const Graph& g,
                                        double scale = 1.0);

}  // namespace vrjp

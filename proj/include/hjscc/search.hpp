#pragma once

// Heuristic search over auxiliary channels for the smallest leakage lower
// bound under distortion caps. Every returned point is an evaluated,
// feasible auxiliary, so results are achievable (inner-bound) values; no
// global optimality is claimed.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hjscc/region.hpp"

namespace hjscc {

struct AuxSizes {
    std::size_t u = 0, v = 0, w = 0;  // 0 selects the default |S| + 1
};

// Largest auxiliary alphabets the cardinality bounds ever require.
AuxSizes cardinality_bounds(std::size_t s_size);
AuxSizes resolve_sizes(const AuxSizes& requested, std::size_t s_size);

struct SearchOptions {
    Region region = Region::R1;
    double d1_max = 1.0;
    double d2_max = 1.0;
    std::size_t budget = 8;             // coordinate-descent restarts
    std::uint64_t seed = 1;
    AuxSizes sizes;
    std::size_t threads = 1;
    std::size_t max_evals = 4000;       // objective evaluations per restart
    double initial_step = 0.25;
    double min_step = 1e-3;
};

struct SearchResult {
    AuxChannel aux;
    RegionPoint point;
    std::size_t restarts_used = 0;
    std::size_t evaluations = 0;
};

// Throws Errc::NoFeasiblePoint when no restart meets all constraints.
SearchResult minimize_leakage(const ScenarioConfig& sc, const SearchOptions& opts);

struct FrontierCell {
    double d1_max = 0.0;
    double d2_max = 0.0;
    std::optional<SearchResult> best;  // empty: no feasible point found
    std::size_t restarts_used = 0;
};

// One search per (d1_max, d2_max) cell over the ascending-sorted grids,
// followed by a cumulative minimum so leakage never increases with looser caps.
std::vector<FrontierCell> frontier_sweep(const ScenarioConfig& sc, std::vector<double> d1_grid,
                                         std::vector<double> d2_grid, const SearchOptions& opts);

// CSV with header d1_max,d2_max,leakage_lb,d1,d2,feasible,restarts_used.
// Infeasible cells carry feasible=0 and empty numeric fields.
void write_frontier_csv(std::ostream& os, const std::vector<FrontierCell>& cells);

}  // namespace hjscc

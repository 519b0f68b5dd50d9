#pragma once

// Random test instances: sources, channels and auxiliary channels with
// occasional exact zeros and near-deterministic rows, for property checks.

#include <cstddef>

#include "hjscc/dmc.hpp"
#include "hjscc/prob.hpp"
#include "hjscc/random.hpp"
#include "hjscc/region.hpp"

namespace hjscc {

// Row drawn from a symmetric Dirichlet with a random concentration; some
// entries are zeroed (at least one survives).
std::vector<double> random_row(std::size_t width, Rng& rng);

CondKernel random_kernel(std::vector<std::size_t> input_sizes, std::size_t output_size, Rng& rng);
SourceModel random_source(std::size_t ns, std::size_t nt, std::size_t ne, Rng& rng);
Channel random_channel(std::size_t nx, std::size_t ny, Rng& rng);
AuxChannel random_aux(std::size_t ns, std::size_t nu, std::size_t nv, std::size_t nw, Rng& rng);

// Binary source and channels with rho1, rho2 drawn from [0.5, 2].
ScenarioConfig random_binary_scenario(Rng& rng);

}  // namespace hjscc

#include "hjscc/sampling.hpp"

#include <cmath>
#include <random>

namespace hjscc {

std::vector<double> random_row(std::size_t width, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double alpha = std::exp2(-3.0 + 5.0 * unif(rng));  // between 1/8 and 4
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> row(width);
    double z = 0.0;
    for (auto& x : row) {
        x = unif(rng) < 0.15 ? 0.0 : gamma(rng);
        z += x;
    }
    if (!(z > 0.0)) {
        std::uniform_int_distribution<std::size_t> pick(0, width - 1);
        row.assign(width, 0.0);
        row[pick(rng)] = 1.0;
        return row;
    }
    for (auto& x : row) x /= z;
    // Fold rounding residue into the largest entry so the row sums to one.
    double sum = 0.0;
    std::size_t big = 0;
    for (std::size_t i = 0; i < width; ++i) {
        sum += row[i];
        if (row[i] > row[big]) big = i;
    }
    row[big] += 1.0 - sum;
    return row;
}

CondKernel random_kernel(std::vector<std::size_t> input_sizes, std::size_t output_size, Rng& rng) {
    std::size_t rows = 1;
    for (auto s : input_sizes) rows *= s;
    std::vector<double> flat;
    flat.reserve(rows * output_size);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = random_row(output_size, rng);
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return CondKernel(std::move(input_sizes), output_size, std::move(flat));
}

SourceModel random_source(std::size_t ns, std::size_t nt, std::size_t ne, Rng& rng) {
    return SourceModel(random_row(ns, rng), random_kernel({ns}, nt, rng), random_kernel({nt}, ne, rng));
}

Channel random_channel(std::size_t nx, std::size_t ny, Rng& rng) {
    return Channel(random_kernel({nx}, ny, rng));
}

AuxChannel random_aux(std::size_t ns, std::size_t nu, std::size_t nv, std::size_t nw, Rng& rng) {
    return AuxChannel(random_kernel({ns}, nu, rng), random_kernel({nu, ns}, nv, rng),
                      random_kernel({nu, nv, ns}, nw, rng));
}

ScenarioConfig random_binary_scenario(Rng& rng) {
    std::uniform_real_distribution<double> rho(0.5, 2.0);
    std::uniform_real_distribution<double> cross(0.0, 0.4);
    const double r1 = rho(rng), r2 = rho(rng);
    return ScenarioConfig(random_source(2, 2, 2, rng), Channel::bsc(cross(rng)), Channel::bsc(cross(rng)),
                          r1, r2);
}

}  // namespace hjscc

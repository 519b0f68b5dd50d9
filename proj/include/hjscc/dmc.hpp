#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hjscc/prob.hpp"
#include "hjscc/random.hpp"

namespace hjscc {

// Discrete memoryless channel P(y|x).
class Channel {
public:
    explicit Channel(CondKernel transition);

    static Channel bsc(double crossover) { return Channel(CondKernel::bsc(crossover)); }
    static Channel identity(std::size_t n) { return Channel(CondKernel::identity(n)); }

    std::size_t input_size() const noexcept { return kernel_.input_sizes()[0]; }
    std::size_t output_size() const noexcept { return kernel_.output_size(); }
    double operator()(std::size_t x, std::size_t y) const { return kernel_(x, y); }
    const CondKernel& transition() const noexcept { return kernel_; }

private:
    CondKernel kernel_;
};

struct CapacityResult {
    double capacity = 0.0;          // bits per channel use (lower bound of the bracket)
    std::vector<double> input_dist;
    std::size_t iterations = 0;
    double gap = 0.0;               // upper bound minus lower bound at exit
};

inline constexpr std::size_t kCapacityIterationCap = 100'000;

// Blahut-Arimoto iteration from the uniform input. Stops once
// max_x D(W(.|x) || q) - I(p, W) <= tol; the true capacity lies in
// [capacity, capacity + gap].
CapacityResult capacity(const Channel& ch, double tol,
                        std::size_t max_iterations = kCapacityIterationCap);

// One independent channel use per input symbol.
Word transmit(const Channel& ch, std::span<const Symbol> x, std::uint64_t seed);
Word transmit(const Channel& ch, std::span<const Symbol> x, Rng& rng);

}  // namespace hjscc

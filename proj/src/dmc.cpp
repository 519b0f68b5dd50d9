#include "hjscc/dmc.hpp"

#include <algorithm>
#include <cmath>

#include "hjscc/random.hpp"

namespace hjscc {

Channel::Channel(CondKernel transition) : kernel_(std::move(transition)) {
    if (kernel_.input_sizes().size() != 1) {
        throw Error(Errc::AlphabetMismatch, "a channel has exactly one input alphabet");
    }
}

namespace {

// Divergences D(W(.|x) || q) in bits for the output law q induced by p.
// q[y] > 0 wherever W(y|x) > 0 and p(x) > 0; multiplicative updates never zero out p.
void divergences(const Channel& ch, const std::vector<double>& p, std::vector<double>& q,
                 std::vector<double>& div) {
    const std::size_t nx = ch.input_size(), ny = ch.output_size();
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * ch(x, y);
    for (std::size_t x = 0; x < nx; ++x) {
        double d = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            const double w = ch(x, y);
            if (w > 0.0) d += w * std::log2(w / q[y]);
        }
        div[x] = d;
    }
}

double mutual_info_of(const std::vector<double>& p, const std::vector<double>& div) {
    double i = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) i += p[x] * div[x];
    return i;
}

void tilt(const std::vector<double>& p, const std::vector<double>& div, double upper, double step,
          std::vector<double>& out) {
    double z = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        out[x] = p[x] * std::exp2(step * (div[x] - upper));
        z += out[x];
    }
    for (auto& v : out) v /= z;
}

}  // namespace

// Blahut-Arimoto with an adaptive exponent: the plain update (step 1) is
// always an ascent step, and larger steps are kept only while they improve
// the mutual information. Nearly useless channels otherwise need millions
// of plain iterations.
CapacityResult capacity(const Channel& ch, double tol, std::size_t max_iterations) {
    if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "capacity tolerance must be positive");
    const std::size_t nx = ch.input_size(), ny = ch.output_size();
    std::vector<double> p(nx, 1.0 / static_cast<double>(nx)), trial(nx);
    std::vector<double> q(ny), div(nx), q_trial(ny), div_trial(nx);
    double step = 1.0;

    CapacityResult res;
    divergences(ch, p, q, div);
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        const double lower = mutual_info_of(p, div);
        const double upper = *std::max_element(div.begin(), div.end());

        res.iterations = it;
        res.capacity = std::max(0.0, lower);
        res.gap = std::max(0.0, upper - lower);
        res.input_dist = p;
        if (res.gap <= tol) return res;

        if (step > 1.0) {
            tilt(p, div, upper, step, trial);
            divergences(ch, trial, q_trial, div_trial);
            if (mutual_info_of(trial, div_trial) > lower) {
                p.swap(trial);
                div.swap(div_trial);
                step = std::min(2.0 * step, 1048576.0);
                continue;
            }
            step = std::max(1.0, step / 4.0);
        }
        tilt(p, div, upper, 1.0, p);
        divergences(ch, p, q, div);
        step = std::max(step, 2.0);
    }
    throw Error(Errc::NoConvergence, "Blahut-Arimoto did not reach tolerance within " +
                                         std::to_string(max_iterations) + " iterations");
}

Word transmit(const Channel& ch, std::span<const Symbol> x, Rng& rng) {
    Word y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= ch.input_size()) {
            throw Error(Errc::SymbolOutOfRange, "channel input symbol " + std::to_string(x[i]) +
                                                    " at position " + std::to_string(i));
        }
        y[i] = static_cast<Symbol>(draw_index(ch.transition().row(x[i]), rng));
    }
    return y;
}

Word transmit(const Channel& ch, std::span<const Symbol> x, std::uint64_t seed) {
    Rng rng(seed);
    return transmit(ch, x, rng);
}

}  // namespace hjscc

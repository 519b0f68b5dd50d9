#pragma once

// Exact finite-alphabet probability calculus. All information quantities are
// in bits, computed by exact summation over dense tensors.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hjscc/error.hpp"

namespace hjscc {

using Symbol = std::uint16_t;
using Word = std::vector<Symbol>;
using AxisList = std::vector<std::string>;

inline constexpr double kStochasticTol = 1e-12;
inline constexpr std::size_t kDefaultCellCap = 1'000'000;

struct Axis {
    std::string name;
    std::size_t size = 1;
};

// Dense probability tensor, row-major over the axes in declaration order
// (last axis fastest). The constructor checks shape only; use validate()
// for the probability axioms.
class JointDist {
public:
    JointDist(std::vector<Axis> axes, std::vector<double> mass,
              std::size_t cell_cap = kDefaultCellCap);

    const std::vector<Axis>& axes() const noexcept { return axes_; }
    std::size_t rank() const noexcept { return axes_.size(); }
    std::size_t cells() const noexcept { return mass_.size(); }
    std::span<const double> mass() const noexcept { return mass_; }

    std::size_t axis_index(const std::string& name) const;
    std::uint64_t mask_of(const AxisList& names) const;

    double at(std::span<const std::size_t> tuple) const;
    std::vector<std::size_t> unravel(std::size_t cell) const;

    // Marginal over the axes selected by `mask`, kept in ascending axis order.
    std::vector<double> marginal_mass(std::uint64_t mask) const;
    JointDist marginal(const AxisList& names) const;

private:
    std::vector<Axis> axes_;
    std::vector<double> mass_;
    std::vector<std::size_t> strides_;
};

struct ValidationReport {
    bool ok = true;
    Errc code = Errc::NotNormalized;
    std::vector<std::size_t> cell;  // offending axis tuple, when one exists
    std::string message;

    explicit operator bool() const noexcept { return ok; }
};

ValidationReport validate(const JointDist& dist, double tol = kStochasticTol);
void ensure_valid(const JointDist& dist, double tol = kStochasticTol);

// Shannon entropy in bits of a probability vector; 0 log 0 = 0.
double entropy_bits(std::span<const double> p) noexcept;

double entropy(const JointDist& dist, const AxisList& vars);
double mutual_info(const JointDist& dist, const AxisList& a, const AxisList& b);
double cond_mutual_info(const JointDist& dist, const AxisList& a, const AxisList& b,
                        const AxisList& c);

// Memoized subset entropies for one distribution, addressed by axis bitmask.
// Used where many information terms of the same joint are needed.
class EntropyCache {
public:
    explicit EntropyCache(const JointDist& dist) : dist_(&dist) {}

    double entropy(std::uint64_t mask);
    // I(a;b|c), clamped at zero; masks must be pairwise disjoint.
    double mi(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

private:
    const JointDist* dist_;
    std::unordered_map<std::uint64_t, double> memo_;
};

// Conditional distribution P(out | inputs); one row per input tuple,
// input tuples enumerated row-major in the declared input order.
class CondKernel {
public:
    CondKernel(std::vector<std::size_t> input_sizes, std::size_t output_size,
               std::vector<double> rows);

    static CondKernel from_rows(std::vector<std::size_t> input_sizes,
                                const std::vector<std::vector<double>>& rows);
    static CondKernel identity(std::size_t n);
    static CondKernel constant(std::vector<std::size_t> input_sizes,
                               std::size_t output_size = 1, Symbol symbol = 0);
    static CondKernel deterministic(std::vector<std::size_t> input_sizes,
                                    std::size_t output_size, std::span<const Symbol> map);
    static CondKernel bsc(double crossover);

    const std::vector<std::size_t>& input_sizes() const noexcept { return input_sizes_; }
    std::size_t output_size() const noexcept { return output_size_; }
    std::size_t row_count() const noexcept { return rows_.size() / output_size_; }

    std::span<const double> row(std::size_t r) const {
        return {rows_.data() + r * output_size_, output_size_};
    }
    double operator()(std::size_t r, std::size_t out) const {
        return rows_[r * output_size_ + out];
    }
    std::span<const double> data() const noexcept { return rows_; }
    std::vector<std::vector<double>> to_rows() const;

private:
    std::vector<std::size_t> input_sizes_;
    std::size_t output_size_;
    std::vector<double> rows_;
};

// Degraded source triple: S ~ p_s, T | S, E | T, so S - T - E holds by construction.
class SourceModel {
public:
    SourceModel(std::vector<double> p_s, CondKernel t_given_s, CondKernel e_given_t);

    // Uniform binary S observed through BSC(p_t) as T, then BSC(p_e) as E.
    static SourceModel dsbs(double p_t, double p_e);

    std::size_t s_size() const noexcept { return p_s_.size(); }
    std::size_t t_size() const noexcept { return t_given_s_.output_size(); }
    std::size_t e_size() const noexcept { return e_given_t_.output_size(); }
    const std::vector<double>& p_s() const noexcept { return p_s_; }
    const CondKernel& t_given_s() const noexcept { return t_given_s_; }
    const CondKernel& e_given_t() const noexcept { return e_given_t_; }

    JointDist joint() const;  // axes S, T, E

private:
    std::vector<double> p_s_;
    CondKernel t_given_s_;
    CondKernel e_given_t_;
};

// Factored auxiliary channel P(u|s) P(v|u,s) P(w|u,v,s).
class AuxChannel {
public:
    AuxChannel(CondKernel u_given_s, CondKernel v_given_us, CondKernel w_given_uvs);

    // |U| = |V| = |W| = 1.
    static AuxChannel constant(std::size_t s_size);

    std::size_t s_size() const noexcept { return u_given_s_.input_sizes()[0]; }
    std::size_t u_size() const noexcept { return u_given_s_.output_size(); }
    std::size_t v_size() const noexcept { return v_given_us_.output_size(); }
    std::size_t w_size() const noexcept { return w_given_uvs_.output_size(); }

    const CondKernel& u_given_s() const noexcept { return u_given_s_; }
    const CondKernel& v_given_us() const noexcept { return v_given_us_; }
    const CondKernel& w_given_uvs() const noexcept { return w_given_uvs_; }

private:
    CondKernel u_given_s_;
    CondKernel v_given_us_;
    CondKernel w_given_uvs_;
};

// Axis positions of the assembled joint (S,T,E,U,V,W).
namespace var {
inline constexpr std::uint64_t S = 1u << 0;
inline constexpr std::uint64_t T = 1u << 1;
inline constexpr std::uint64_t E = 1u << 2;
inline constexpr std::uint64_t U = 1u << 3;
inline constexpr std::uint64_t V = 1u << 4;
inline constexpr std::uint64_t W = 1u << 5;
}  // namespace var

JointDist assemble_joint(const SourceModel& src, const AuxChannel& aux,
                         std::size_t cell_cap = kDefaultCellCap);

struct SourceBlock {
    Word s, t, e;
};

SourceBlock sample_iid(const SourceModel& src, std::size_t n, std::uint64_t seed);

}  // namespace hjscc

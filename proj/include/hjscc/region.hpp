#pragma once

// Single-letter evaluation of the inner-bound regions R1 and R2: rate
// feasibility, secret-key rates, the Phase-1 leakage lower bound and the
// distortions reached by the best symbol-wise reconstructions.

#include <cstddef>
#include <optional>
#include <vector>

#include "hjscc/dmc.hpp"
#include "hjscc/prob.hpp"

namespace hjscc {

// Absolute tolerance on every rate constraint.
inline constexpr double kSlackTol = 1e-9;
inline constexpr double kDefaultCapacityTol = 1e-9;

class DistortionMeasure {
public:
    DistortionMeasure(std::size_t source_size, std::size_t recon_size, std::vector<double> d);

    static DistortionMeasure hamming(std::size_t n);

    std::size_t source_size() const noexcept { return source_size_; }
    std::size_t recon_size() const noexcept { return recon_size_; }
    double operator()(std::size_t s, std::size_t s_hat) const { return d_[s * recon_size_ + s_hat]; }
    double max_value() const noexcept;
    std::vector<std::vector<double>> to_rows() const;

private:
    std::size_t source_size_;
    std::size_t recon_size_;
    std::vector<double> d_;
};

// Source, both channels and bandwidth expansions. Channel capacities are
// computed once at construction.
class ScenarioConfig {
public:
    ScenarioConfig(SourceModel src, Channel ch1, Channel ch2, double rho1, double rho2,
                   std::optional<DistortionMeasure> distortion = std::nullopt,
                   double capacity_tol = kDefaultCapacityTol);

    const SourceModel& src() const noexcept { return src_; }
    const Channel& ch1() const noexcept { return ch1_; }
    const Channel& ch2() const noexcept { return ch2_; }
    double rho1() const noexcept { return rho1_; }
    double rho2() const noexcept { return rho2_; }
    const DistortionMeasure& distortion() const noexcept { return distortion_; }
    double capacity_tol() const noexcept { return capacity_tol_; }

    double c1() const noexcept { return c1_; }
    double c2() const noexcept { return c2_; }
    double budget1() const noexcept { return rho1_ * c1_; }  // rho1 C1
    double budget2() const noexcept { return rho2_ * c2_; }  // rho2 C2

private:
    SourceModel src_;
    Channel ch1_;
    Channel ch2_;
    double rho1_;
    double rho2_;
    DistortionMeasure distortion_;
    double capacity_tol_;
    double c1_ = 0.0;
    double c2_ = 0.0;
};

// h1 : (U,E) -> S_hat and h2 : (W,V,T) -> S_hat as lookup tables.
struct Reconstructions {
    std::size_t u_size = 1, e_size = 1, w_size = 1, v_size = 1, t_size = 1;
    std::vector<Symbol> h1;  // index u * |E| + e
    std::vector<Symbol> h2;  // index (w * |V| + v) * |T| + t
    std::size_t zero_contexts = 0;  // contexts of zero mass, mapped to symbol 0

    Symbol phase1(std::size_t u, std::size_t e) const { return h1[u * e_size + e]; }
    Symbol phase2(std::size_t w, std::size_t v, std::size_t t) const {
        return h2[(w * v_size + v) * t_size + t];
    }
};

struct ReconstructionResult {
    Reconstructions maps;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Bayes-optimal symbol-wise reconstructions for the assembled (S,T,E,U,V,W)
// joint; ties go to the smallest reconstruction index.
ReconstructionResult optimal_reconstructions(const JointDist& joint, const DistortionMeasure& dm);

// Every information quantity the regions and the coding scheme need, in bits.
struct InfoTerms {
    double u_s_given_e = 0.0;     // I(U;S|E)
    double w_s_given_tuv = 0.0;   // I(W;S|T,U,V)
    double v_s_given_tu = 0.0;    // I(V;S|T,U)
    double v_t_given_eu = 0.0;    // I(V;T|E,U)
    double v_t_given_u = 0.0;     // I(V;T|U)
    double v_e_given_u = 0.0;     // I(V;E|U)
    double vw_s_given_tu = 0.0;   // I(V,W;S|T,U)
    double ue_s = 0.0;            // I(U,E;S)
    double s_e = 0.0;             // I(S;E)
    double u_s = 0.0;             // I(U;S)
    double v_s_given_u = 0.0;     // I(V;S|U)
    double w_s_given_uv = 0.0;    // I(W;S|U,V)
};

InfoTerms info_terms(const JointDist& joint);

struct KeyRates {
    double r_k1 = 0.0;  // channel-randomization key rate
    double r_k2 = 0.0;  // source-derived secret key rate
};

KeyRates key_rates(const InfoTerms& terms, double rho2c2);
KeyRates key_rates(const JointDist& joint, double rho2c2);

struct LeakageBound {
    double primary = 0.0;  // I(U,E;S) + [I(W;S|T,U,V) - R_K1 - R_K2]^+
    double remark = 0.0;   // I(U,E;S) + [I(V,W;S|T,U) - I(V;T|E,U) - rho2 C2]^+
    bool phase2_overloaded = false;  // rho2 C2 < I(V;S|T,U); the forms need not agree
};

LeakageBound leakage_lower_bound(const InfoTerms& terms, double rho2c2);
LeakageBound leakage_lower_bound(const JointDist& joint, double rho2c2);

enum class Region { R1, R2 };

// Margins (budget minus load) of every rate constraint; >= -tol means met.
struct Slack {
    double r1_phase1 = 0.0;  // rho1 C1 - I(U;S|E) - I(W;S|V,U,T)
    double r1_phase2 = 0.0;  // rho2 C2 - I(V;S|T,U)
    double r2_phase1 = 0.0;  // rho1 C1 - I(U;S|E)
    double r2_phase2 = 0.0;  // rho2 C2 - I(V;S|T,U)
    double r2_sum = 0.0;     // rho1 C1 + rho2 C2 - I(U;S|E) - I(W,V;S|T,U)
};

struct RegionPoint {
    InfoTerms terms;
    double r_k1 = 0.0;
    double r_k2 = 0.0;
    double leakage_lb = 0.0;
    double leakage_remark = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    bool feasible_r1 = false;
    bool feasible_r2 = false;
    Slack slack;
    Reconstructions recon;

    bool feasible(Region r) const noexcept { return r == Region::R1 ? feasible_r1 : feasible_r2; }
};

RegionPoint evaluate_point(const AuxChannel& aux, const ScenarioConfig& sc);
RegionPoint evaluate_point(const JointDist& joint, const ScenarioConfig& sc);

struct InclusionReport {
    RegionPoint point;
    bool violation = false;  // feasible under R1 but not under R2
};

InclusionReport check_inclusion(const AuxChannel& aux, const ScenarioConfig& sc);

// Structured auxiliaries: each of U, V, W either copies S or is constant.
// Alphabet sizes of zero pick the smallest that fits (|S| for a copy, 1 for a constant).
AuxChannel structured_aux(std::size_t s_size, bool u_copies_s, bool v_copies_s, bool w_copies_s,
                          std::size_t u_size = 0, std::size_t v_size = 0, std::size_t w_size = 0);

inline AuxChannel anchor_u_copy(std::size_t s_size) { return structured_aux(s_size, true, false, false); }
inline AuxChannel anchor_v_copy(std::size_t s_size) { return structured_aux(s_size, false, true, false); }
inline AuxChannel anchor_w_copy(std::size_t s_size) { return structured_aux(s_size, false, false, true); }

}  // namespace hjscc

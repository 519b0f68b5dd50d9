#include "hjscc/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjscc {

// ------------------------------------------------------- DistortionMeasure

DistortionMeasure::DistortionMeasure(std::size_t source_size, std::size_t recon_size,
                                     std::vector<double> d)
    : source_size_(source_size), recon_size_(recon_size), d_(std::move(d)) {
    if (source_size_ == 0 || recon_size_ == 0) {
        throw Error(Errc::InvalidArgument, "distortion alphabets must be nonempty");
    }
    if (d_.size() != source_size_ * recon_size_) {
        throw Error(Errc::AlphabetMismatch, "distortion matrix has the wrong shape");
    }
    for (double v : d_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(Errc::InvalidArgument, "distortion entries must be finite and nonnegative");
        }
    }
}

DistortionMeasure DistortionMeasure::hamming(std::size_t n) {
    std::vector<double> d(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
    return DistortionMeasure(n, n, std::move(d));
}

double DistortionMeasure::max_value() const noexcept {
    return *std::max_element(d_.begin(), d_.end());
}

std::vector<std::vector<double>> DistortionMeasure::to_rows() const {
    std::vector<std::vector<double>> rows(source_size_);
    for (std::size_t s = 0; s < source_size_; ++s) {
        rows[s].assign(d_.begin() + static_cast<std::ptrdiff_t>(s * recon_size_),
                       d_.begin() + static_cast<std::ptrdiff_t>((s + 1) * recon_size_));
    }
    return rows;
}

// ---------------------------------------------------------- ScenarioConfig

ScenarioConfig::ScenarioConfig(SourceModel src, Channel ch1, Channel ch2, double rho1,
                               double rho2, std::optional<DistortionMeasure> distortion,
                               double capacity_tol)
    : src_(std::move(src)),
      ch1_(std::move(ch1)),
      ch2_(std::move(ch2)),
      rho1_(rho1),
      rho2_(rho2),
      distortion_(distortion ? std::move(*distortion) : DistortionMeasure::hamming(src_.s_size())),
      capacity_tol_(capacity_tol) {
    if (!(rho1_ > 0.0) || !(rho2_ > 0.0) || !std::isfinite(rho1_) || !std::isfinite(rho2_)) {
        throw Error(Errc::InvalidArgument, "bandwidth expansions must be positive");
    }
    if (distortion_.source_size() != src_.s_size()) {
        throw Error(Errc::AlphabetMismatch, "distortion measure rows must match |S|");
    }
    c1_ = capacity(ch1_, capacity_tol_).capacity;
    c2_ = capacity(ch2_, capacity_tol_).capacity;
}

// --------------------------------------------------------- reconstructions

ReconstructionResult optimal_reconstructions(const JointDist& joint, const DistortionMeasure& dm) {
    if (joint.rank() != 6) {
        throw Error(Errc::InvalidArgument, "reconstructions need the assembled (S,T,E,U,V,W) joint");
    }
    const auto& ax = joint.axes();
    const std::size_t ns = ax[0].size, nt = ax[1].size, ne = ax[2].size;
    const std::size_t nu = ax[3].size, nv = ax[4].size, nw = ax[5].size;
    if (dm.source_size() != ns) throw Error(Errc::AlphabetMismatch, "distortion rows must match |S|");
    const std::size_t nr = dm.recon_size();

    ReconstructionResult res;
    auto& m = res.maps;
    m.u_size = nu;
    m.e_size = ne;
    m.w_size = nw;
    m.v_size = nv;
    m.t_size = nt;
    m.h1.assign(nu * ne, 0);
    m.h2.assign(nw * nv * nt, 0);

    // Marginal axes stay in ascending order: (S,E,U) and (S,T,V,W).
    const auto seu = joint.marginal_mass(var::S | var::E | var::U);
    const auto stvw = joint.marginal_mass(var::S | var::T | var::V | var::W);

    std::vector<double> cost(nr);
    auto pick = [&](auto&& mass_of_s, double& total) -> Symbol {
        double ctx = 0.0;
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t s = 0; s < ns; ++s) {
            const double p = mass_of_s(s);
            ctx += p;
            for (std::size_t r = 0; r < nr; ++r) cost[r] += p * dm(s, r);
        }
        if (!(ctx > 0.0)) {
            ++m.zero_contexts;
            return 0;
        }
        std::size_t best = 0;
        for (std::size_t r = 1; r < nr; ++r) {
            if (cost[r] < cost[best]) best = r;
        }
        total += cost[best];
        return static_cast<Symbol>(best);
    };

    for (std::size_t u = 0; u < nu; ++u) {
        for (std::size_t e = 0; e < ne; ++e) {
            m.h1[u * ne + e] = pick([&](std::size_t s) { return seu[(s * ne + e) * nu + u]; }, res.d1);
        }
    }
    for (std::size_t w = 0; w < nw; ++w) {
        for (std::size_t v = 0; v < nv; ++v) {
            for (std::size_t t = 0; t < nt; ++t) {
                m.h2[(w * nv + v) * nt + t] =
                    pick([&](std::size_t s) { return stvw[((s * nt + t) * nv + v) * nw + w]; }, res.d2);
            }
        }
    }
    return res;
}

// -------------------------------------------------------------- info terms

InfoTerms info_terms(const JointDist& joint) {
    if (joint.rank() != 6) {
        throw Error(Errc::InvalidArgument, "info terms need the assembled (S,T,E,U,V,W) joint");
    }
    using namespace var;
    EntropyCache h(joint);
    InfoTerms r;
    r.u_s_given_e = h.mi(U, S, E);
    r.w_s_given_tuv = h.mi(W, S, T | U | V);
    r.v_s_given_tu = h.mi(V, S, T | U);
    r.v_t_given_eu = h.mi(V, T, E | U);
    r.v_t_given_u = h.mi(V, T, U);
    r.v_e_given_u = h.mi(V, E, U);
    r.vw_s_given_tu = h.mi(V | W, S, T | U);
    r.ue_s = h.mi(U | E, S);
    r.s_e = h.mi(S, E);
    r.u_s = h.mi(U, S);
    r.v_s_given_u = h.mi(V, S, U);
    r.w_s_given_uv = h.mi(W, S, U | V);
    return r;
}

KeyRates key_rates(const InfoTerms& t, double rho2c2) {
    if (!(rho2c2 >= 0.0)) throw Error(Errc::InvalidArgument, "rho2 C2 must be nonnegative");
    KeyRates k;
    k.r_k2 = t.v_t_given_u - t.v_e_given_u;
    if (t.v_t_given_eu >= t.w_s_given_tuv) {
        k.r_k1 = 0.0;
    } else {
        k.r_k1 = std::min(rho2c2 - t.v_s_given_tu, t.w_s_given_tuv - t.v_t_given_eu);
    }
    return k;
}

KeyRates key_rates(const JointDist& joint, double rho2c2) {
    return key_rates(info_terms(joint), rho2c2);
}

LeakageBound leakage_lower_bound(const InfoTerms& t, double rho2c2) {
    const KeyRates k = key_rates(t, rho2c2);
    LeakageBound lb;
    lb.primary = t.ue_s + std::max(0.0, t.w_s_given_tuv - k.r_k1 - k.r_k2);
    lb.remark = t.ue_s + std::max(0.0, t.vw_s_given_tu - t.v_t_given_eu - rho2c2);
    lb.phase2_overloaded = rho2c2 < t.v_s_given_tu;
    return lb;
}

LeakageBound leakage_lower_bound(const JointDist& joint, double rho2c2) {
    return leakage_lower_bound(info_terms(joint), rho2c2);
}

// ------------------------------------------------------------- evaluation

RegionPoint evaluate_point(const JointDist& joint, const ScenarioConfig& sc) {
    RegionPoint p;
    p.terms = info_terms(joint);
    const auto& t = p.terms;
    const double b1 = sc.budget1(), b2 = sc.budget2();

    const KeyRates k = key_rates(t, b2);
    p.r_k1 = k.r_k1;
    p.r_k2 = k.r_k2;
    const LeakageBound lb = leakage_lower_bound(t, b2);
    p.leakage_lb = lb.primary;
    p.leakage_remark = lb.remark;

    auto rec = optimal_reconstructions(joint, sc.distortion());
    p.d1 = rec.d1;
    p.d2 = rec.d2;
    p.recon = std::move(rec.maps);

    auto& sl = p.slack;
    sl.r1_phase1 = b1 - (t.u_s_given_e + t.w_s_given_tuv);
    sl.r1_phase2 = b2 - t.v_s_given_tu;
    sl.r2_phase1 = b1 - t.u_s_given_e;
    sl.r2_phase2 = b2 - t.v_s_given_tu;
    sl.r2_sum = b1 + b2 - (t.u_s_given_e + t.vw_s_given_tu);

    p.feasible_r1 = sl.r1_phase1 >= -kSlackTol && sl.r1_phase2 >= -kSlackTol;
    // The sum constraint adds two tolerated constraints, so it carries twice the slack.
    p.feasible_r2 = sl.r2_phase1 >= -kSlackTol && sl.r2_phase2 >= -kSlackTol &&
                    sl.r2_sum >= -2.0 * kSlackTol;
    return p;
}

RegionPoint evaluate_point(const AuxChannel& aux, const ScenarioConfig& sc) {
    return evaluate_point(assemble_joint(sc.src(), aux), sc);
}

InclusionReport check_inclusion(const AuxChannel& aux, const ScenarioConfig& sc) {
    InclusionReport rep;
    rep.point = evaluate_point(aux, sc);
    rep.violation = rep.point.feasible_r1 && !rep.point.feasible_r2;
    return rep;
}

// ------------------------------------------------------------- structured

AuxChannel structured_aux(std::size_t ns, bool u_copy, bool v_copy, bool w_copy,
                          std::size_t nu, std::size_t nv, std::size_t nw) {
    if (nu == 0) nu = u_copy ? ns : 1;
    if (nv == 0) nv = v_copy ? ns : 1;
    if (nw == 0) nw = w_copy ? ns : 1;
    if ((u_copy && nu < ns) || (v_copy && nv < ns) || (w_copy && nw < ns)) {
        throw Error(Errc::InvalidArgument, "a copy of S needs an alphabet of at least |S| symbols");
    }
    std::vector<Symbol> umap(ns), vmap(nu * ns), wmap(nu * nv * ns);
    for (std::size_t s = 0; s < ns; ++s) umap[s] = u_copy ? static_cast<Symbol>(s) : 0;
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t s = 0; s < ns; ++s) vmap[u * ns + s] = v_copy ? static_cast<Symbol>(s) : 0;
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t v = 0; v < nv; ++v)
            for (std::size_t s = 0; s < ns; ++s)
                wmap[(u * nv + v) * ns + s] = w_copy ? static_cast<Symbol>(s) : 0;
    return AuxChannel(CondKernel::deterministic({ns}, nu, umap),
                      CondKernel::deterministic({nu, ns}, nv, vmap),
                      CondKernel::deterministic({nu, nv, ns}, nw, wmap));
}

}  // namespace hjscc

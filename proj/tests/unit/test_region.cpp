#include "doctest.h"

#include <cmath>

#include "closed_forms.hpp"
#include "hjscc/oracle.hpp"
#include "hjscc/region.hpp"
#include "hjscc/sampling.hpp"

using namespace hjscc;

namespace {

ScenarioConfig dsbs_scenario(double c1_cross, double c2_cross, double rho1 = 1.0, double rho2 = 1.0) {
    return ScenarioConfig(SourceModel::dsbs(0.1, 0.1), Channel::bsc(c1_cross), Channel::bsc(c2_cross), rho1, rho2);
}

const double kHt = ref::h2(0.1);
const double kSE = 1.0 - ref::h2(0.18);

}  // namespace

TEST_CASE("optimal reconstructions") {
    const auto dm = DistortionMeasure::hamming(2);

    SUBCASE("U copies S") {
        const auto r = optimal_reconstructions(assemble_joint(SourceModel::dsbs(0.1, 0.1), anchor_u_copy(2)), dm);
        for (std::size_t u = 0; u < 2; ++u)
            for (std::size_t e = 0; e < 2; ++e) CHECK(r.maps.phase1(u, e) == u);
        CHECK(r.d1 == doctest::Approx(0.0));
    }
    SUBCASE("side information equals the source") {
        const SourceModel src({0.5, 0.5}, CondKernel::identity(2), CondKernel::identity(2));
        const auto r = optimal_reconstructions(assemble_joint(src, AuxChannel::constant(2)), dm);
        CHECK(r.maps.phase1(0, 0) == 0);
        CHECK(r.maps.phase1(0, 1) == 1);
        CHECK(r.d1 == doctest::Approx(0.0));
    }
    SUBCASE("constants on the degraded pair") {
        const JointDist j = assemble_joint(SourceModel::dsbs(0.1, 0.1), AuxChannel::constant(2));
        const auto r = optimal_reconstructions(j, dm);
        CHECK(r.d1 == doctest::Approx(0.18).epsilon(1e-12));
        CHECK(r.d2 == doctest::Approx(0.1).epsilon(1e-12));
        // Enumeration of the induced maps.
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t c = 0; c < j.cells(); ++c) {
            const auto t = j.unravel(c);
            d1 += j.mass()[c] * (t[0] != r.maps.phase1(t[3], t[2]));
            d2 += j.mass()[c] * (t[0] != r.maps.phase2(t[5], t[4], t[1]));
        }
        CHECK(d1 == doctest::Approx(r.d1).epsilon(1e-12));
        CHECK(d2 == doctest::Approx(r.d2).epsilon(1e-12));
    }
}

TEST_CASE("key rate examples") {
    const SourceModel src = SourceModel::dsbs(0.1, 0.1);
    const auto none = key_rates(assemble_joint(src, anchor_u_copy(2)), 1.0);
    CHECK(none.r_k1 == 0.0);
    CHECK(std::abs(none.r_k2) <= 1e-12);

    const auto v = key_rates(assemble_joint(src, anchor_v_copy(2)), 1.0);
    CHECK(std::abs(v.r_k2 - (ref::h2(0.18) - kHt)) <= 1e-10);
    CHECK(std::abs(v.r_k2 - 0.2111) <= 1e-4);
    CHECK(v.r_k1 == 0.0);

    const auto w = key_rates(assemble_joint(src, anchor_w_copy(2)), 0.0);
    CHECK(std::abs(w.r_k1) <= 1e-12);
    CHECK(std::abs(w.r_k2) <= 1e-12);
}

TEST_CASE("leakage bound examples") {
    const SourceModel src = SourceModel::dsbs(0.1, 0.1);

    const auto u = leakage_lower_bound(assemble_joint(src, anchor_u_copy(2)), 1.0);
    CHECK(u.primary == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u.remark == doctest::Approx(1.0).epsilon(1e-12));

    const auto w = leakage_lower_bound(assemble_joint(src, anchor_w_copy(2)), 0.0);
    CHECK(std::abs(w.primary - (kSE + kHt)) <= 1e-10);
    CHECK(std::abs(w.primary - 0.7889) <= 1e-3);
    CHECK(std::abs(w.remark - w.primary) <= 1e-9);

    const auto v = leakage_lower_bound(assemble_joint(src, anchor_v_copy(2)), kHt + 0.01);
    CHECK(std::abs(v.primary - kSE) <= 1e-10);
    CHECK(std::abs(v.primary - 0.3199) <= 1e-3);
    CHECK(std::abs(v.remark - v.primary) <= 1e-9);
    CHECK_FALSE(v.phase2_overloaded);
}

TEST_CASE("R1 point examples") {
    const SourceModel src = SourceModel::dsbs(0.1, 0.1);

    const auto c = evaluate_point(AuxChannel::constant(2), dsbs_scenario(0.5, 0.5));
    CHECK(c.feasible_r1);
    CHECK(c.feasible_r2);
    CHECK(c.leakage_lb == doctest::Approx(kSE).epsilon(1e-12));

    const auto zero = evaluate_point(anchor_u_copy(2), dsbs_scenario(0.5, 0.0));
    CHECK_FALSE(zero.feasible_r1);
    // H(S|E) = h(0.18) is the shortfall on the Phase-1 constraint.
    CHECK(zero.slack.r1_phase1 == doctest::Approx(-ref::h2(0.18)).epsilon(1e-7));

    const auto v = evaluate_point(anchor_v_copy(2), dsbs_scenario(0.0, 0.0));
    CHECK(v.feasible_r1);
    CHECK(v.d2 == doctest::Approx(0.0));
    CHECK(std::abs(v.leakage_lb - 0.3199) <= 1e-3);
}

TEST_CASE("R2 point examples") {
    // W copies S, zero Phase-2 budget: sum constraint 0.4690 against rho1 C1.
    const SourceModel src = SourceModel::dsbs(0.1, 0.1);
    const ScenarioConfig ok(src, Channel::bsc(0.0), Channel::bsc(0.5), 1.0, 1.0);
    const auto a = evaluate_point(anchor_w_copy(2), ok);
    CHECK(a.feasible_r1);
    CHECK(a.feasible_r2);

    const ScenarioConfig tight(src, Channel::bsc(0.0), Channel::bsc(0.5), 0.3, 1.0);
    const auto b = evaluate_point(anchor_w_copy(2), tight);
    CHECK_FALSE(b.feasible_r2);
    CHECK_FALSE(b.feasible_r1);
    CHECK(b.slack.r2_sum == doctest::Approx(0.3 - kHt).epsilon(1e-7));
}

TEST_CASE("inclusion report on a capacity-starved scenario") {
    // V carries S; Phase 2 cannot hold it under R1 but the sum constraint of R2 can.
    const SourceModel src = SourceModel::dsbs(0.1, 0.1);
    const ScenarioConfig sc(src, Channel::bsc(0.0), Channel::bsc(0.5), 1.0, 1.0);
    const auto rep = check_inclusion(anchor_v_copy(2), sc);
    CHECK_FALSE(rep.violation);
    CHECK_FALSE(rep.point.feasible_r1);
    CHECK_FALSE(rep.point.feasible_r2);  // the per-phase V constraint is shared by both regions
    CHECK(check_inclusion(AuxChannel::constant(2), sc).point.feasible_r2);
}

TEST_CASE("region invariants on random inputs") {
    Rng rng(99);
    int compared = 0;
    for (int i = 0; i < 400; ++i) {
        const ScenarioConfig sc = random_binary_scenario(rng);
        const AuxChannel aux = random_aux(2, 1 + i % 3, 1 + (i / 3) % 3, 1 + (i / 9) % 3, rng);
        const JointDist j = assemble_joint(sc.src(), aux);
        const auto terms = info_terms(j);
        const auto lb = leakage_lower_bound(terms, sc.budget2());
        const auto kr = key_rates(terms, sc.budget2());

        CHECK(lb.primary >= terms.ue_s - 1e-10);
        const bool no_excess = terms.w_s_given_tuv <= kr.r_k1 + kr.r_k2 + 1e-9;
        if (no_excess) CHECK(std::abs(lb.primary - terms.ue_s) <= 1e-9);
        CHECK(kr.r_k2 >= -1e-10);
        CHECK(std::abs(terms.v_t_given_u - terms.v_e_given_u - terms.v_t_given_eu) <= 1e-10);

        if (sc.budget2() >= terms.v_s_given_tu) {
            CHECK(std::abs(lb.primary - lb.remark) <= 1e-9);
            ++compared;
        }

        const auto rep = check_inclusion(aux, sc);
        CHECK_FALSE(rep.violation);
        CHECK(rep.point.d1 >= 0.0);
        CHECK(rep.point.d2 >= 0.0);

        // Bit-for-bit determinism.
        const auto again = evaluate_point(aux, sc);
        CHECK(again.leakage_lb == rep.point.leakage_lb);
        CHECK(again.d1 == rep.point.d1);
    }
    CHECK(compared > 100);
}

TEST_CASE("anchor terms agree with direct summation") {
    const SourceModel src = SourceModel::dsbs(0.1, 0.1);
    const JointDist j = assemble_joint(src, anchor_v_copy(2));
    const auto t = info_terms(j);
    CHECK(t.v_s_given_tu == doctest::Approx(oracle::brute_mi(j, {"V"}, {"S"}, {"T", "U"})).epsilon(1e-10));
    CHECK(t.ue_s == doctest::Approx(oracle::brute_mi(j, {"U", "E"}, {"S"})).epsilon(1e-10));
    CHECK(t.s_e == doctest::Approx(kSE).epsilon(1e-10));
}

TEST_CASE("structured auxiliaries and distortion measure checks") {
    const AuxChannel a = structured_aux(3, true, false, true);
    CHECK(a.u_size() == 3);
    CHECK(a.v_size() == 1);
    CHECK(a.w_size() == 3);
    CHECK_THROWS_AS(DistortionMeasure(2, 2, {0.0, -1.0, 1.0, 0.0}), Error);
    CHECK(DistortionMeasure::hamming(3).max_value() == 1.0);
}

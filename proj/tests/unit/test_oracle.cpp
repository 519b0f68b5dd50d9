#include "doctest.h"

#include <cmath>
#include <optional>
#include <set>

#include "closed_forms.hpp"
#include "hjscc/oracle.hpp"
#include "hjscc/sampling.hpp"

using namespace hjscc;
using namespace hjscc::codec;

namespace {

SimParams sim(std::size_t n, double delta, std::uint64_t seed = 1) {
    SimParams sp;
    sp.n = n;
    sp.delta = delta;
    sp.seed = seed;
    return sp;
}

ScenarioConfig dsbs_bsc() {
    return ScenarioConfig(SourceModel::dsbs(0.1, 0.1), Channel::bsc(0.11), Channel::bsc(0.11), 1.0, 1.0);
}

AuxChannel noisy_v_aux(double q) {
    return AuxChannel(CondKernel({2}, 1, {1.0, 1.0}), CondKernel({1, 2}, 2, {1 - q, q, q, 1 - q}),
                      CondKernel::deterministic({1, 2, 2}, 2, std::vector<Symbol>{0, 1, 0, 1}));
}

}  // namespace

TEST_CASE("brute-force mutual information") {
    const JointDist j = assemble_joint(SourceModel::dsbs(0.1, 0.1), anchor_v_copy(2));
    CHECK(std::abs(oracle::brute_mi(j, {"S"}, {"E"}, {"T"})) <= 1e-12);

    const JointDist x({{"X", 3}, {"Y", 1}}, {0.2, 0.3, 0.5});
    const JointDist xx({{"X", 3}, {"X2", 3}}, {0.2, 0, 0, 0, 0.3, 0, 0, 0, 0.5});
    CHECK(oracle::brute_mi(xx, {"X"}, {"X2"}) == doctest::Approx(entropy(x, {"X"})).epsilon(1e-12));

    oracle::EnumerationBudget tiny;
    tiny.max_states = 8;
    try {
        oracle::brute_mi(j, {"S"}, {"T"}, {}, tiny);
        FAIL("budget not enforced");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BudgetExceeded);
    }
}

TEST_CASE("brute-force and entropy-based values agree on random queries") {
    Rng rng(31);
    const std::vector<std::string> names{"S", "T", "E", "U", "V", "W"};
    for (int q = 0; q < 100; ++q) {
        const JointDist j = assemble_joint(random_source(2 + q % 2, 2, 2, rng), random_aux(2 + q % 2, 2, 2, 2, rng));
        // Random disjoint (a, b, c) with a and b nonempty.
        std::vector<int> role(6);
        for (auto& r : role) r = static_cast<int>(rng() % 4);
        role[q % 6] = 0;
        role[(q + 1 + q / 6 % 5) % 6] = 1;
        AxisList a, b, c;
        for (int i = 0; i < 6; ++i) {
            if (role[i] == 0) a.push_back(names[i]);
            if (role[i] == 1) b.push_back(names[i]);
            if (role[i] == 2) c.push_back(names[i]);
        }
        CHECK(std::abs(oracle::brute_mi(j, a, b, c) - cond_mutual_info(j, a, b, c)) <= 1e-10);
    }
}

TEST_CASE("source-only leakage is single-letter for i.i.d. blocks") {
    const SourceModel src = SourceModel::dsbs(0.1, 0.1);
    for (std::size_t n : {1, 2, 3, 5})
        CHECK(oracle::source_eve_leakage(src, n) == doctest::Approx(1.0 - ref::h2(0.18)).epsilon(1e-10));
}

TEST_CASE("exact leakage examples") {
    SUBCASE("constant payload, eavesdropper independent of the source") {
        const SourceModel src({0.5, 0.5}, CondKernel::identity(2), CondKernel({2}, 2, {0.5, 0.5, 0.5, 0.5}));
        const ScenarioConfig sc(src, Channel::bsc(0.1), Channel::bsc(0.1), 1.0, 1.0);
        const auto cb = build_codebooks(AuxChannel::constant(2), sc, sim(3, 0.3));
        CHECK(std::abs(oracle::exact_leakage(cb)) <= 1e-12);
    }
    SUBCASE("a noiselessly delivered copy reveals everything") {
        const SourceModel src({0.5, 0.5}, CondKernel::identity(2), CondKernel({2}, 1, {1.0, 1.0}));
        const ScenarioConfig sc(src, Channel::identity(2), Channel::identity(2), 1.0, 1.0);
        // The first codebook seed whose book holds all four source words.
        std::optional<CodebookSet> found;
        for (std::uint64_t seed = 1; seed <= 50 && !found; ++seed) {
            auto cb = build_codebooks(anchor_u_copy(2), sc, sim(2, 0.9, seed));
            std::set<Word> covered;
            for (std::size_t j = 0; j < cb.sizes.u.words; ++j) {
                const auto w = cb.u_word(j);
                covered.insert(Word(w.begin(), w.end()));
            }
            if (covered.size() == 4) found = std::move(cb);
        }
        REQUIRE(found);
        const CodebookSet& cb = *found;
        REQUIRE_FALSE(cb.sizes.phase1_overflow);
        CHECK(oracle::exact_leakage(cb) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("anchor with a key, small block") {
        const auto cb = build_codebooks(anchor_v_copy(2), dsbs_bsc(), sim(4, 0.3));
        const auto rep = oracle::oracle_report(cb);
        CHECK(rep.leakage_exact <= rep.leakage_bound + 0.15);
        CHECK(rep.leakage_exact >= oracle::source_eve_leakage(cb.scenario.src(), 4) - 1e-9);
        CHECK(rep.gap == doctest::Approx(rep.leakage_exact - rep.leakage_bound));
        CHECK(rep.n == 4);
    }
}

TEST_CASE("exact leakage never drops below the source-only term") {
    Rng rng(77);
    for (int i = 0; i < 6; ++i) {
        const ScenarioConfig sc = random_binary_scenario(rng);
        const AuxChannel aux = random_aux(2, 2, 2, 2, rng);
        SimParams sp = sim(3, 0.4, 100 + i);
        const auto cb = build_codebooks(aux, sc, sp);
        CHECK(oracle::exact_leakage(cb) >= oracle::source_eve_leakage(sc.src(), 3) - 1e-9);
    }
}

TEST_CASE("secure index") {
    const auto trivial = build_codebooks(anchor_u_copy(2), dsbs_bsc(), sim(4, 0.3));
    CHECK(oracle::secure_index(trivial) == 0.0);

    for (std::uint64_t seed : {1, 2, 3}) {
        const auto cb = build_codebooks(noisy_v_aux(0.2), dsbs_bsc(), sim(4, 0.3, seed));
        REQUIRE(cb.sizes.n_k2 > 1);
        const double si = oracle::secure_index(cb);
        CHECK(si >= 0.0);
        CHECK(si <= std::log2(static_cast<double>(cb.sizes.n_k2)) + 1e-12);
    }

    oracle::EnumerationBudget tiny;
    tiny.max_states = 16;
    const auto cb = build_codebooks(anchor_v_copy(2), dsbs_bsc(), sim(4, 0.3));
    CHECK_THROWS_AS(oracle::secure_index(cb, tiny), Error);
    CHECK_THROWS_AS(oracle::exact_leakage(cb, tiny), Error);
}

#pragma once

// Monte Carlo implementation of the two-phase layered coding scheme:
// nested random codebooks with binning, typicality encoding, a seeded key
// table, one-time-pad encryption of the W-bin index and two-stage decoding.
//
// Index conventions: payload fields (bins, keys, ciphertexts) are 1-based;
// word indices into books are 0-based.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "hjscc/dmc.hpp"
#include "hjscc/prob.hpp"
#include "hjscc/random.hpp"
#include "hjscc/region.hpp"

namespace hjscc::codec {

enum class ChannelMode { IdealPipe, RandomCode };

struct SimParams {
    std::size_t n = 8;
    double delta = 0.3;
    ChannelMode mode = ChannelMode::IdealPipe;
    std::uint64_t seed = 1;
    double max_words = 16'777'216.0;  // cap on the total number of stored codewords

    void validate() const;
};

// Additive strong typicality: every tuple a has |N(a)/n - P(a)| <= delta,
// and tuples of zero probability never occur.
class TypicalityTest {
public:
    TypicalityTest() = default;
    TypicalityTest(std::vector<std::size_t> sizes, std::vector<double> p, double delta);

    // Largest deviation |N(a)/n - P(a)| over all tuples; +inf when a
    // zero-probability tuple occurs. One word per axis, equal lengths.
    double deviation(std::initializer_list<std::span<const Symbol>> words) const;
    bool operator()(std::initializer_list<std::span<const Symbol>> words) const {
        return deviation(words) <= delta_ + 1e-12;
    }
    double delta() const noexcept { return delta_; }

private:
    std::vector<std::size_t> sizes_;
    std::vector<double> p_;
    double delta_ = 0.0;
};

struct LayerSize {
    std::size_t words = 1;
    std::size_t bins = 1;
    bool collapsed = false;  // layer is a function of its parents: one word, one bin

    std::size_t per_bin() const noexcept { return (words + bins - 1) / bins; }
    std::size_t bin_of(std::size_t j) const noexcept { return j % bins; }
    std::size_t within_of(std::size_t j) const noexcept { return j / bins; }
};

struct BookSizes {
    std::size_t n = 0, n1 = 0, n2 = 0;
    LayerSize u, v, w;
    std::size_t n_k1 = 1, n_k2 = 1;
    std::size_t pad_modulus = 1;  // min(N_K1 N_K2, N_W)
    std::size_t n_b2 = 1;         // ceil(N_W / pad_modulus)
    double r_k1 = 0.0, r_k2 = 0.0;
    double phase1_bits = 0.0;     // log2 of the Phase-1 payload range
    double phase2_bits = 0.0;
    bool phase1_overflow = false; // payload too large for the ideal pipe
    bool phase2_overflow = false;
    double total_words = 0.0;

    std::size_t n_k() const noexcept { return n_k1 * n_k2; }
    std::size_t phase1_range() const noexcept { return u.bins * pad_modulus * n_b2; }
    std::size_t phase2_range() const noexcept { return v.bins * n_k1; }
};

// Book sizes for the given auxiliary without drawing any words. Throws
// SIZE_EXPLOSION (message carries the largest feasible n) above the word cap.
BookSizes compute_book_sizes(const AuxChannel& aux, const ScenarioConfig& sc, const SimParams& sp);

struct CodebookSet {
    ScenarioConfig scenario;
    AuxChannel aux;
    SimParams params;
    BookSizes sizes;
    Reconstructions recon;

    std::vector<Symbol> u_words{};   // [u][i]
    std::vector<Symbol> v_words{};   // [u][v][i]
    std::vector<Symbol> w_words{};   // [u][v][w][i]
    std::vector<std::uint32_t> key_table{};  // [u][v-bin][within] -> 1..N_K2
    std::vector<Symbol> x1_words{};  // [payload][i], RandomCode only
    std::vector<Symbol> x2_words{};
    std::vector<double> x1_input{}, x2_input{};

    // Axis order of each test follows (S,T,E,U,V,W).
    TypicalityTest enc_u{};  // (s,u)
    TypicalityTest enc_v{};  // (s,u,v)
    TypicalityTest enc_w{};  // (s,u,v,w)
    TypicalityTest dec_u{};  // (e,u)
    TypicalityTest dec_v{};  // (t,u,v)
    TypicalityTest dec_w{};  // (t,u,v,w)
    TypicalityTest ch1{};    // (x,y)
    TypicalityTest ch2{};

    std::span<const Symbol> u_word(std::size_t u) const;
    std::span<const Symbol> v_word(std::size_t u, std::size_t v) const;
    std::span<const Symbol> w_word(std::size_t u, std::size_t v, std::size_t w) const;
    std::uint32_t key(std::size_t u, std::size_t v_bin, std::size_t within) const;
};

CodebookSet build_codebooks(const AuxChannel& aux, const ScenarioConfig& sc, const SimParams& sp);

// One-time pad on [1..modulus]: c = (b + k - 2) mod N + 1 and its inverse.
std::uint64_t otp_encrypt(std::uint64_t b, std::uint64_t k, std::uint64_t modulus);
std::uint64_t otp_decrypt(std::uint64_t c, std::uint64_t k, std::uint64_t modulus);

struct Phase1Payload {
    std::uint64_t u_bin = 1;       // U bin
    std::uint64_t cipher = 1;      // encrypted low part of the W bin
    std::uint64_t w_bin_high = 1;  // clear high part of the W bin

    auto operator<=>(const Phase1Payload&) const = default;
};

struct Phase2Payload {
    std::uint64_t v_bin = 1;       // V bin
    std::uint64_t randomizer = 1;  // channel-randomization key

    auto operator<=>(const Phase2Payload&) const = default;
};

struct Encoding {
    Phase1Payload p1;
    Phase2Payload p2;
    std::size_t u = 0, v = 0, w = 0;  // chosen word indices
    std::uint64_t source_key = 1;     // key derived from the V layer
    std::uint64_t w_bin_low = 1;      // plaintext low part of the W bin
    bool error = false;               // some layer had no typical word
};

// Deterministic given the channel-randomization key in [1..N_K1].
Encoding encode(std::span<const Symbol> s, const CodebookSet& cb, std::uint64_t randomizer);
Encoding encode(std::span<const Symbol> s, const CodebookSet& cb, Rng& rng);

struct Phase1State {
    std::optional<Phase1Payload> payload;  // empty when the phase was erased
    std::size_t u = 0;
    Word s_hat;
    bool failed = false;  // erasure, or zero or several typical candidates
};

Phase1State decode_phase1(const std::optional<Phase1Payload>& p1, std::span<const Symbol> e,
                          const CodebookSet& cb);

struct Phase2Result {
    std::size_t v = 0, w = 0;
    std::uint64_t source_key = 1;
    std::uint64_t w_bin_low = 1;
    Word s_hat;
    bool failed = false;
};

// key_override replaces the key-table lookup (used to inject a wrong key).
Phase2Result decode_phase2(const std::optional<Phase2Payload>& p2, std::span<const Symbol> t,
                           const Phase1State& st, const CodebookSet& cb,
                           std::optional<std::uint64_t> key_override = std::nullopt);

struct TrialRecord {
    std::size_t trial = 0;
    SourceBlock block;
    Encoding enc;
    Phase1State dec1;
    Phase2Result dec2;
    bool overflow1 = false, overflow2 = false;
    double d1 = 0.0, d2 = 0.0;
};

TrialRecord run_trial(const CodebookSet& cb, std::size_t trial);

struct ExperimentSummary {
    std::size_t trials = 0;
    double mean_d1 = 0.0, mean_d2 = 0.0;
    double enc_err_rate = 0.0;
    double dec1_err_rate = 0.0, dec2_err_rate = 0.0;
    double overflow1_rate = 0.0, overflow2_rate = 0.0;
    double region_d1 = 0.0, region_d2 = 0.0, region_leakage = 0.0;
    BookSizes sizes;
};

struct TrialRow {
    std::size_t trial;
    bool enc_err, dec1_err, dec2_err;
    double d1, d2;
};

ExperimentSummary run_experiment(const CodebookSet& cb, std::size_t trials, std::size_t threads = 1,
                                 std::vector<TrialRow>* rows = nullptr);
ExperimentSummary run_experiment(const AuxChannel& aux, const ScenarioConfig& sc,
                                 const SimParams& sp, std::size_t trials, std::size_t threads = 1,
                                 std::vector<TrialRow>* rows = nullptr);

}  // namespace hjscc::codec

#include "hjscc/codec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace hjscc::codec {

void SimParams::validate() const {
    if (n == 0) throw Error(Errc::InvalidArgument, "block length n must be at least 1");
    if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::InvalidArgument, "delta must lie in (0, 1)");
    if (!(max_words >= 1.0)) throw Error(Errc::InvalidArgument, "max_words must be at least 1");
}

// ---------------------------------------------------------------- typicality

TypicalityTest::TypicalityTest(std::vector<std::size_t> sizes, std::vector<double> p, double delta)
    : sizes_(std::move(sizes)), p_(std::move(p)), delta_(delta) {
    std::size_t cells = 1;
    for (auto s : sizes_) cells *= s;
    if (cells != p_.size()) throw Error(Errc::AlphabetMismatch, "typicality table has the wrong shape");
}

double TypicalityTest::deviation(std::initializer_list<std::span<const Symbol>> words) const {
    if (words.size() != sizes_.size()) {
        throw Error(Errc::InvalidArgument, "typicality test needs one word per axis");
    }
    const std::size_t n = words.begin()->size();
    thread_local std::vector<std::uint32_t> counts;
    counts.assign(p_.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t idx = 0, a = 0;
        for (const auto& w : words) idx = idx * sizes_[a++] + w[i];
        if (p_[idx] <= 0.0) return std::numeric_limits<double>::infinity();
        ++counts[idx];
    }
    double worst = 0.0;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t c = 0; c < p_.size(); ++c) {
        worst = std::max(worst, std::abs(counts[c] * inv - p_[c]));
    }
    return worst;
}

// ---------------------------------------------------------------- book sizes

namespace {

double ceil_pow2(double exponent) { return std::ceil(std::exp2(exponent) - 1e-9); }

struct LayerInfo {
    double word_exp, bin_exp;
    bool collapsed;
};

struct RawSizes {
    double u_words, u_bins, v_words, v_bins, w_words, w_bins;
    double n_k1, n_k2;
};

RawSizes raw_sizes(const LayerInfo& u, const LayerInfo& v, const LayerInfo& w, double rk1,
                   double rk2, std::size_t n) {
    const double nn = static_cast<double>(n);
    auto layer = [&](const LayerInfo& l, double& words, double& bins) {
        if (l.collapsed) {
            words = bins = 1.0;
            return;
        }
        words = ceil_pow2(nn * l.word_exp);
        bins = std::min(words, ceil_pow2(nn * l.bin_exp));
    };
    RawSizes r{};
    layer(u, r.u_words, r.u_bins);
    layer(v, r.v_words, r.v_bins);
    layer(w, r.w_words, r.w_bins);
    r.n_k1 = ceil_pow2(nn * rk1);
    r.n_k2 = ceil_pow2(nn * rk2);
    return r;
}

double total_words(const RawSizes& r, bool random_code, double pad) {
    double total = r.u_words * (1.0 + r.v_words * (1.0 + r.w_words));
    if (random_code) {
        const double nb2 = std::ceil(r.w_bins / pad);
        total += r.u_bins * pad * nb2 + r.v_bins * r.n_k1;
    }
    return total;
}

}  // namespace

BookSizes compute_book_sizes(const AuxChannel& aux, const ScenarioConfig& sc, const SimParams& sp) {
    sp.validate();
    const JointDist joint = assemble_joint(sc.src(), aux);
    const InfoTerms t = info_terms(joint);
    EntropyCache h(joint);
    using namespace var;
    const double d = sp.delta;
    constexpr double kZero = 1e-12;
    const LayerInfo lu{t.u_s + d, t.u_s_given_e + 2 * d, h.entropy(U) <= kZero};
    const LayerInfo lv{t.v_s_given_u + 2 * d, t.v_s_given_tu + 2 * d,
                       h.entropy(U | V) - h.entropy(U) <= kZero};
    const LayerInfo lw{t.w_s_given_uv + 2 * d, t.w_s_given_tuv + 2 * d,
                       h.entropy(U | V | W) - h.entropy(U | V) <= kZero};
    const KeyRates kr = key_rates(t, sc.budget2());
    const double rk1 = std::max(0.0, kr.r_k1), rk2 = std::max(0.0, kr.r_k2);
    const bool random_code = sp.mode == ChannelMode::RandomCode;

    auto words_at = [&](std::size_t n) {
        const RawSizes r = raw_sizes(lu, lv, lw, rk1, rk2, n);
        const double pad = std::min(r.n_k1 * r.n_k2, r.w_bins);
        return total_words(r, random_code, pad);
    };

    const double total = words_at(sp.n);
    if (!(total <= sp.max_words)) {
        std::size_t best = 0;
        for (std::size_t m = sp.n; m-- > 1;) {
            if (words_at(m) <= sp.max_words) {
                best = m;
                break;
            }
        }
        throw Error(Errc::SizeExplosion,
                    "codebooks need " + std::to_string(total) + " words at n=" + std::to_string(sp.n) +
                        " (cap " + std::to_string(sp.max_words) + "); " +
                        (best ? "largest feasible n is " + std::to_string(best)
                              : std::string("no n fits; lower delta or raise the cap")));
    }

    const RawSizes r = raw_sizes(lu, lv, lw, rk1, rk2, sp.n);
    BookSizes z;
    z.n = sp.n;
    z.n1 = static_cast<std::size_t>(std::ceil(sc.rho1() * static_cast<double>(sp.n) - 1e-9));
    z.n2 = static_cast<std::size_t>(std::ceil(sc.rho2() * static_cast<double>(sp.n) - 1e-9));
    auto as_layer = [](double words, double bins, bool collapsed) {
        return LayerSize{static_cast<std::size_t>(words), static_cast<std::size_t>(bins), collapsed};
    };
    z.u = as_layer(r.u_words, r.u_bins, lu.collapsed);
    z.v = as_layer(r.v_words, r.v_bins, lv.collapsed);
    z.w = as_layer(r.w_words, r.w_bins, lw.collapsed);
    z.r_k1 = rk1;
    z.r_k2 = rk2;
    z.n_k1 = static_cast<std::size_t>(r.n_k1);
    z.n_k2 = static_cast<std::size_t>(r.n_k2);
    z.pad_modulus = std::min(z.n_k(), z.w.bins);
    z.n_b2 = (z.w.bins + z.pad_modulus - 1) / z.pad_modulus;
    z.total_words = total;

    const double nd = static_cast<double>(sp.n);
    z.phase1_bits = std::log2(static_cast<double>(z.u.bins)) +
                    std::log2(static_cast<double>(z.pad_modulus)) +
                    std::log2(static_cast<double>(z.n_b2));
    z.phase2_bits = std::log2(static_cast<double>(z.v.bins)) + std::log2(static_cast<double>(z.n_k1));
    // Allowance for the 2-delta bin slack of each layer and for rounding up.
    z.phase1_overflow = z.phase1_bits > static_cast<double>(z.n1) * sc.c1() + 4.0 * d * nd + 3.0;
    z.phase2_overflow = z.phase2_bits > static_cast<double>(z.n2) * sc.c2() + 2.0 * d * nd + 2.0;
    return z;
}

// ------------------------------------------------------------------ books

std::span<const Symbol> CodebookSet::u_word(std::size_t u) const {
    const std::size_t n = sizes.n;
    return {u_words.data() + u * n, n};
}

std::span<const Symbol> CodebookSet::v_word(std::size_t u, std::size_t v) const {
    const std::size_t n = sizes.n;
    return {v_words.data() + (u * sizes.v.words + v) * n, n};
}

std::span<const Symbol> CodebookSet::w_word(std::size_t u, std::size_t v, std::size_t w) const {
    const std::size_t n = sizes.n;
    return {w_words.data() + ((u * sizes.v.words + v) * sizes.w.words + w) * n, n};
}

std::uint32_t CodebookSet::key(std::size_t u, std::size_t v_bin, std::size_t within) const {
    return key_table[(u * sizes.v.bins + v_bin) * sizes.v.per_bin() + within];
}

namespace {

// P(child | parent) rows from a marginal laid out as [parent][child];
// parents of zero mass get a uniform row.
std::vector<double> conditional_rows(const std::vector<double>& joint, std::size_t child) {
    std::vector<double> out(joint);
    for (std::size_t r = 0; r < out.size() / child; ++r) {
        double z = 0.0;
        for (std::size_t c = 0; c < child; ++c) z += out[r * child + c];
        for (std::size_t c = 0; c < child; ++c) {
            out[r * child + c] = z > 0.0 ? out[r * child + c] / z : 1.0 / static_cast<double>(child);
        }
    }
    return out;
}

TypicalityTest table(const JointDist& joint, std::uint64_t mask, double delta) {
    std::vector<std::size_t> sizes;
    for (std::size_t a = 0; a < joint.rank(); ++a) {
        if (mask & (std::uint64_t{1} << a)) sizes.push_back(joint.axes()[a].size);
    }
    return TypicalityTest(std::move(sizes), joint.marginal_mass(mask), delta);
}

TypicalityTest channel_table(const Channel& ch, const std::vector<double>& input, double delta) {
    const std::size_t nx = ch.input_size(), ny = ch.output_size();
    std::vector<double> p(nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) p[x * ny + y] = input[x] * ch(x, y);
    return TypicalityTest({nx, ny}, std::move(p), delta);
}

void draw_channel_book(std::vector<Symbol>& book, std::size_t count, std::size_t len,
                       const std::vector<double>& input, Rng& rng) {
    book.resize(count * len);
    for (auto& x : book) x = static_cast<Symbol>(draw_index(input, rng));
}

}  // namespace

CodebookSet build_codebooks(const AuxChannel& aux, const ScenarioConfig& sc, const SimParams& sp) {
    const BookSizes z = compute_book_sizes(aux, sc, sp);
    const JointDist joint = assemble_joint(sc.src(), aux);
    CodebookSet cb{sc, aux, sp, z, optimal_reconstructions(joint, sc.distortion()).maps};

    using namespace var;
    const std::size_t n = sp.n, nv = aux.v_size(), nw = aux.w_size();
    const auto p_u = joint.marginal_mass(U);
    const auto p_v_u = conditional_rows(joint.marginal_mass(U | V), nv);
    const auto p_w_uv = conditional_rows(joint.marginal_mass(U | V | W), nw);

    Rng rng(derive_seed(sp.seed, 0));
    cb.u_words.resize(z.u.words * n);
    for (auto& x : cb.u_words) x = static_cast<Symbol>(draw_index(p_u, rng));

    cb.v_words.resize(z.u.words * z.v.words * n);
    for (std::size_t u = 0; u < z.u.words; ++u) {
        const auto uw = cb.u_word(u);
        for (std::size_t v = 0; v < z.v.words; ++v) {
            Symbol* out = cb.v_words.data() + (u * z.v.words + v) * n;
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = static_cast<Symbol>(
                    draw_index(std::span<const double>(p_v_u).subspan(uw[i] * nv, nv), rng));
            }
        }
    }

    cb.w_words.resize(z.u.words * z.v.words * z.w.words * n);
    for (std::size_t u = 0; u < z.u.words; ++u) {
        const auto uw = cb.u_word(u);
        for (std::size_t v = 0; v < z.v.words; ++v) {
            const auto vw = cb.v_word(u, v);
            for (std::size_t w = 0; w < z.w.words; ++w) {
                Symbol* out = cb.w_words.data() + ((u * z.v.words + v) * z.w.words + w) * n;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t ctx = uw[i] * nv + vw[i];
                    out[i] = static_cast<Symbol>(
                        draw_index(std::span<const double>(p_w_uv).subspan(ctx * nw, nw), rng));
                }
            }
        }
    }

    cb.key_table.resize(z.u.words * z.v.bins * z.v.per_bin());
    std::uniform_int_distribution<std::uint32_t> key_dist(1, static_cast<std::uint32_t>(z.n_k2));
    for (auto& k : cb.key_table) k = key_dist(rng);

    const double d = sp.delta;
    cb.enc_u = table(joint, S | U, d);
    cb.enc_v = table(joint, S | U | V, d);
    cb.enc_w = table(joint, S | U | V | W, d);
    cb.dec_u = table(joint, E | U, d);
    cb.dec_v = table(joint, T | U | V, d);
    cb.dec_w = table(joint, T | U | V | W, d);

    if (sp.mode == ChannelMode::RandomCode) {
        cb.x1_input = capacity(sc.ch1(), sc.capacity_tol()).input_dist;
        cb.x2_input = capacity(sc.ch2(), sc.capacity_tol()).input_dist;
        draw_channel_book(cb.x1_words, z.phase1_range(), z.n1, cb.x1_input, rng);
        draw_channel_book(cb.x2_words, z.phase2_range(), z.n2, cb.x2_input, rng);
        cb.ch1 = channel_table(sc.ch1(), cb.x1_input, d);
        cb.ch2 = channel_table(sc.ch2(), cb.x2_input, d);
    }
    return cb;
}

// -------------------------------------------------------------------- OTP

std::uint64_t otp_encrypt(std::uint64_t b, std::uint64_t k, std::uint64_t modulus) {
    if (modulus == 0 || b < 1 || b > modulus || k < 1 || k > modulus) {
        throw Error(Errc::InvalidArgument, "pad operands must lie in [1, modulus]");
    }
    return (b + k - 2) % modulus + 1;
}

std::uint64_t otp_decrypt(std::uint64_t c, std::uint64_t k, std::uint64_t modulus) {
    if (modulus == 0 || c < 1 || c > modulus || k < 1 || k > modulus) {
        throw Error(Errc::InvalidArgument, "pad operands must lie in [1, modulus]");
    }
    return (c + modulus - k) % modulus + 1;
}

// ---------------------------------------------------------------- encoder

namespace {

// Reduces the full key (randomizer, source_key) in [1..N_K1 N_K2] onto the pad modulus.
std::uint64_t pad_key(const BookSizes& z, std::uint64_t randomizer, std::uint64_t source_key) {
    const std::uint64_t k = (randomizer - 1) * z.n_k2 + source_key;
    return (k - 1) % z.pad_modulus + 1;
}

template <class Typical>
std::size_t first_typical(std::size_t count, Typical&& typical, bool& error) {
    if (count == 1) return 0;
    for (std::size_t j = 0; j < count; ++j) {
        if (typical(j)) return j;
    }
    error = true;
    return 0;
}

}  // namespace

Encoding encode(std::span<const Symbol> s, const CodebookSet& cb, std::uint64_t randomizer) {
    const auto& z = cb.sizes;
    if (s.size() != z.n) throw Error(Errc::InvalidArgument, "source word has the wrong length");
    if (randomizer < 1 || randomizer > z.n_k1) throw Error(Errc::InvalidArgument, "randomizer outside [1, N_K1]");
    const std::size_t ns = cb.scenario.src().s_size();
    for (auto x : s) {
        if (x >= ns) throw Error(Errc::SymbolOutOfRange, "source symbol outside the alphabet");
    }

    Encoding enc;
    enc.u = first_typical(z.u.words, [&](std::size_t j) { return cb.enc_u({s, cb.u_word(j)}); }, enc.error);
    const auto uw = cb.u_word(enc.u);
    enc.v = first_typical(
        z.v.words, [&](std::size_t j) { return cb.enc_v({s, uw, cb.v_word(enc.u, j)}); }, enc.error);
    const auto vw = cb.v_word(enc.u, enc.v);
    enc.w = first_typical(
        z.w.words, [&](std::size_t j) { return cb.enc_w({s, uw, vw, cb.w_word(enc.u, enc.v, j)}); },
        enc.error);

    const std::size_t v_bin = z.v.bin_of(enc.v);
    enc.source_key = cb.key(enc.u, v_bin, z.v.within_of(enc.v));
    const std::uint64_t beta = z.w.bin_of(enc.w);
    enc.w_bin_low = beta % z.pad_modulus + 1;
    enc.p1.u_bin = z.u.bin_of(enc.u) + 1;
    enc.p1.w_bin_high = beta / z.pad_modulus + 1;
    enc.p1.cipher = otp_encrypt(enc.w_bin_low, pad_key(z, randomizer, enc.source_key), z.pad_modulus);
    enc.p2.v_bin = v_bin + 1;
    enc.p2.randomizer = randomizer;
    return enc;
}

Encoding encode(std::span<const Symbol> s, const CodebookSet& cb, Rng& rng) {
    std::uniform_int_distribution<std::uint64_t> randomizer(1, cb.sizes.n_k1);
    return encode(s, cb, randomizer(rng));
}

// ---------------------------------------------------------------- decoders

namespace {

struct Pick {
    std::size_t index = 0;
    bool ok = true;
};

// Unique typical word in a bin. Several candidates resolve to the one
// closest to the joint type (ties to the lowest index); none resolves to
// the bin's first word. Both cases are flagged.
template <class Deviation>
Pick pick_in_bin(const LayerSize& layer, std::size_t bin, double delta, Deviation&& deviation) {
    if (bin + layer.bins >= layer.words) return {bin, true};  // single-word bin
    std::size_t typical = 0, best = bin;
    double best_dev = std::numeric_limits<double>::infinity();
    for (std::size_t j = bin; j < layer.words; j += layer.bins) {
        const double dev = deviation(j);
        if (dev <= delta + 1e-12) {
            ++typical;
            if (dev < best_dev) {
                best_dev = dev;
                best = j;
            }
        }
    }
    return {best, typical == 1};
}

}  // namespace

Phase1State decode_phase1(const std::optional<Phase1Payload>& p1, std::span<const Symbol> e,
                          const CodebookSet& cb) {
    const auto& z = cb.sizes;
    Phase1State st;
    st.payload = p1;
    if (!p1) {
        st.failed = true;
    } else {
        if (p1->u_bin < 1 || p1->u_bin > z.u.bins) throw Error(Errc::InvalidArgument, "U bin out of range");
        const Pick pk = pick_in_bin(z.u, p1->u_bin - 1, cb.params.delta,
                                    [&](std::size_t j) { return cb.dec_u.deviation({e, cb.u_word(j)}); });
        st.u = pk.index;
        st.failed = !pk.ok;
    }
    const auto uw = cb.u_word(st.u);
    st.s_hat.resize(z.n);
    for (std::size_t i = 0; i < z.n; ++i) st.s_hat[i] = cb.recon.phase1(uw[i], e[i]);
    return st;
}

Phase2Result decode_phase2(const std::optional<Phase2Payload>& p2, std::span<const Symbol> t,
                           const Phase1State& st, const CodebookSet& cb,
                           std::optional<std::uint64_t> key_override) {
    const auto& z = cb.sizes;
    const double delta = cb.params.delta;
    const auto uw = cb.u_word(st.u);
    Phase2Result r;

    if (!p2) {
        r.failed = true;
    } else {
        if (p2->v_bin < 1 || p2->v_bin > z.v.bins) throw Error(Errc::InvalidArgument, "V bin out of range");
        const Pick pk = pick_in_bin(z.v, p2->v_bin - 1, delta, [&](std::size_t j) {
            return cb.dec_v.deviation({t, uw, cb.v_word(st.u, j)});
        });
        r.v = pk.index;
        r.failed = !pk.ok;
    }
    r.source_key = key_override ? *key_override : cb.key(st.u, z.v.bin_of(r.v), z.v.within_of(r.v));

    if (!st.payload) {
        r.failed = true;
    } else {
        const std::uint64_t randomizer = p2 ? p2->randomizer : 1;
        r.w_bin_low = otp_decrypt(st.payload->cipher, pad_key(z, randomizer, r.source_key), z.pad_modulus);
        std::uint64_t beta = (st.payload->w_bin_high - 1) * z.pad_modulus + (r.w_bin_low - 1);
        if (beta >= z.w.bins) {
            r.failed = true;
            beta %= z.w.bins;
        }
        const auto vw = cb.v_word(st.u, r.v);
        const Pick pk = pick_in_bin(z.w, beta, delta, [&](std::size_t j) {
            return cb.dec_w.deviation({t, uw, vw, cb.w_word(st.u, r.v, j)});
        });
        r.w = pk.index;
        r.failed = r.failed || !pk.ok;
    }

    const auto vw = cb.v_word(st.u, r.v);
    const auto ww = cb.w_word(st.u, r.v, r.w);
    r.s_hat.resize(z.n);
    for (std::size_t i = 0; i < z.n; ++i) r.s_hat[i] = cb.recon.phase2(ww[i], vw[i], t[i]);
    return r;
}

// ------------------------------------------------------------- experiment

namespace {

struct Delivery {
    std::uint64_t index = 0;
    bool ok = true;
};

// Sends book word `index` through the channel and decodes by joint typicality.
Delivery deliver(const std::vector<Symbol>& book, std::size_t range, std::size_t len,
                 std::uint64_t index, const Channel& ch, const TypicalityTest& typ, Rng& rng) {
    const std::span<const Symbol> x(book.data() + index * len, len);
    const Word y = transmit(ch, x, rng);
    std::size_t typical = 0, best = 0;
    double best_dev = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < range; ++j) {
        const double dev = typ.deviation({std::span<const Symbol>(book.data() + j * len, len), y});
        if (dev <= typ.delta() + 1e-12) {
            ++typical;
            if (dev < best_dev) {
                best_dev = dev;
                best = j;
            }
        }
    }
    return {best, typical == 1};
}

double mean_distortion(const DistortionMeasure& dm, std::span<const Symbol> s, std::span<const Symbol> s_hat) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += dm(s[i], s_hat[i]);
    return acc / static_cast<double>(s.size());
}

}  // namespace

TrialRecord run_trial(const CodebookSet& cb, std::size_t trial) {
    const auto& z = cb.sizes;
    const auto& sc = cb.scenario;
    const bool ideal = cb.params.mode == ChannelMode::IdealPipe;
    const std::uint64_t seed = derive_seed(cb.params.seed, trial + 1);

    TrialRecord rec;
    rec.trial = trial;
    rec.block = sample_iid(sc.src(), z.n, seed);
    Rng rng(derive_seed(seed, 1));
    rec.enc = encode(rec.block.s, cb, rng);

    std::optional<Phase1Payload> rx1;
    bool ch1_ok = true;
    if (ideal) {
        rec.overflow1 = z.phase1_overflow;
        if (!rec.overflow1) rx1 = rec.enc.p1;
    } else {
        const auto& p = rec.enc.p1;
        const std::uint64_t idx = ((p.u_bin - 1) * z.pad_modulus + (p.cipher - 1)) * z.n_b2 + (p.w_bin_high - 1);
        const Delivery d = deliver(cb.x1_words, z.phase1_range(), z.n1, idx, sc.ch1(), cb.ch1, rng);
        ch1_ok = d.ok;
        Phase1Payload out;
        out.w_bin_high = d.index % z.n_b2 + 1;
        out.cipher = (d.index / z.n_b2) % z.pad_modulus + 1;
        out.u_bin = d.index / (z.n_b2 * z.pad_modulus) + 1;
        rx1 = out;
    }
    rec.dec1 = decode_phase1(rx1, rec.block.e, cb);
    rec.dec1.failed = rec.dec1.failed || !ch1_ok;

    std::optional<Phase2Payload> rx2;
    bool ch2_ok = true;
    if (ideal) {
        rec.overflow2 = z.phase2_overflow;
        if (!rec.overflow2) rx2 = rec.enc.p2;
    } else {
        const auto& p = rec.enc.p2;
        const std::uint64_t idx = (p.v_bin - 1) * z.n_k1 + (p.randomizer - 1);
        const Delivery d = deliver(cb.x2_words, z.phase2_range(), z.n2, idx, sc.ch2(), cb.ch2, rng);
        ch2_ok = d.ok;
        rx2 = Phase2Payload{d.index / z.n_k1 + 1, d.index % z.n_k1 + 1};
    }
    rec.dec2 = decode_phase2(rx2, rec.block.t, rec.dec1, cb);
    rec.dec2.failed = rec.dec2.failed || !ch2_ok;

    rec.d1 = mean_distortion(sc.distortion(), rec.block.s, rec.dec1.s_hat);
    rec.d2 = mean_distortion(sc.distortion(), rec.block.s, rec.dec2.s_hat);
    return rec;
}

ExperimentSummary run_experiment(const CodebookSet& cb, std::size_t trials, std::size_t threads,
                                 std::vector<TrialRow>* rows) {
    if (trials == 0) throw Error(Errc::InvalidArgument, "trials must be at least 1");
    std::vector<TrialRow> local(trials);
    std::vector<char> ov1(trials), ov2(trials);
    auto work = [&](std::size_t i) {
        const TrialRecord r = run_trial(cb, i);
        local[i] = {i, r.enc.error, r.dec1.failed, r.dec2.failed, r.d1, r.d2};
        ov1[i] = r.overflow1;
        ov2[i] = r.overflow2;
    };
    threads = std::max<std::size_t>(1, std::min(threads, trials));
    if (threads == 1) {
        for (std::size_t i = 0; i < trials; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < threads; ++k) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < trials; i = next++) work(i);
            });
        }
    }

    ExperimentSummary sum;
    sum.trials = trials;
    sum.sizes = cb.sizes;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto& r = local[i];
        sum.mean_d1 += r.d1;
        sum.mean_d2 += r.d2;
        sum.enc_err_rate += r.enc_err;
        sum.dec1_err_rate += r.dec1_err;
        sum.dec2_err_rate += r.dec2_err;
        sum.overflow1_rate += ov1[i];
        sum.overflow2_rate += ov2[i];
    }
    const double inv = 1.0 / static_cast<double>(trials);
    for (double* f : {&sum.mean_d1, &sum.mean_d2, &sum.enc_err_rate, &sum.dec1_err_rate,
                      &sum.dec2_err_rate, &sum.overflow1_rate, &sum.overflow2_rate}) {
        *f *= inv;
    }
    const RegionPoint pt = evaluate_point(cb.aux, cb.scenario);
    sum.region_d1 = pt.d1;
    sum.region_d2 = pt.d2;
    sum.region_leakage = pt.leakage_lb;
    if (rows) *rows = std::move(local);
    return sum;
}

ExperimentSummary run_experiment(const AuxChannel& aux, const ScenarioConfig& sc,
                                 const SimParams& sp, std::size_t trials, std::size_t threads,
                                 std::vector<TrialRow>* rows) {
    return run_experiment(build_codebooks(aux, sc, sp), trials, threads, rows);
}

}  // namespace hjscc::codec

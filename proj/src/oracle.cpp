#include "hjscc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

namespace hjscc::oracle {

namespace {

void charge(long double states, const EnumerationBudget& budget, const char* what) {
    if (states > static_cast<long double>(budget.max_states)) {
        throw Error(Errc::BudgetExceeded, std::string(what) + " needs " +
                                              std::to_string(static_cast<double>(states)) +
                                              " states, budget is " + std::to_string(budget.max_states));
    }
}

long double power(std::size_t base, std::size_t exp) {
    long double r = 1.0L;
    for (std::size_t i = 0; i < exp; ++i) r *= static_cast<long double>(base);
    return r;
}

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
}

// Digit i of `index` in base `base`, most significant digit first.
void digits(std::size_t index, std::size_t base, std::size_t n, Word& out) {
    out.resize(n);
    for (std::size_t i = n; i-- > 0;) {
        out[i] = static_cast<Symbol>(index % base);
        index /= base;
    }
}

// P(e | s) for one letter, through T.
std::vector<double> eve_given_source(const SourceModel& src) {
    const std::size_t ns = src.s_size(), nt = src.t_size(), ne = src.e_size();
    std::vector<double> m(ns * ne, 0.0);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t t = 0; t < nt; ++t)
            for (std::size_t e = 0; e < ne; ++e)
                m[s * ne + e] += src.t_given_s()(s, t) * src.e_given_t()(t, e);
    return m;
}

double word_prob(const std::vector<double>& p, const Word& w) {
    double r = 1.0;
    for (auto x : w) r *= p[x];
    return r;
}

double word_cond_prob(const std::vector<double>& m, std::size_t cols, const Word& in, const Word& out) {
    double r = 1.0;
    for (std::size_t i = 0; i < in.size(); ++i) r *= m[in[i] * cols + out[i]];
    return r;
}

// For every source word: its probability, the distribution of Eve's block
// E^n, and the distribution of the Phase-1 observation with the key and U
// word attached.
struct Observation {
    std::uint64_t y;
    std::uint64_t key;
    std::uint64_t u;
    double p;
};

class Enumerator {
public:
    Enumerator(const codec::CodebookSet& cb, const EnumerationBudget& budget, const char* what)
        : cb_(cb), z_(cb.sizes), src_(cb.scenario.src()), pes_(eve_given_source(src_)) {
        const std::size_t n = z_.n;
        ideal_ = cb.params.mode == codec::ChannelMode::IdealPipe;
        ny_ = cb.scenario.ch1().output_size();
        long double states = power(src_.s_size(), n) * power(src_.e_size(), n) * z_.n_k1;
        if (!ideal_) states *= power(ny_, z_.n1);
        charge(states, budget, what);
        source_words_ = ipow(src_.s_size(), n);
        eve_words_ = ipow(src_.e_size(), n);
    }

    std::size_t source_words() const noexcept { return source_words_; }
    std::size_t eve_words() const noexcept { return eve_words_; }

    double source_prob(std::size_t s_index, Word& s) const {
        digits(s_index, src_.s_size(), z_.n, s);
        return word_prob(src_.p_s(), s);
    }

    double eve_prob(const Word& s, std::size_t e_index, Word& e) const {
        digits(e_index, src_.e_size(), z_.n, e);
        return word_cond_prob(pes_, src_.e_size(), s, e);
    }

    std::vector<Observation> observations(const Word& s) const {
        std::vector<Observation> obs;
        const double pk = 1.0 / static_cast<double>(z_.n_k1);
        for (std::uint64_t randomizer = 1; randomizer <= z_.n_k1; ++randomizer) {
            const codec::Encoding enc = codec::encode(s, cb_, randomizer);
            const auto& p = enc.p1;
            const std::uint64_t payload =
                ((p.u_bin - 1) * z_.pad_modulus + (p.cipher - 1)) * z_.n_b2 + (p.w_bin_high - 1);
            if (ideal_) {
                obs.push_back({payload, enc.source_key, enc.u, pk});
                continue;
            }
            const std::size_t len = z_.n1;
            const Word x(cb_.x1_words.begin() + static_cast<std::ptrdiff_t>(payload * len),
                         cb_.x1_words.begin() + static_cast<std::ptrdiff_t>((payload + 1) * len));
            const auto& ch = cb_.scenario.ch1();
            Word y;
            for (std::size_t yi = 0; yi < ipow(ny_, len); ++yi) {
                digits(yi, ny_, len, y);
                double q = pk;
                for (std::size_t i = 0; i < len; ++i) q *= ch(x[i], y[i]);
                if (q > 0.0) obs.push_back({yi, enc.source_key, enc.u, q});
            }
        }
        return obs;
    }

private:
    const codec::CodebookSet& cb_;
    const codec::BookSizes& z_;
    const SourceModel& src_;
    std::vector<double> pes_;
    bool ideal_ = true;
    std::size_t ny_ = 1;
    std::size_t source_words_ = 0, eve_words_ = 0;
};

double entropy_of(const std::map<std::array<std::uint64_t, 4>, double>& m) {
    double h = 0.0;
    for (const auto& [k, p] : m) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

double brute_mi(const JointDist& joint, const AxisList& a, const AxisList& b, const AxisList& c,
                EnumerationBudget budget) {
    charge(static_cast<long double>(joint.cells()), budget, "brute_mi");
    if (a.empty() || b.empty()) throw Error(Errc::InvalidArgument, "brute_mi needs nonempty a and b");
    const std::size_t rank = joint.rank();
    std::vector<int> role(rank, -1);  // 0 = a, 1 = b, 2 = c
    auto mark = [&](const AxisList& names, int r) {
        for (const auto& name : names) {
            const std::size_t ax = joint.axis_index(name);
            if (role[ax] != -1) throw Error(Errc::OverlappingSets, "variable '" + name + "' repeats");
            role[ax] = r;
        }
    };
    mark(a, 0);
    mark(b, 1);
    mark(c, 2);

    std::vector<std::size_t> size(rank);
    for (std::size_t i = 0; i < rank; ++i) size[i] = joint.axes()[i].size;
    // Radix of each axis inside the (a,c), (b,c), (c) and (a,b,c) keys.
    auto extent = [&](std::initializer_list<int> roles) {
        std::size_t e = 1;
        for (std::size_t i = 0; i < rank; ++i)
            for (int r : roles)
                if (role[i] == r) e *= size[i];
        return e;
    };
    std::vector<double> p_abc(extent({0, 1, 2}), 0.0), p_ac(extent({0, 2}), 0.0),
        p_bc(extent({1, 2}), 0.0), p_c(extent({2}), 0.0);

    const auto mass = joint.mass();
    std::vector<std::size_t> digit(rank);
    struct Keys {
        std::size_t abc, ac, bc, c;
    };
    auto keys_of = [&](std::size_t cell) {
        for (std::size_t i = rank; i-- > 0;) {
            digit[i] = cell % size[i];
            cell /= size[i];
        }
        Keys k{0, 0, 0, 0};
        for (std::size_t i = 0; i < rank; ++i) {
            const int r = role[i];
            if (r < 0) continue;
            k.abc = k.abc * size[i] + digit[i];
            if (r != 1) k.ac = k.ac * size[i] + digit[i];
            if (r != 0) k.bc = k.bc * size[i] + digit[i];
            if (r == 2) k.c = k.c * size[i] + digit[i];
        }
        return k;
    };

    for (std::size_t cell = 0; cell < mass.size(); ++cell) {
        const double p = mass[cell];
        if (p == 0.0) continue;
        const Keys k = keys_of(cell);
        p_abc[k.abc] += p;
        p_ac[k.ac] += p;
        p_bc[k.bc] += p;
        p_c[k.c] += p;
    }
    double mi = 0.0;
    for (std::size_t cell = 0; cell < mass.size(); ++cell) {
        const double p = mass[cell];
        if (p <= 0.0) continue;
        const Keys k = keys_of(cell);
        mi += p * std::log2(p_abc[k.abc] * p_c[k.c] / (p_ac[k.ac] * p_bc[k.bc]));
    }
    return mi;
}

double source_eve_leakage(const SourceModel& src, std::size_t n, EnumerationBudget budget) {
    if (n == 0) throw Error(Errc::InvalidArgument, "block length must be positive");
    charge(power(src.s_size(), n) * power(src.e_size(), n), budget, "source_eve_leakage");
    const auto pes = eve_given_source(src);
    const std::size_t ns_n = ipow(src.s_size(), n), ne_n = ipow(src.e_size(), n);
    std::vector<double> p_e(ne_n, 0.0);
    Word s, e;
    for (std::size_t si = 0; si < ns_n; ++si) {
        digits(si, src.s_size(), n, s);
        const double ps = word_prob(src.p_s(), s);
        for (std::size_t ei = 0; ei < ne_n; ++ei) {
            digits(ei, src.e_size(), n, e);
            p_e[ei] += ps * word_cond_prob(pes, src.e_size(), s, e);
        }
    }
    double mi = 0.0;
    for (std::size_t si = 0; si < ns_n; ++si) {
        digits(si, src.s_size(), n, s);
        const double ps = word_prob(src.p_s(), s);
        for (std::size_t ei = 0; ei < ne_n; ++ei) {
            digits(ei, src.e_size(), n, e);
            const double pe_s = word_cond_prob(pes, src.e_size(), s, e);
            if (ps * pe_s > 0.0) mi += ps * pe_s * std::log2(pe_s / p_e[ei]);
        }
    }
    return mi / static_cast<double>(n);
}

double exact_leakage(const codec::CodebookSet& cb, EnumerationBudget budget) {
    const Enumerator en(cb, budget, "exact_leakage");
    // Two passes: the (Y, E) marginal, then sum p(s,y,e) log p(y|s) p(e|s) / p(y,e).
    std::map<std::pair<std::uint64_t, std::size_t>, double> p_ye;
    Word s, e;
    for (int pass = 0; pass < 2; ++pass) {
        double mi = 0.0;
        for (std::size_t si = 0; si < en.source_words(); ++si) {
            const double ps = en.source_prob(si, s);
            if (ps <= 0.0) continue;
            // Merge observations that collide on y (different keys, same payload).
            std::map<std::uint64_t, double> p_y_s;
            for (const auto& o : en.observations(s)) p_y_s[o.y] += o.p;
            for (std::size_t ei = 0; ei < en.eve_words(); ++ei) {
                const double pe_s = en.eve_prob(s, ei, e);
                if (pe_s <= 0.0) continue;
                for (const auto& [y, py_s] : p_y_s) {
                    const double joint = ps * py_s * pe_s;
                    if (pass == 0) {
                        p_ye[{y, ei}] += joint;
                    } else {
                        mi += joint * std::log2(py_s * pe_s / p_ye.at({y, ei}));
                    }
                }
            }
        }
        if (pass == 1) return std::max(0.0, mi) / static_cast<double>(cb.sizes.n);
    }
    return 0.0;
}

double secure_index(const codec::CodebookSet& cb, EnumerationBudget budget) {
    const double log_nk2 = std::log2(static_cast<double>(cb.sizes.n_k2));
    if (cb.sizes.n_k2 == 1) return 0.0;
    const Enumerator en(cb, budget, "secure_index");
    std::map<std::array<std::uint64_t, 4>, double> with_key, without_key;
    Word s, e;
    for (std::size_t si = 0; si < en.source_words(); ++si) {
        const double ps = en.source_prob(si, s);
        if (ps <= 0.0) continue;
        const auto obs = en.observations(s);
        for (std::size_t ei = 0; ei < en.eve_words(); ++ei) {
            const double pe_s = en.eve_prob(s, ei, e);
            if (pe_s <= 0.0) continue;
            for (const auto& o : obs) {
                const double p = ps * pe_s * o.p;
                with_key[{o.key, ei, o.u, o.y}] += p;
                without_key[{0, ei, o.u, o.y}] += p;
            }
        }
    }
    const double h_key_given = entropy_of(with_key) - entropy_of(without_key);
    return std::clamp(log_nk2 - h_key_given, 0.0, log_nk2);
}

OracleReport oracle_report(const codec::CodebookSet& cb, EnumerationBudget budget) {
    OracleReport r;
    r.leakage_exact = exact_leakage(cb, budget);
    r.leakage_bound = evaluate_point(cb.aux, cb.scenario).leakage_lb;
    r.gap = r.leakage_exact - r.leakage_bound;
    r.n = cb.sizes.n;
    r.seed = cb.params.seed;
    r.secure_index = secure_index(cb, budget);
    return r;
}

}  // namespace hjscc::oracle

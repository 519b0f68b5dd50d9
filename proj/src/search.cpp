#include "hjscc/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

#include "hjscc/random.hpp"

namespace hjscc {

AuxSizes cardinality_bounds(std::size_t s) {
    const std::size_t v = (s + 1) * (s + 2) + 1;
    return {s + 3, v, s * (s + 3) * v + 1};
}

AuxSizes resolve_sizes(const AuxSizes& requested, std::size_t s) {
    const AuxSizes bound = cardinality_bounds(s);
    AuxSizes r{requested.u ? requested.u : s + 1, requested.v ? requested.v : s + 1,
               requested.w ? requested.w : s + 1};
    if (r.u > bound.u || r.v > bound.v || r.w > bound.w) {
        throw Error(Errc::InvalidArgument,
                    "auxiliary alphabet sizes exceed the cardinality bounds (|U|<=" +
                        std::to_string(bound.u) + ", |V|<=" + std::to_string(bound.v) +
                        ", |W|<=" + std::to_string(bound.w) + ")");
    }
    return r;
}

namespace {

// Stacked row-stochastic parameters of the three kernels.
struct Params {
    std::size_t ns = 0, nu = 0, nv = 0, nw = 0;
    std::vector<double> u, v, w;

    std::vector<double>& block(int k) { return k == 0 ? u : (k == 1 ? v : w); }
    std::size_t width(int k) const { return k == 0 ? nu : (k == 1 ? nv : nw); }
    std::size_t rows(int k) const { return k == 0 ? ns : (k == 1 ? nu * ns : nu * nv * ns); }
};

Params params_of(const AuxChannel& aux) {
    Params p;
    p.ns = aux.s_size();
    p.nu = aux.u_size();
    p.nv = aux.v_size();
    p.nw = aux.w_size();
    auto copy = [](const CondKernel& k) { return std::vector<double>(k.data().begin(), k.data().end()); };
    p.u = copy(aux.u_given_s());
    p.v = copy(aux.v_given_us());
    p.w = copy(aux.w_given_uvs());
    return p;
}

std::vector<double> normalized_rows(const std::vector<double>& flat, std::size_t width) {
    std::vector<double> out(flat);
    for (std::size_t r = 0; r < out.size() / width; ++r) {
        double z = 0.0;
        for (std::size_t i = 0; i < width; ++i) z += out[r * width + i];
        for (std::size_t i = 0; i < width; ++i) out[r * width + i] /= z;
    }
    return out;
}

AuxChannel aux_of(const Params& p) {
    return AuxChannel(CondKernel({p.ns}, p.nu, normalized_rows(p.u, p.nu)),
                      CondKernel({p.nu, p.ns}, p.nv, normalized_rows(p.v, p.nv)),
                      CondKernel({p.nu, p.nv, p.ns}, p.nw, normalized_rows(p.w, p.nw)));
}

struct Score {
    double violation = 0.0;
    double leakage = 0.0;

    bool feasible() const noexcept { return violation <= 0.0; }
};

bool better(const Score& a, const Score& b) {
    if (a.feasible() != b.feasible()) return a.feasible();
    if (a.feasible()) return a.leakage < b.leakage - 1e-13;
    return a.violation < b.violation - 1e-15;
}

double excess(double margin, double tol) { return std::max(0.0, -margin - tol); }

Score score_of(const RegionPoint& pt, const SearchOptions& o) {
    const auto& sl = pt.slack;
    double viol = 0.0;
    if (o.region == Region::R1) {
        viol += excess(sl.r1_phase1, kSlackTol) + excess(sl.r1_phase2, kSlackTol);
    } else {
        viol += excess(sl.r2_phase1, kSlackTol) + excess(sl.r2_phase2, kSlackTol) +
                excess(sl.r2_sum, 2.0 * kSlackTol);
    }
    viol += excess(o.d1_max - pt.d1, kSlackTol) + excess(o.d2_max - pt.d2, kSlackTol);
    return {viol, pt.leakage_lb};
}

struct Outcome {
    Params params;
    Score score;
    std::size_t evals = 0;
};

class Descent {
public:
    Descent(const ScenarioConfig& sc, const SearchOptions& o) : sc_(sc), o_(o) {}

    Score eval(const Params& p) {
        ++evals_;
        return score_of(evaluate_point(aux_of(p), sc_), o_);
    }

    // Pairwise mass transfers inside each row, accepted when they improve
    // the (violation, leakage) order; the step halves after a sweep
    // without improvement.
    Outcome run(Params p) {
        Score cur = eval(p);
        double step = o_.initial_step;
        const auto& ps = sc_.src().p_s();
        while (step >= o_.min_step && evals_ < o_.max_evals) {
            bool improved = false;
            for (int k = 0; k < 3 && evals_ < o_.max_evals; ++k) {
                const std::size_t width = p.width(k);
                if (width < 2) continue;
                for (std::size_t r = 0; r < p.rows(k) && evals_ < o_.max_evals; ++r) {
                    if (context_mass(p, ps, k, r) <= 1e-15) continue;
                    auto& blk = p.block(k);
                    double* row = blk.data() + r * width;
                    for (std::size_t i = 0; i < width; ++i) {
                        for (std::size_t j = 0; j < width; ++j) {
                            if (i == j || row[j] <= 0.0 || evals_ >= o_.max_evals) continue;
                            const double oi = row[i], oj = row[j];
                            const double amt = std::min(step, oj);
                            row[j] = (amt == oj) ? 0.0 : oj - amt;
                            row[i] = oi + amt;
                            const Score cand = eval(p);
                            if (better(cand, cur)) {
                                cur = cand;
                                improved = true;
                            } else {
                                row[i] = oi;
                                row[j] = oj;
                            }
                        }
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        return {std::move(p), cur, evals_};
    }

private:
    // Probability of the conditioning context a kernel row is used in.
    static double context_mass(const Params& p, const std::vector<double>& ps, int k, std::size_t r) {
        if (k == 0) return ps[r];
        if (k == 1) {
            const std::size_t u = r / p.ns, s = r % p.ns;
            return ps[s] * p.u[s * p.nu + u];
        }
        const std::size_t s = r % p.ns, uv = r / p.ns, v = uv % p.nv, u = uv / p.nv;
        return ps[s] * p.u[s * p.nu + u] * p.v[(u * p.ns + s) * p.nv + v];
    }

    const ScenarioConfig& sc_;
    const SearchOptions& o_;
    std::size_t evals_ = 0;
};

Params dirichlet_params(std::size_t ns, const AuxSizes& z, Rng& rng) {
    Params p;
    p.ns = ns;
    p.nu = z.u;
    p.nv = z.v;
    p.nw = z.w;
    std::gamma_distribution<double> gamma(0.5, 1.0);
    for (int k = 0; k < 3; ++k) {
        auto& blk = p.block(k);
        blk.resize(p.rows(k) * p.width(k));
        for (auto& x : blk) x = gamma(rng) + 1e-12;
        blk = normalized_rows(blk, p.width(k));
    }
    return p;
}

Params perturbed_params(Params p, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < 3; ++k) {
        auto& blk = p.block(k);
        const double floor = 0.05 / static_cast<double>(p.width(k));
        for (auto& x : blk) x = x * std::exp(normal(rng)) + floor;
        blk = normalized_rows(blk, p.width(k));
    }
    return p;
}

}  // namespace

SearchResult minimize_leakage(const ScenarioConfig& sc, const SearchOptions& opts) {
    if (opts.budget == 0) throw Error(Errc::InvalidArgument, "search budget must be positive");
    const std::size_t ns = sc.src().s_size();
    const AuxSizes sizes = resolve_sizes(opts.sizes, ns);

    // Best structured auxiliary (each of U, V, W copies S or is constant) seeds restart 0
    // and the perturbation restarts.
    std::optional<Outcome> anchor;
    {
        Descent d(sc, opts);
        for (int mask = 0; mask < 8; ++mask) {
            const bool uc = mask & 1, vc = mask & 2, wc = mask & 4;
            if ((uc && sizes.u < ns) || (vc && sizes.v < ns) || (wc && sizes.w < ns)) continue;
            Params p = params_of(structured_aux(ns, uc, vc, wc, sizes.u, sizes.v, sizes.w));
            const Score s = d.eval(p);
            if (!anchor || better(s, anchor->score)) anchor = Outcome{std::move(p), s, 0};
        }
    }

    std::vector<std::optional<Outcome>> outcomes(opts.budget);
    auto run_restart = [&](std::size_t i) {
        Rng rng(derive_seed(opts.seed, i));
        Params start;
        if (i == 0 && anchor) {
            start = anchor->params;
        } else if (i % 2 == 1 && anchor) {
            start = perturbed_params(anchor->params, rng);
        } else {
            start = dirichlet_params(ns, sizes, rng);
        }
        Descent d(sc, opts);
        outcomes[i] = d.run(std::move(start));
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, opts.budget));
    if (threads == 1) {
        for (std::size_t i = 0; i < opts.budget; ++i) run_restart(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < opts.budget; i = next++) run_restart(i);
            });
        }
    }

    std::size_t total_evals = 0;
    const Outcome* best = nullptr;
    for (const auto& o : outcomes) {
        total_evals += o->evals;
        if (!best || better(o->score, best->score)) best = &*o;
    }
    if (!best->score.feasible()) {
        throw Error(Errc::NoFeasiblePoint,
                    "no restart met the rate and distortion constraints (min violation " +
                        std::to_string(best->score.violation) + ")");
    }
    AuxChannel aux = aux_of(best->params);
    RegionPoint pt = evaluate_point(aux, sc);
    return SearchResult{std::move(aux), std::move(pt), opts.budget, total_evals};
}

std::vector<FrontierCell> frontier_sweep(const ScenarioConfig& sc, std::vector<double> d1_grid,
                                         std::vector<double> d2_grid, const SearchOptions& opts) {
    if (d1_grid.empty() || d2_grid.empty()) {
        throw Error(Errc::InvalidArgument, "distortion grids must be nonempty");
    }
    std::sort(d1_grid.begin(), d1_grid.end());
    std::sort(d2_grid.begin(), d2_grid.end());
    const std::size_t n1 = d1_grid.size(), n2 = d2_grid.size();

    std::vector<FrontierCell> cells(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            SearchOptions o = opts;
            o.d1_max = d1_grid[i];
            o.d2_max = d2_grid[j];
            auto& c = cells[i * n2 + j];
            c.d1_max = o.d1_max;
            c.d2_max = o.d2_max;
            c.restarts_used = o.budget;
            try {
                c.best = minimize_leakage(sc, o);
            } catch (const Error& e) {
                if (e.code() != Errc::NoFeasiblePoint) throw;
            }
        }
    }

    // Feasible sets nest as the caps grow, so a point found for a tighter
    // cell is valid for every looser one.
    auto leak = [](const FrontierCell& c) { return c.best->point.leakage_lb; };
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            auto& c = cells[i * n2 + j];
            for (const FrontierCell* nb : {i > 0 ? &cells[(i - 1) * n2 + j] : nullptr,
                                           j > 0 ? &cells[i * n2 + j - 1] : nullptr}) {
                if (!nb || !nb->best) continue;
                if (!c.best || leak(*nb) < leak(c)) c.best = nb->best;
            }
        }
    }
    return cells;
}

void write_frontier_csv(std::ostream& os, const std::vector<FrontierCell>& cells) {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    os << "d1_max,d2_max,leakage_lb,d1,d2,feasible,restarts_used\n";
    for (const auto& c : cells) {
        os << num(c.d1_max) << ',' << num(c.d2_max) << ',';
        if (c.best) {
            const auto& p = c.best->point;
            os << num(p.leakage_lb) << ',' << num(p.d1) << ',' << num(p.d2) << ",1,";
        } else {
            os << ",,,0,";
        }
        os << c.restarts_used << '\n';
    }
}

}  // namespace hjscc

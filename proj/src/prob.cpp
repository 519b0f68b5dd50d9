#include "hjscc/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "hjscc/random.hpp"

namespace hjscc {

namespace {

std::string tuple_string(const std::vector<std::size_t>& t) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    os << ')';
    return os.str();
}

std::size_t checked_product(const std::vector<std::size_t>& sizes, std::size_t cap) {
    std::size_t total = 1;
    for (std::size_t s : sizes) {
        if (s == 0) throw Error(Errc::InvalidArgument, "alphabet size must be positive");
        if (total > cap / s) {
            throw Error(Errc::TensorTooLarge,
                        "tensor exceeds the cell cap of " + std::to_string(cap));
        }
        total *= s;
    }
    if (total > cap) {
        throw Error(Errc::TensorTooLarge, "tensor exceeds the cell cap of " + std::to_string(cap));
    }
    return total;
}

}  // namespace

// ---------------------------------------------------------------- JointDist

JointDist::JointDist(std::vector<Axis> axes, std::vector<double> mass, std::size_t cell_cap)
    : axes_(std::move(axes)), mass_(std::move(mass)) {
    if (axes_.empty() || axes_.size() > 64) {
        throw Error(Errc::InvalidArgument, "a joint distribution needs 1..64 axes");
    }
    std::set<std::string> names;
    std::vector<std::size_t> sizes;
    for (const auto& a : axes_) {
        if (!names.insert(a.name).second) {
            throw Error(Errc::InvalidArgument, "duplicate axis name '" + a.name + "'");
        }
        sizes.push_back(a.size);
    }
    const std::size_t cells = checked_product(sizes, cell_cap);
    if (mass_.size() != cells) {
        throw Error(Errc::InvalidArgument, "mass has " + std::to_string(mass_.size()) +
                                               " cells, axes imply " + std::to_string(cells));
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t i = axes_.size() - 1; i-- > 0;) {
        strides_[i] = strides_[i + 1] * axes_[i + 1].size;
    }
}

std::size_t JointDist::axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i].name == name) return i;
    }
    throw Error(Errc::UnknownAxis, "no axis named '" + name + "'");
}

std::uint64_t JointDist::mask_of(const AxisList& names) const {
    std::uint64_t mask = 0;
    for (const auto& n : names) mask |= std::uint64_t{1} << axis_index(n);
    return mask;
}

double JointDist::at(std::span<const std::size_t> tuple) const {
    if (tuple.size() != axes_.size()) throw Error(Errc::InvalidArgument, "tuple rank mismatch");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] >= axes_[i].size) throw Error(Errc::SymbolOutOfRange, "tuple out of range");
        cell += tuple[i] * strides_[i];
    }
    return mass_[cell];
}

std::vector<std::size_t> JointDist::unravel(std::size_t cell) const {
    std::vector<std::size_t> t(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        t[i] = cell / strides_[i];
        cell %= strides_[i];
    }
    return t;
}

std::vector<double> JointDist::marginal_mass(std::uint64_t mask) const {
    const std::size_t r = axes_.size();
    std::vector<std::size_t> out_stride(r, 0);
    std::size_t out_cells = 1;
    for (std::size_t i = r; i-- > 0;) {
        if (mask & (std::uint64_t{1} << i)) {
            out_stride[i] = out_cells;
            out_cells *= axes_[i].size;
        }
    }
    std::vector<double> out(out_cells, 0.0);
    std::vector<std::size_t> idx(r, 0);
    std::size_t o = 0;
    for (double m : mass_) {
        out[o] += m;
        for (std::size_t a = r; a-- > 0;) {
            o += out_stride[a];
            if (++idx[a] < axes_[a].size) break;
            o -= out_stride[a] * axes_[a].size;
            idx[a] = 0;
        }
    }
    return out;
}

JointDist JointDist::marginal(const AxisList& names) const {
    const std::uint64_t mask = mask_of(names);
    std::vector<Axis> kept;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (mask & (std::uint64_t{1} << i)) kept.push_back(axes_[i]);
    }
    return JointDist(std::move(kept), marginal_mass(mask));
}

ValidationReport validate(const JointDist& dist, double tol) {
    ValidationReport rep;
    const auto mass = dist.mass();
    for (std::size_t c = 0; c < mass.size(); ++c) {
        if (!std::isfinite(mass[c]) || mass[c] < 0.0) {
            rep.ok = false;
            rep.code = std::isfinite(mass[c]) ? Errc::NegativeMass : Errc::NotNormalized;
            rep.cell = dist.unravel(c);
            rep.message = "cell " + tuple_string(rep.cell) + " has mass " + std::to_string(mass[c]);
            return rep;
        }
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (std::abs(total - 1.0) > tol) {
        rep.ok = false;
        rep.code = Errc::NotNormalized;
        std::ostringstream os;
        os.precision(17);
        os << "total mass " << total << " differs from 1";
        rep.message = os.str();
    }
    return rep;
}

void ensure_valid(const JointDist& dist, double tol) {
    auto rep = validate(dist, tol);
    if (!rep) throw Error(rep.code, rep.message);
}

// ------------------------------------------------------------- information

double entropy_bits(std::span<const double> p) noexcept {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log2(x);
    }
    return h;
}

namespace {

std::uint64_t nonempty_mask(const JointDist& dist, const AxisList& vars, const char* what) {
    if (vars.empty()) throw Error(Errc::InvalidArgument, std::string(what) + " must be nonempty");
    return dist.mask_of(vars);
}

}  // namespace

double entropy(const JointDist& dist, const AxisList& vars) {
    const auto mask = nonempty_mask(dist, vars, "entropy variables");
    return entropy_bits(dist.marginal_mass(mask));
}

double mutual_info(const JointDist& dist, const AxisList& a, const AxisList& b) {
    return cond_mutual_info(dist, a, b, {});
}

double cond_mutual_info(const JointDist& dist, const AxisList& a, const AxisList& b,
                        const AxisList& c) {
    const auto ma = nonempty_mask(dist, a, "first argument");
    const auto mb = nonempty_mask(dist, b, "second argument");
    const auto mc = c.empty() ? std::uint64_t{0} : dist.mask_of(c);
    if ((ma & mb) || (ma & mc) || (mb & mc)) {
        throw Error(Errc::OverlappingSets, "mutual information arguments must be disjoint");
    }
    EntropyCache cache(dist);
    return cache.mi(ma, mb, mc);
}

double EntropyCache::entropy(std::uint64_t mask) {
    if (mask == 0) return 0.0;
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    const double h = entropy_bits(dist_->marginal_mass(mask));
    memo_.emplace(mask, h);
    return h;
}

double EntropyCache::mi(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    const double v = entropy(a | c) + entropy(b | c) - entropy(a | b | c) - entropy(c);
    return std::max(0.0, v);
}

// --------------------------------------------------------------- CondKernel

CondKernel::CondKernel(std::vector<std::size_t> input_sizes, std::size_t output_size,
                       std::vector<double> rows)
    : input_sizes_(std::move(input_sizes)), output_size_(output_size), rows_(std::move(rows)) {
    if (output_size_ == 0) throw Error(Errc::InvalidArgument, "kernel output alphabet is empty");
    const std::size_t n_rows = checked_product(input_sizes_, kDefaultCellCap);
    if (rows_.size() != n_rows * output_size_) {
        throw Error(Errc::AlphabetMismatch,
                    "kernel has " + std::to_string(rows_.size()) + " entries, expected " +
                        std::to_string(n_rows * output_size_));
    }
    for (std::size_t r = 0; r < n_rows; ++r) {
        double sum = 0.0;
        for (std::size_t y = 0; y < output_size_; ++y) {
            const double p = rows_[r * output_size_ + y];
            if (!std::isfinite(p) || p < 0.0) {
                throw Error(Errc::NotStochastic, "kernel row " + std::to_string(r) +
                                                     " has a negative or non-finite entry");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kStochasticTol) {
            std::ostringstream os;
            os.precision(17);
            os << "kernel row " << r << " sums to " << sum;
            throw Error(Errc::NotStochastic, os.str());
        }
    }
}

CondKernel CondKernel::from_rows(std::vector<std::size_t> input_sizes,
                                 const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw Error(Errc::InvalidArgument, "kernel needs at least one nonempty row");
    }
    const std::size_t out = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * out);
    for (const auto& r : rows) {
        if (r.size() != out) throw Error(Errc::AlphabetMismatch, "ragged kernel rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return CondKernel(std::move(input_sizes), out, std::move(flat));
}

CondKernel CondKernel::identity(std::size_t n) {
    std::vector<double> rows(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) rows[i * n + i] = 1.0;
    return CondKernel({n}, n, std::move(rows));
}

CondKernel CondKernel::constant(std::vector<std::size_t> input_sizes, std::size_t output_size,
                                Symbol symbol) {
    if (symbol >= output_size) throw Error(Errc::SymbolOutOfRange, "constant symbol out of range");
    const std::size_t n_rows = checked_product(input_sizes, kDefaultCellCap);
    std::vector<double> rows(n_rows * output_size, 0.0);
    for (std::size_t r = 0; r < n_rows; ++r) rows[r * output_size + symbol] = 1.0;
    return CondKernel(std::move(input_sizes), output_size, std::move(rows));
}

CondKernel CondKernel::deterministic(std::vector<std::size_t> input_sizes,
                                     std::size_t output_size, std::span<const Symbol> map) {
    const std::size_t n_rows = checked_product(input_sizes, kDefaultCellCap);
    if (map.size() != n_rows) throw Error(Errc::AlphabetMismatch, "map length != input tuples");
    std::vector<double> rows(n_rows * output_size, 0.0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (map[r] >= output_size) throw Error(Errc::SymbolOutOfRange, "map symbol out of range");
        rows[r * output_size + map[r]] = 1.0;
    }
    return CondKernel(std::move(input_sizes), output_size, std::move(rows));
}

CondKernel CondKernel::bsc(double crossover) {
    if (!(crossover >= 0.0 && crossover <= 1.0)) {
        throw Error(Errc::InvalidArgument, "crossover must lie in [0,1]");
    }
    return CondKernel({2}, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
}

std::vector<std::vector<double>> CondKernel::to_rows() const {
    std::vector<std::vector<double>> out(row_count());
    for (std::size_t r = 0; r < out.size(); ++r) {
        auto s = row(r);
        out[r].assign(s.begin(), s.end());
    }
    return out;
}

// -------------------------------------------------------------- SourceModel

SourceModel::SourceModel(std::vector<double> p_s, CondKernel t_given_s, CondKernel e_given_t)
    : p_s_(std::move(p_s)), t_given_s_(std::move(t_given_s)), e_given_t_(std::move(e_given_t)) {
    if (p_s_.empty()) throw Error(Errc::InvalidArgument, "source alphabet is empty");
    double sum = 0.0;
    for (std::size_t s = 0; s < p_s_.size(); ++s) {
        if (!std::isfinite(p_s_[s]) || p_s_[s] < 0.0) {
            throw Error(Errc::NegativeMass, "p_s(" + std::to_string(s) + ") is negative");
        }
        sum += p_s_[s];
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
        throw Error(Errc::NotNormalized, "p_s does not sum to 1");
    }
    if (t_given_s_.input_sizes() != std::vector<std::size_t>{p_s_.size()}) {
        throw Error(Errc::AlphabetMismatch, "t_given_s must be indexed by S");
    }
    if (e_given_t_.input_sizes() != std::vector<std::size_t>{t_given_s_.output_size()}) {
        throw Error(Errc::AlphabetMismatch, "e_given_t must be indexed by T");
    }
}

SourceModel SourceModel::dsbs(double p_t, double p_e) {
    return SourceModel({0.5, 0.5}, CondKernel::bsc(p_t), CondKernel::bsc(p_e));
}

JointDist SourceModel::joint() const {
    const std::size_t ns = s_size(), nt = t_size(), ne = e_size();
    std::vector<double> mass(ns * nt * ne);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t t = 0; t < nt; ++t)
            for (std::size_t e = 0; e < ne; ++e)
                mass[(s * nt + t) * ne + e] = p_s_[s] * t_given_s_(s, t) * e_given_t_(t, e);
    return JointDist({{"S", ns}, {"T", nt}, {"E", ne}}, std::move(mass));
}

// --------------------------------------------------------------- AuxChannel

AuxChannel::AuxChannel(CondKernel u_given_s, CondKernel v_given_us, CondKernel w_given_uvs)
    : u_given_s_(std::move(u_given_s)),
      v_given_us_(std::move(v_given_us)),
      w_given_uvs_(std::move(w_given_uvs)) {
    if (u_given_s_.input_sizes().size() != 1) {
        throw Error(Errc::AlphabetMismatch, "u_given_s must be indexed by S alone");
    }
    const std::size_t ns = u_given_s_.input_sizes()[0];
    const std::size_t nu = u_given_s_.output_size();
    if (v_given_us_.input_sizes() != std::vector<std::size_t>{nu, ns}) {
        throw Error(Errc::AlphabetMismatch, "v_given_us must be indexed by (U,S)");
    }
    const std::size_t nv = v_given_us_.output_size();
    if (w_given_uvs_.input_sizes() != std::vector<std::size_t>{nu, nv, ns}) {
        throw Error(Errc::AlphabetMismatch, "w_given_uvs must be indexed by (U,V,S)");
    }
}

AuxChannel AuxChannel::constant(std::size_t s_size) {
    return AuxChannel(CondKernel::constant({s_size}), CondKernel::constant({1, s_size}),
                      CondKernel::constant({1, 1, s_size}));
}

JointDist assemble_joint(const SourceModel& src, const AuxChannel& aux, std::size_t cell_cap) {
    if (aux.s_size() != src.s_size()) {
        throw Error(Errc::AlphabetMismatch, "aux channel is defined on |S|=" +
                                                std::to_string(aux.s_size()) + ", source has |S|=" +
                                                std::to_string(src.s_size()));
    }
    const std::size_t ns = src.s_size(), nt = src.t_size(), ne = src.e_size();
    const std::size_t nu = aux.u_size(), nv = aux.v_size(), nw = aux.w_size();
    const std::vector<std::size_t> sizes{ns, nt, ne, nu, nv, nw};
    const std::size_t cells = checked_product(sizes, cell_cap);
    std::vector<double> mass(cells, 0.0);

    const auto& ps = src.p_s();
    const auto& kt = src.t_given_s();
    const auto& ke = src.e_given_t();
    const auto& ku = aux.u_given_s();
    const auto& kv = aux.v_given_us();
    const auto& kw = aux.w_given_uvs();
    const std::size_t uvw = nu * nv * nw;

    // The auxiliary factor depends on s only; compute it once per s.
    std::vector<double> aux_block(uvw);
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t u = 0; u < nu; ++u) {
            const double pu = ku(s, u);
            for (std::size_t v = 0; v < nv; ++v) {
                const double puv = pu * kv(u * ns + s, v);
                for (std::size_t w = 0; w < nw; ++w) {
                    aux_block[(u * nv + v) * nw + w] = puv * kw((u * nv + v) * ns + s, w);
                }
            }
        }
        for (std::size_t t = 0; t < nt; ++t) {
            const double pst = ps[s] * kt(s, t);
            for (std::size_t e = 0; e < ne; ++e) {
                const double pste = pst * ke(t, e);
                double* out = mass.data() + ((s * nt + t) * ne + e) * uvw;
                for (std::size_t k = 0; k < uvw; ++k) out[k] = pste * aux_block[k];
            }
        }
    }
    return JointDist({{"S", ns}, {"T", nt}, {"E", ne}, {"U", nu}, {"V", nv}, {"W", nw}},
                     std::move(mass), cell_cap);
}

SourceBlock sample_iid(const SourceModel& src, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error(Errc::InvalidArgument, "block length must be positive");
    Rng rng(seed);
    SourceBlock out;
    out.s.resize(n);
    out.t.resize(n);
    out.e.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = draw_index(src.p_s(), rng);
        const auto t = draw_index(src.t_given_s().row(s), rng);
        const auto e = draw_index(src.e_given_t().row(t), rng);
        out.s[i] = static_cast<Symbol>(s);
        out.t[i] = static_cast<Symbol>(t);
        out.e[i] = static_cast<Symbol>(e);
    }
    return out;
}

}  // namespace hjscc

#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hjscc/codec.hpp"
#include "hjscc/io.hpp"
#include "hjscc/oracle.hpp"
#include "hjscc/sampling.hpp"
#include "hjscc/search.hpp"

namespace hjscc::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::NoConvergence: return kNoConvergence;
        case Errc::NoFeasiblePoint: return kInfeasible;
        case Errc::SizeExplosion:
        case Errc::BudgetExceeded:
        case Errc::TensorTooLarge: return kResource;
        default: return kParseError;
    }
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::Parse, "cannot write " + path.string());
    f << text;
}

void write_manifest(const std::string& out, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::string>& outputs) {
    std::vector<std::string> all = outputs;
    all.push_back(out + ".manifest.json");
    const json m{{"schema_version", io::kSchemaVersion},
                 {"command", command},
                 {"config", config},
                 {"seed", seed},
                 {"tool_version", kToolVersion},
                 {"outputs", all}};
    write_text(out + ".manifest.json", m.dump(2) + "\n");
}

fs::path parent_of(const std::string& file) { return fs::path(file).parent_path(); }

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(v)) {
            throw Error(Errc::Parse, "grid entry '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) throw Error(Errc::Parse, "grid list is empty");
    return out;
}

Region parse_region(const std::string& r) {
    if (r == "R1" || r == "r1") return Region::R1;
    if (r == "R2" || r == "r2") return Region::R2;
    throw Error(Errc::Parse, "region must be R1 or R2");
}

ScenarioConfig default_scenario() {
    return ScenarioConfig(SourceModel::dsbs(0.1, 0.1), Channel::bsc(0.11), Channel::bsc(0.11), 1.0, 1.0);
}

// ------------------------------------------------------------- capacity

struct CapacityArgs {
    std::string channel;
    double tol = 1e-9;
    std::string out;
};

int cmd_capacity(const CapacityArgs& a, std::ostream& out) {
    const Channel ch = io::channel_from_json(io::load_json(a.channel));
    const CapacityResult r = capacity(ch, a.tol);
    out << "capacity " << fmt(r.capacity, 9) << " bits/use (gap " << std::scientific
        << std::setprecision(2) << r.gap << std::defaultfloat << ", " << r.iterations
        << " iterations)\ninput distribution";
    for (double p : r.input_dist) out << ' ' << fmt(p);
    out << '\n';
    const json doc = io::to_json(r);
    if (a.out.empty()) {
        out << doc.dump(2) << '\n';
    } else {
        write_text(a.out, doc.dump(2) + "\n");
        write_manifest(a.out, "capacity", {{"channel", io::to_json(ch)}, {"tol", a.tol}}, 0, {a.out});
    }
    return kOk;
}

// ------------------------------------------------------------- frontier

struct FrontierArgs {
    std::string scenario;
    std::string grid = "1:1";
    std::string region = "R1";
    std::size_t budget = 8;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t max_evals = 4000;
    std::string out;
};

int cmd_frontier(const FrontierArgs& a, std::ostream& out, std::ostream& err) {
    const ScenarioConfig sc = io::scenario_from_json(io::load_json(a.scenario), parent_of(a.scenario));
    const auto colon = a.grid.find(':');
    if (colon == std::string::npos) throw Error(Errc::Parse, "grid must look like d1,d1,...:d2,d2,...");
    const auto d1 = parse_list(a.grid.substr(0, colon));
    const auto d2 = parse_list(a.grid.substr(colon + 1));

    SearchOptions opts;
    opts.region = parse_region(a.region);
    opts.budget = a.budget;
    opts.seed = a.seed;
    opts.threads = a.threads;
    opts.max_evals = a.max_evals;
    const auto cells = frontier_sweep(sc, d1, d2, opts);

    std::ostringstream csv;
    write_frontier_csv(csv, cells);
    std::size_t feasible = 0;
    for (const auto& c : cells) feasible += c.best.has_value();

    if (a.out.empty()) {
        out << csv.str();
    } else {
        write_text(a.out, csv.str());
        const json config{{"scenario", io::to_json(sc)}, {"grid", a.grid},   {"region", a.region},
                          {"budget", a.budget},          {"max_evals", a.max_evals}};
        write_manifest(a.out, "frontier", config, a.seed, {a.out});
        out << "frontier: " << cells.size() << " cells, " << feasible << " feasible, written to " << a.out
            << '\n';
    }
    if (feasible == 0) {
        err << "NO_FEASIBLE_POINT: no grid cell admits a feasible auxiliary\n";
        return kInfeasible;
    }
    return kOk;
}

// ------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string experiment, scenario, aux;
    std::size_t trials = 1000;
    std::optional<std::size_t> n;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    std::uint64_t oracle_budget = std::uint64_t{1} << 26;
    std::string out, trial_csv;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    std::optional<io::Experiment> ex;
    if (!a.experiment.empty()) {
        ex = io::experiment_from_json(io::load_json(a.experiment), parent_of(a.experiment));
    } else if (!a.scenario.empty() && !a.aux.empty()) {
        ex = io::Experiment{io::scenario_from_json(io::load_json(a.scenario), parent_of(a.scenario)),
                            io::aux_from_json(io::load_json(a.aux)), codec::SimParams{}};
    } else {
        throw Error(Errc::Parse, "simulate needs --experiment, or both --scenario and --aux");
    }
    if (a.n) ex->sim.n = *a.n;
    if (a.delta) ex->sim.delta = *a.delta;
    if (a.seed) ex->sim.seed = *a.seed;
    ex->sim.validate();

    const codec::CodebookSet cb = codec::build_codebooks(ex->aux, ex->scenario, ex->sim);
    std::vector<codec::TrialRow> rows;
    const auto sum = codec::run_experiment(cb, a.trials, a.threads, a.trial_csv.empty() ? nullptr : &rows);

    json doc = io::to_json(sum);
    doc["oracle"] = nullptr;
    if (a.oracle_budget > 0) {
        try {
            doc["oracle"] = io::to_json(oracle::oracle_report(cb, {a.oracle_budget}));
        } catch (const Error& e) {
            if (e.code() != Errc::BudgetExceeded) throw;
            err << "note: oracle skipped (" << e.what() << ")\n";
        }
    }

    out << "n=" << cb.sizes.n << " delta=" << ex->sim.delta << " trials=" << sum.trials << '\n'
        << "mean d1 " << fmt(sum.mean_d1) << " (region " << fmt(sum.region_d1) << "), mean d2 "
        << fmt(sum.mean_d2) << " (region " << fmt(sum.region_d2) << ")\n"
        << "error rates: encoder " << fmt(sum.enc_err_rate, 4) << ", phase 1 " << fmt(sum.dec1_err_rate, 4)
        << ", phase 2 " << fmt(sum.dec2_err_rate, 4) << "; pipe overflow " << fmt(sum.overflow1_rate, 4)
        << " / " << fmt(sum.overflow2_rate, 4) << '\n';
    if (!doc["oracle"].is_null()) {
        out << "leakage exact " << fmt(doc["oracle"]["leakage_exact"].get<double>()) << " vs bound "
            << fmt(doc["oracle"]["leakage_bound"].get<double>()) << ", secure index "
            << fmt(doc["oracle"]["secure_index"].get<double>()) << '\n';
    }

    std::vector<std::string> outputs;
    if (!a.trial_csv.empty()) {
        std::ostringstream csv;
        csv << "trial,enc_err,dec1_err,dec2_err,d1,d2\n";
        for (const auto& r : rows) {
            csv << r.trial << ',' << r.enc_err << ',' << r.dec1_err << ',' << r.dec2_err << ',' << num(r.d1)
                << ',' << num(r.d2) << '\n';
        }
        write_text(a.trial_csv, csv.str());
        outputs.push_back(a.trial_csv);
    }
    if (a.out.empty()) {
        out << doc.dump(2) << '\n';
    } else {
        write_text(a.out, doc.dump(2) + "\n");
        outputs.insert(outputs.begin(), a.out);
    }
    if (!a.out.empty()) {
        const json config{{"scenario", io::to_json(ex->scenario)},
                          {"aux", io::to_json(ex->aux)},
                          {"sim", io::to_json(ex->sim)},
                          {"trials", a.trials},
                          {"oracle_budget", a.oracle_budget}};
        write_manifest(a.out, "simulate", config, ex->sim.seed, outputs);
    }
    return kOk;
}

// --------------------------------------------------------------- verify

struct VerifyArgs {
    std::string scenario;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out;
};

struct Tally {
    std::size_t passed = 0, failed = 0, skipped = 0;
    double worst = 0.0;

    json to_json() const {
        return {{"passed", passed}, {"failed", failed}, {"skipped", skipped}, {"worst", worst}};
    }
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    const ScenarioConfig sc = a.scenario.empty()
                                  ? default_scenario()
                                  : io::scenario_from_json(io::load_json(a.scenario), parent_of(a.scenario));
    const std::size_t ns = sc.src().s_size();
    Rng rng(derive_seed(a.seed, 0));
    std::uniform_int_distribution<std::size_t> size(1, ns + 1);

    Tally forms, identity, inclusion;
    for (std::size_t i = 0; i < a.samples; ++i) {
        const AuxChannel aux = random_aux(ns, size(rng), size(rng), size(rng), rng);
        const RegionPoint p = evaluate_point(aux, sc);
        const auto& t = p.terms;

        const double id_err = std::abs(t.v_t_given_u - t.v_e_given_u - t.v_t_given_eu);
        identity.worst = std::max(identity.worst, id_err);
        (id_err <= 1e-10 ? identity.passed : identity.failed)++;

        if (sc.budget2() >= t.v_s_given_tu) {
            const double f_err = std::abs(p.leakage_lb - p.leakage_remark);
            forms.worst = std::max(forms.worst, f_err);
            (f_err <= 1e-9 ? forms.passed : forms.failed)++;
        } else {
            ++forms.skipped;
        }

        if (p.feasible_r1) {
            (p.feasible_r2 ? inclusion.passed : inclusion.failed)++;
        } else {
            ++inclusion.skipped;
        }
    }

    out << "leakage-form equivalence: " << forms.passed << " passed, " << forms.failed << " failed, "
        << forms.skipped << " skipped (phase 2 overloaded); worst |diff| " << forms.worst << '\n'
        << "key-rate identity: " << identity.passed << " passed, " << identity.failed
        << " failed; worst |diff| " << identity.worst << '\n'
        << "R1 => R2 inclusion: " << inclusion.passed << " passed, " << inclusion.failed << " failed, "
        << inclusion.skipped << " skipped (not R1-feasible)\n";

    json report{{"schema_version", io::kSchemaVersion},
                {"samples", a.samples},
                {"seed", a.seed},
                {"leakage_forms", forms.to_json()},
                {"key_rate_identity", identity.to_json()},
                {"inclusion", inclusion.to_json()}};

    if (sc.budget2() >= sc.budget1()) {
        SearchOptions opts;
        opts.budget = 2;
        opts.seed = a.seed;
        opts.threads = a.threads;
        opts.max_evals = 1500;
        json gaps = json::array();
        double lo = INFINITY, hi = -INFINITY, total = 0.0;
        std::size_t cells = 0, soft = 0;
        for (double d1 : {0.2, 0.5}) {
            for (double d2 : {0.1, 0.3}) {
                opts.d1_max = d1;
                opts.d2_max = d2;
                std::optional<double> l1, l2;
                try {
                    opts.region = Region::R1;
                    l1 = minimize_leakage(sc, opts).point.leakage_lb;
                } catch (const Error& e) {
                    if (e.code() != Errc::NoFeasiblePoint) throw;
                }
                try {
                    opts.region = Region::R2;
                    l2 = minimize_leakage(sc, opts).point.leakage_lb;
                } catch (const Error& e) {
                    if (e.code() != Errc::NoFeasiblePoint) throw;
                }
                json cell{{"d1_max", d1}, {"d2_max", d2}, {"r1", nullptr}, {"r2", nullptr}, {"gap", nullptr}};
                if (l1) cell["r1"] = *l1;
                if (l2) cell["r2"] = *l2;
                if (l1 && l2) {
                    const double g = *l2 - *l1;
                    cell["gap"] = g;
                    lo = std::min(lo, g);
                    hi = std::max(hi, g);
                    total += g;
                    ++cells;
                    soft += g < -0.02;
                }
                gaps.push_back(cell);
            }
        }
        report["frontier_gap"] = gaps;
        out << "frontier gap (R2 - R1) over " << cells << " cells";
        if (cells) out << ": min " << fmt(lo) << ", mean " << fmt(total / cells) << ", max " << fmt(hi);
        out << "; cells below -0.02: " << soft << '\n';
    } else {
        report["frontier_gap"] = "skipped: rho2 C2 < rho1 C1";
        out << "frontier gap check skipped: rho2 C2 < rho1 C1\n";
    }

    const bool ok = forms.failed == 0 && identity.failed == 0 && inclusion.failed == 0;
    report["ok"] = ok;
    out << (ok ? "all hard invariants hold\n" : "HARD INVARIANT FAILURE\n");
    if (!a.out.empty()) {
        write_text(a.out, report.dump(2) + "\n");
        write_manifest(a.out, "verify", {{"scenario", io::to_json(sc)}, {"samples", a.samples}}, a.seed,
                       {a.out});
    }
    return ok ? kOk : kInvariantFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distortion-leakage regions and two-phase scheme simulator", "hjscc"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CapacityArgs ca;
    auto* cap = app.add_subcommand("capacity", "Channel capacity by Blahut-Arimoto");
    cap->add_option("--channel", ca.channel, "Channel JSON file")->required();
    cap->add_option("--tol", ca.tol, "Stopping gap in bits")->capture_default_str();
    cap->add_option("--out", ca.out, "Write the result JSON here");

    FrontierArgs fa;
    auto* fr = app.add_subcommand("frontier", "Leakage frontier over a distortion grid");
    fr->add_option("--scenario", fa.scenario, "Scenario JSON file")->required();
    fr->add_option("--grid", fa.grid, "d1 list and d2 list, e.g. 0.1,0.2:0,0.05")->capture_default_str();
    fr->add_option("--region", fa.region, "R1 or R2")->capture_default_str();
    fr->add_option("--budget", fa.budget, "Search restarts per cell")->capture_default_str();
    fr->add_option("--seed", fa.seed)->capture_default_str();
    fr->add_option("--threads", fa.threads)->capture_default_str();
    fr->add_option("--max-evals", fa.max_evals, "Objective evaluations per restart")->capture_default_str();
    fr->add_option("--out", fa.out, "CSV output path");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the coding scheme");
    sim->add_option("--experiment", sa.experiment, "Experiment JSON file");
    sim->add_option("--scenario", sa.scenario, "Scenario JSON (with --aux, instead of --experiment)");
    sim->add_option("--aux", sa.aux, "Auxiliary channel JSON");
    sim->add_option("--trials", sa.trials)->capture_default_str();
    sim->add_option("--n", sa.n, "Override the block length");
    sim->add_option("--delta", sa.delta, "Override the typicality slack");
    sim->add_option("--seed", sa.seed, "Override the seed");
    sim->add_option("--threads", sa.threads)->capture_default_str();
    sim->add_option("--oracle-budget", sa.oracle_budget, "Enumeration cap for the oracle (0 disables)")
        ->capture_default_str();
    sim->add_option("--out", sa.out, "Summary JSON path");
    sim->add_option("--trial-csv", sa.trial_csv, "Per-trial CSV path");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "Randomized invariant suites");
    ver->add_option("--scenario", va.scenario, "Scenario JSON (default: DSBS(0.1,0.1), BSC(0.11))");
    ver->add_option("--samples", va.samples)->capture_default_str();
    ver->add_option("--seed", va.seed)->capture_default_str();
    ver->add_option("--threads", va.threads)->capture_default_str();
    ver->add_option("--out", va.out, "Report JSON path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    try {
        if (*cap) return cmd_capacity(ca, out);
        if (*fr) return cmd_frontier(fa, out, err);
        if (*sim) return cmd_simulate(sa, out, err);
        return cmd_verify(va, out);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.code());
    }
}

}  // namespace hjscc::cli

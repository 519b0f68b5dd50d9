#include "hjscc/io.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace hjscc::io {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::Parse, msg); }

void check_schema(const json& j, const char* what) {
    if (!j.is_object()) fail(std::string(what) + " must be a JSON object");
    if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
        fail(std::string(what) + ": unsupported schema_version " + j.at("schema_version").dump());
    }
}

const json& field(const json& j, const char* key, const char* what) {
    if (!j.contains(key)) fail(std::string(what) + ": missing field '" + key + "'");
    return j.at(key);
}

// Runs a conversion, turning library type errors into parse errors that name the field.
template <class F>
auto convert(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        fail(std::string(what) + ": " + e.what());
    }
}

std::vector<double> vec(const json& j, const char* what) {
    return convert(what, [&] { return j.get<std::vector<double>>(); });
}

std::vector<std::vector<double>> matrix(const json& j, const char* what) {
    auto m = convert(what, [&] { return j.get<std::vector<std::vector<double>>>(); });
    if (m.empty()) fail(std::string(what) + ": empty matrix");
    return m;
}

// Flattens a nested array of depth `depth` (the last level is the output
// distribution) into kernel rows, recording the sizes of the outer levels.
void flatten(const json& j, std::size_t depth, std::vector<std::size_t>& sizes,
             std::vector<std::vector<double>>& rows, std::size_t level, const char* what) {
    if (level + 1 == depth) {
        rows.push_back(vec(j, what));
        return;
    }
    if (!j.is_array() || j.empty()) fail(std::string(what) + ": expected a nonempty nested array");
    if (sizes.size() <= level) {
        sizes.push_back(j.size());
    } else if (sizes[level] != j.size()) {
        fail(std::string(what) + ": ragged nested array");
    }
    for (const auto& sub : j) flatten(sub, depth, sizes, rows, level + 1, what);
}

CondKernel kernel(const json& j, std::size_t inputs, const char* what) {
    std::vector<std::size_t> sizes;
    std::vector<std::vector<double>> rows;
    if (inputs == 1) {
        rows = matrix(j, what);
        sizes.push_back(rows.size());
    } else {
        flatten(j, inputs + 1, sizes, rows, 0, what);
    }
    return CondKernel::from_rows(sizes, rows);
}

json rows_of(const CondKernel& k) { return k.to_rows(); }

// Regroups kernel rows into the nested layout of the input sizes.
json nested(const CondKernel& k) {
    const auto rows = k.to_rows();
    const auto& in = k.input_sizes();
    std::function<json(std::size_t, std::size_t)> build = [&](std::size_t level, std::size_t offset) {
        if (level == in.size()) return json(rows[offset]);
        json arr = json::array();
        std::size_t stride = 1;
        for (std::size_t l = level + 1; l < in.size(); ++l) stride *= in[l];
        for (std::size_t i = 0; i < in[level]; ++i) arr.push_back(build(level + 1, offset + i * stride));
        return arr;
    };
    return build(0, 0);
}

json resolve(const json& j, const std::filesystem::path& base) {
    if (j.is_string()) return load_json(base / j.get<std::string>());
    return j;
}

std::string mode_name(codec::ChannelMode m) {
    return m == codec::ChannelMode::IdealPipe ? "IDEAL_PIPE" : "RANDOM_CODE";
}

}  // namespace

json parse_json(const std::string& text, const std::string& name) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string detail = e.what();
        if (const auto pos = detail.find(": "); pos != std::string::npos) detail = detail.substr(pos + 2);
        throw Error(Errc::Parse, name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + detail);
    }
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Parse, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path.string());
}

SourceModel source_from_json(const json& j) {
    check_schema(j, "source");
    return SourceModel(vec(field(j, "p_s", "source"), "source.p_s"),
                       kernel(field(j, "t_given_s", "source"), 1, "source.t_given_s"),
                       kernel(field(j, "e_given_t", "source"), 1, "source.e_given_t"));
}

AuxChannel aux_from_json(const json& j) {
    check_schema(j, "aux");
    return AuxChannel(kernel(field(j, "u_given_s", "aux"), 1, "aux.u_given_s"),
                      kernel(field(j, "v_given_us", "aux"), 2, "aux.v_given_us"),
                      kernel(field(j, "w_given_uvs", "aux"), 3, "aux.w_given_uvs"));
}

Channel channel_from_json(const json& j) {
    check_schema(j, "channel");
    return Channel(kernel(field(j, "transition", "channel"), 1, "channel.transition"));
}

ScenarioConfig scenario_from_json(const json& j, const std::filesystem::path& base) {
    check_schema(j, "scenario");
    std::optional<DistortionMeasure> dm;
    if (j.contains("distortion")) {
        const auto m = matrix(j.at("distortion"), "scenario.distortion");
        std::vector<double> flat;
        for (const auto& row : m) {
            if (row.size() != m[0].size()) fail("scenario.distortion: ragged matrix");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        dm = DistortionMeasure(m.size(), m[0].size(), std::move(flat));
    }
    const double rho1 = convert("scenario.rho1", [&] { return field(j, "rho1", "scenario").get<double>(); });
    const double rho2 = convert("scenario.rho2", [&] { return field(j, "rho2", "scenario").get<double>(); });
    const double tol = convert("scenario.capacity_tol",
                               [&] { return j.value("capacity_tol", kDefaultCapacityTol); });
    return ScenarioConfig(source_from_json(resolve(field(j, "source", "scenario"), base)),
                          channel_from_json(resolve(field(j, "ch1", "scenario"), base)),
                          channel_from_json(resolve(field(j, "ch2", "scenario"), base)), rho1, rho2,
                          std::move(dm), tol);
}

codec::SimParams sim_from_json(const json& j) {
    check_schema(j, "sim");
    codec::SimParams sp;
    convert("sim", [&] {
        sp.n = j.value("n", sp.n);
        sp.delta = j.value("delta", sp.delta);
        sp.seed = j.value("seed", sp.seed);
        sp.max_words = j.value("max_words", sp.max_words);
        const std::string mode = j.value("channel_mode", std::string("IDEAL_PIPE"));
        if (mode == "IDEAL_PIPE") {
            sp.mode = codec::ChannelMode::IdealPipe;
        } else if (mode == "RANDOM_CODE") {
            sp.mode = codec::ChannelMode::RandomCode;
        } else {
            fail("sim.channel_mode must be IDEAL_PIPE or RANDOM_CODE");
        }
        return 0;
    });
    sp.validate();
    return sp;
}

Experiment experiment_from_json(const json& j, const std::filesystem::path& base) {
    check_schema(j, "experiment");
    const json sim = j.contains("sim") ? j.at("sim") : json::object();
    return Experiment{scenario_from_json(resolve(field(j, "scenario", "experiment"), base), base),
                      aux_from_json(resolve(field(j, "aux", "experiment"), base)), sim_from_json(sim)};
}

json to_json(const SourceModel& src) {
    return {{"schema_version", kSchemaVersion},
            {"p_s", src.p_s()},
            {"t_given_s", rows_of(src.t_given_s())},
            {"e_given_t", rows_of(src.e_given_t())}};
}

json to_json(const AuxChannel& aux) {
    return {{"schema_version", kSchemaVersion},
            {"u_given_s", nested(aux.u_given_s())},
            {"v_given_us", nested(aux.v_given_us())},
            {"w_given_uvs", nested(aux.w_given_uvs())}};
}

json to_json(const Channel& ch) {
    return {{"schema_version", kSchemaVersion}, {"transition", rows_of(ch.transition())}};
}

json to_json(const ScenarioConfig& sc) {
    return {{"schema_version", kSchemaVersion},
            {"source", to_json(sc.src())},
            {"ch1", to_json(sc.ch1())},
            {"ch2", to_json(sc.ch2())},
            {"rho1", sc.rho1()},
            {"rho2", sc.rho2()},
            {"distortion", sc.distortion().to_rows()},
            {"capacity_tol", sc.capacity_tol()}};
}

json to_json(const codec::SimParams& sp) {
    return {{"schema_version", kSchemaVersion},
            {"n", sp.n},
            {"delta", sp.delta},
            {"channel_mode", mode_name(sp.mode)},
            {"seed", sp.seed},
            {"max_words", sp.max_words}};
}

json to_json(const CapacityResult& cap) {
    return {{"schema_version", kSchemaVersion},
            {"capacity", cap.capacity},
            {"input_dist", cap.input_dist},
            {"gap", cap.gap},
            {"iterations", cap.iterations}};
}

json to_json(const codec::ExperimentSummary& s) {
    const auto& z = s.sizes;
    auto layer = [](const codec::LayerSize& l) {
        return json{{"words", l.words}, {"bins", l.bins}, {"collapsed", l.collapsed}};
    };
    return {{"schema_version", kSchemaVersion},
            {"trials", s.trials},
            {"mean_d1", s.mean_d1},
            {"mean_d2", s.mean_d2},
            {"enc_err_rate", s.enc_err_rate},
            {"dec1_err_rate", s.dec1_err_rate},
            {"dec2_err_rate", s.dec2_err_rate},
            {"overflow1_rate", s.overflow1_rate},
            {"overflow2_rate", s.overflow2_rate},
            {"region", {{"d1", s.region_d1}, {"d2", s.region_d2}, {"leakage_lb", s.region_leakage}}},
            {"books",
             {{"n", z.n},
              {"n1", z.n1},
              {"n2", z.n2},
              {"u", layer(z.u)},
              {"v", layer(z.v)},
              {"w", layer(z.w)},
              {"n_k1", z.n_k1},
              {"n_k2", z.n_k2},
              {"pad_modulus", z.pad_modulus},
              {"n_b2", z.n_b2},
              {"r_k1", z.r_k1},
              {"r_k2", z.r_k2},
              {"phase1_bits", z.phase1_bits},
              {"phase2_bits", z.phase2_bits},
              {"phase1_overflow", z.phase1_overflow},
              {"phase2_overflow", z.phase2_overflow},
              {"total_words", z.total_words}}}};
}

json to_json(const oracle::OracleReport& r) {
    return {{"leakage_exact", r.leakage_exact}, {"leakage_bound", r.leakage_bound},
            {"gap", r.gap},                     {"n", r.n},
            {"seed", r.seed},                   {"secure_index", r.secure_index}};
}

}  // namespace hjscc::io

// Batch experiment CLI: build/verify horseshoes, generate weights, run
// weighted averages, analyze integer matrices, run Riesz verifications.
// Every command is a thin shell over the library; outputs are CSV/JSON
// plus a manifest that pins inputs, seeds and output hashes.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ergo/birkhoff.hpp"
#include "ergo/horseshoe.hpp"
#include "ergo/json_io.hpp"
#include "ergo/toral.hpp"
#include "ergo/weights.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using ergo::io::Json;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ergo::CertificateFailure*>(&e)) return 2;
    if (dynamic_cast<const ergo::DepthExceeded*>(&e)) return 3;
    if (dynamic_cast<const ergo::Unsupported*>(&e)) return 3;
    return 1;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ergo::InvalidArgument("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ergo::InvalidArgument("cannot write " + path);
    out << bytes;
}

// Manifest next to the output: command line, input hashes, seed, output
// hashes, tool version.  Re-running the same manifest reproduces the
// output bytes.
void write_manifest(const std::string& out_path, const Json& command,
                    const Json& inputs, std::uint64_t seed) {
    Json m;
    m["tool"] = "ergo";
    m["version"] = kVersion;
    m["command"] = command;
    m["inputs"] = inputs;
    m["seed"] = seed;
    Json outputs;
    outputs[out_path] = ergo::io::fnv1a(file_bytes(out_path));
    m["outputs"] = outputs;
    write_file(out_path + ".manifest.json", m.dump(2) + "\n");
}

// ERGO_OUT_DIR, when set, prefixes relative output paths.
std::string resolve_out(const std::string& out_path) {
    const char* dir = std::getenv("ERGO_OUT_DIR");
    if (!dir || out_path.empty() ||
        std::filesystem::path(out_path).is_absolute())
        return out_path;
    return (std::filesystem::path(dir) / out_path).string();
}

void emit(const std::string& out_path_in, const std::string& bytes,
          const Json& command, const Json& inputs, std::uint64_t seed) {
    const std::string out_path = resolve_out(out_path_in);
    if (out_path.empty()) {
        std::cout << bytes;
        return;
    }
    write_file(out_path, bytes);
    write_manifest(out_path, command, inputs, seed);
}

std::vector<ergo::toral::Rat> parse_rationals(const std::vector<std::string>& parts) {
    std::vector<ergo::toral::Rat> out;
    for (const std::string& s : parts) {
        const auto slash = s.find('/');
        if (slash == std::string::npos)
            out.emplace_back(ergo::toral::Int(s));
        else
            out.emplace_back(ergo::toral::Int(s.substr(0, slash)),
                             ergo::toral::Int(s.substr(slash + 1)));
    }
    return out;
}

ergo::symbolic::PointSpec point_from_json(const Json& j);

ergo::symbolic::PointSpec point_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const ergo::symbolic::Sided sided =
        j.value("sided", std::string("one")) == "two"
            ? ergo::symbolic::Sided::Two
            : ergo::symbolic::Sided::One;
    if (kind == "eventually_periodic")
        return ergo::symbolic::PointSpec::eventually_periodic(
            ergo::symbolic::Word(j.value("preamble", std::string())),
            ergo::symbolic::Word(j.at("period").get<std::string>()), sided);
    if (kind == "block_stream")
        return ergo::symbolic::PointSpec::block_stream(
            point_from_json(j.at("choices")),
            ergo::io::block_code_from_json(j));
    throw ergo::InvalidArgument("unknown point kind: " + kind);
}

ergo::birkhoff::Observable observable_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "cylinder_diff")
        return ergo::birkhoff::Observable::cylinder_indicator_diff(
            ergo::symbolic::Word(j.value("w0", std::string("0"))),
            ergo::symbolic::Word(j.value("w1", std::string("1"))));
    if (kind == "locally_constant") {
        std::map<std::string, ergo::birkhoff::Complex> table;
        for (const auto& [key, val] : j.at("table").items())
            table[key] = {val.at(0).get<double>(), val.at(1).get<double>()};
        return ergo::birkhoff::Observable::locally_constant(
            j.at("len").get<int>(), std::move(table));
    }
    if (kind == "character") {
        std::vector<ergo::toral::Int> h;
        for (const auto& c : j.at("h"))
            h.emplace_back(c.is_string() ? ergo::toral::Int(c.get<std::string>())
                                         : ergo::toral::Int(c.get<long long>()));
        return ergo::birkhoff::Observable::character(std::move(h));
    }
    throw ergo::InvalidArgument("unknown observable kind: " + kind);
}

// ---------------------------------------------------------------------------

int cmd_horseshoe_build(const std::string& cylinder, const std::string& sided,
                        const std::string& out) {
    const auto result = ergo::horseshoe::build_horseshoe_in_cylinder(
        ergo::symbolic::Word(cylinder),
        sided == "two" ? ergo::symbolic::Sided::Two : ergo::symbolic::Sided::One);
    const Json j = ergo::io::to_json(result);
    emit(out, j.dump(2) + "\n",
         Json{{"name", "horseshoe build"}, {"cylinder", cylinder}, {"sided", sided}},
         Json::object(), 0);
    return 0;
}

int cmd_horseshoe_disjointify(const std::string& g0, const std::string& g1,
                              const std::string& sided, int max_depth,
                              const std::string& out) {
    ergo::horseshoe::CodedHorseshoe h;
    h.generators = {ergo::symbolic::Word(g0), ergo::symbolic::Word(g1)};
    h.order = static_cast<int>(g0.size());
    h.sided = sided == "two" ? ergo::symbolic::Sided::Two
                             : ergo::symbolic::Sided::One;
    ergo::horseshoe::DisjointifyOptions opts;
    opts.max_depth = max_depth;
    const auto result = ergo::horseshoe::disjointify(h, opts);
    const Json j = ergo::io::to_json(result);
    emit(out, j.dump(2) + "\n",
         Json{{"name", "horseshoe disjointify"},
              {"g0", g0},
              {"g1", g1},
              {"sided", sided},
              {"max_depth", max_depth}},
         Json::object(), 0);
    return 0;
}

int cmd_horseshoe_verify(const std::string& cert_path) {
    const auto bundle =
        ergo::io::certified_horseshoe_from_json(load_json(cert_path));
    const bool ok =
        ergo::horseshoe::verify_certificate(bundle.horseshoe, bundle.certificate);
    std::cout << (ok ? "certificate OK" : "certificate FAILED") << ": "
              << cert_path << " (tau=" << bundle.horseshoe.order << ", "
              << bundle.certificate.offsets_checked.size() << " offsets)\n";
    return ok ? 0 : 2;
}

int cmd_weights_gen(const std::string& spec_path, std::int64_t n,
                    const std::string& mask, const std::string& out) {
    const Json spec_json = load_json(spec_path);
    const auto spec = ergo::io::weight_spec_from_json(spec_json);
    auto w = ergo::weights::generate(spec, static_cast<std::size_t>(n));
    if (!mask.empty()) {
        const auto comma = mask.find(',');
        if (comma == std::string::npos)
            throw ergo::InvalidArgument("--mask-residue expects q,j");
        w = ergo::weights::mask_residue(w, std::stoi(mask.substr(0, comma)),
                                        std::stoi(mask.substr(comma + 1)));
    }
    std::ostringstream csv;
    ergo::io::write_weights_csv(csv, w);
    emit(out, csv.str(),
         Json{{"name", "weights gen"}, {"n", n}, {"mask", mask}},
         Json{{"spec", ergo::io::fnv1a(spec_json.dump())}}, spec.seed);
    return 0;
}

int cmd_weights_index(const std::string& spec_path, std::int64_t n, int q,
                      const std::string& out) {
    const Json spec_json = load_json(spec_path);
    const auto spec = ergo::io::weight_spec_from_json(spec_json);
    const auto w = ergo::weights::generate(
        spec, static_cast<std::size_t>(q > 1 ? n * q : n));
    const auto grid = ergo::weights::geometric_grid(n);
    const auto rep = ergo::weights::nontriviality_index(w, grid);
    Json j;
    j["grid"] = rep.grid;
    j["averages"] = rep.averages;
    j["running_max"] = rep.running_max;
    if (q > 1) {
        const auto res = ergo::weights::best_residue(w, q, grid);
        j["best_residue"] = Json{{"q", q},
                                 {"j0", res.j0},
                                 {"final_averages", res.final_averages}};
    }
    emit(out, j.dump(2) + "\n",
         Json{{"name", "weights index"}, {"n", n}, {"q", q}},
         Json{{"spec", ergo::io::fnv1a(spec_json.dump())}}, spec.seed);
    return 0;
}

int cmd_average_run(const std::string& config_path, const std::string& out) {
    const Json cfg = load_json(config_path);
    const Json& sys_j = cfg.at("system");
    const std::string sys_kind = sys_j.at("kind").get<std::string>();

    ergo::birkhoff::SystemHandle sys;
    ergo::birkhoff::SystemPoint point;
    if (sys_kind == "full_shift") {
        sys = ergo::birkhoff::SystemHandle::full_shift(sys_j.value("m", 2));
        point = point_from_json(cfg.at("point"));
    } else if (sys_kind == "coded_subshift") {
        const auto bundle =
            ergo::io::certified_horseshoe_from_json(sys_j.at("cert"));
        sys = ergo::birkhoff::SystemHandle::coded_subshift(bundle.horseshoe);
        point = point_from_json(cfg.at("point"));
    } else if (sys_kind == "circle_rotation") {
        sys = ergo::birkhoff::SystemHandle::circle_rotation(
            sys_j.at("alpha").get<double>());
        point = ergo::birkhoff::TorusPoint{
            cfg.at("point").at("x").get<std::vector<double>>()};
    } else if (sys_kind == "toral_affine") {
        ergo::toral::ToralAffineMap map;
        map.B = ergo::io::int_matrix_from_json(sys_j.at("matrix"));
        map.b = parse_rationals(
            sys_j.value("b", std::vector<std::string>(map.B.d, "0")));
        sys = ergo::birkhoff::SystemHandle::toral_affine(std::move(map));
        point = ergo::birkhoff::TorusPoint{
            cfg.at("point").at("x").get<std::vector<double>>()};
    } else {
        throw ergo::InvalidArgument("unknown system kind: " + sys_kind);
    }

    const auto f = observable_from_json(cfg.at("observable"));
    const auto wspec = ergo::io::weight_spec_from_json(cfg.at("weight"));
    const std::int64_t n_max = cfg.at("grid").at("max").get<std::int64_t>();
    const auto w = ergo::weights::generate(wspec, static_cast<std::size_t>(n_max));
    const auto grid = ergo::weights::geometric_grid(n_max);
    const auto series = ergo::birkhoff::weighted_average_series(sys, f, point, w, grid);

    std::ostringstream csv;
    ergo::io::write_series_csv(csv, series);
    emit(out, csv.str(), Json{{"name", "average run"}},
         Json{{"config", ergo::io::fnv1a(cfg.dump())}}, wspec.seed);
    return 0;
}

int cmd_average_pair(const std::string& spec_path, std::int64_t n,
                     const std::string& out) {
    const Json spec_json = load_json(spec_path);
    const auto spec = ergo::io::weight_spec_from_json(spec_json);
    const auto w = ergo::weights::realize_real(
        ergo::weights::generate(spec, static_cast<std::size_t>(n))).seq;
    const auto [f, x] = ergo::birkhoff::fullshift_pair(w);
    const auto grid = ergo::weights::geometric_grid(n);
    const auto series = ergo::birkhoff::weighted_average_series(
        ergo::birkhoff::SystemHandle::full_shift(2), f, x, w, grid);

    // The defining identity: A_N equals the Cesaro average of |w_n|.
    const auto index = ergo::weights::nontriviality_index(w, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(series.values[i].real() -
                                         index.averages[i]));
    std::ostringstream csv;
    ergo::io::write_series_csv(csv, series);
    emit(out, csv.str(), Json{{"name", "average pair"}, {"n", n}},
         Json{{"spec", ergo::io::fnv1a(spec_json.dump())}}, spec.seed);
    std::cerr << "pair identity max deviation: " << worst << "\n";
    return worst < 1e-9 ? 0 : 2;
}

int cmd_average_lift(const std::string& cert_path, const std::string& spec_path,
                     std::int64_t n_coded, const std::string& out) {
    const auto bundle =
        ergo::io::certified_horseshoe_from_json(load_json(cert_path));
    if (!ergo::horseshoe::verify_certificate(bundle.horseshoe,
                                             bundle.certificate))
        throw ergo::CertificateFailure("certificate failed re-verification");
    const int tau = bundle.horseshoe.order;
    const Json spec_json = load_json(spec_path);
    const auto spec = ergo::io::weight_spec_from_json(spec_json);
    const auto w = ergo::weights::realize_real(
        ergo::weights::generate(
            spec, static_cast<std::size_t>(n_coded) * static_cast<std::size_t>(tau))).seq;

    auto g = std::make_shared<ergo::birkhoff::Observable>(
        ergo::birkhoff::Observable::cylinder_indicator_diff());
    const auto code_x0 = ergo::symbolic::PointSpec::eventually_periodic(
        ergo::symbolic::Word(""), ergo::symbolic::Word("01"));
    const auto lift =
        ergo::birkhoff::lift_pair(bundle.horseshoe, bundle.certificate, g,
                                  code_x0, w);

    const std::int64_t ambient_grid[] = {tau * n_coded};
    const auto ambient = ergo::birkhoff::weighted_average_series(
        ergo::birkhoff::SystemHandle::full_shift(2), lift.ambient_f,
        lift.ambient_x, w, ambient_grid);

    ergo::weights::WeightSequence coded_w;
    coded_w.spec.kind = ergo::weights::WeightSpec::Kind::CustomTable;
    for (std::int64_t m = 0; m < n_coded; ++m)
        coded_w.cache.push_back(
            w.at(static_cast<std::size_t>(m * tau + lift.j0)));
    coded_w.spec.table = coded_w.cache;
    const std::int64_t coded_grid[] = {n_coded};
    const auto coded = ergo::birkhoff::weighted_average_series(
        ergo::birkhoff::SystemHandle::coded_subshift(bundle.horseshoe), *g,
        ergo::symbolic::PointSpec::shifted(code_x0, 1), coded_w, coded_grid);

    const double diff = std::abs(ambient.values.back() -
                                 coded.values.back() / static_cast<double>(tau));
    Json j;
    j["tau"] = tau;
    j["j0"] = lift.j0;
    j["N"] = n_coded;
    j["ambient_re"] = ambient.values.back().real();
    j["coded_re"] = coded.values.back().real();
    j["identity_deviation"] = diff;
    j["bound_2tau_over_N"] =
        2.0 * static_cast<double>(tau) / static_cast<double>(n_coded);
    emit(out, j.dump(2) + "\n", Json{{"name", "average lift"}, {"N", n_coded}},
         Json{{"cert", ergo::io::fnv1a(file_bytes(cert_path))},
              {"spec", ergo::io::fnv1a(spec_json.dump())}},
         spec.seed);
    return diff <= 2.0 * static_cast<double>(tau) / static_cast<double>(n_coded)
               ? 0
               : 2;
}

int cmd_toral_analyze(const std::string& matrix_path, const std::string& out) {
    const Json mj = load_json(matrix_path);
    const auto B = ergo::io::int_matrix_from_json(mj);
    Json j = ergo::io::to_json(ergo::toral::spectral_analysis(B));
    j["classification"] = ergo::io::to_json(ergo::toral::classify(B));
    emit(out, j.dump(2) + "\n", Json{{"name", "toral analyze"}},
         Json{{"matrix", ergo::io::fnv1a(mj.dump())}}, 0);
    return 0;
}

int cmd_toral_classify(const std::string& matrix_path, const std::string& out) {
    const Json mj = load_json(matrix_path);
    const Json j = ergo::io::to_json(
        ergo::toral::classify(ergo::io::int_matrix_from_json(mj)));
    emit(out, j.dump(2) + "\n", Json{{"name", "toral classify"}},
         Json{{"matrix", ergo::io::fnv1a(mj.dump())}}, 0);
    return 0;
}

int cmd_toral_plan(const std::string& matrix_path, int horizon, int q_max,
                   const std::string& out) {
    const Json mj = load_json(matrix_path);
    const auto B = ergo::io::int_matrix_from_json(mj);
    const auto sd = ergo::toral::spectral_analysis(B);
    const auto h0 = ergo::toral::choose_h0(sd);
    const auto choice = ergo::toral::choose_plan(B, h0, horizon, q_max);
    Json j;
    Json h0j = Json::array();
    for (const auto& c : h0) h0j.push_back(c.str());
    j["h0"] = h0j;
    j["q"] = choice.plan.q;
    j["theta"] = choice.plan.theta;
    j["delta"] = choice.plan.delta;
    j["horizon"] = choice.plan.horizon;
    j["report"] = ergo::io::to_json(choice.report);
    emit(out, j.dump(2) + "\n",
         Json{{"name", "toral plan"}, {"horizon", horizon}, {"q_max", q_max}},
         Json{{"matrix", ergo::io::fnv1a(mj.dump())}}, 0);
    return 0;
}

int cmd_toral_riesz_verify(const std::string& config_path, std::uint64_t seed,
                           int jobs, const std::string& out,
                           const std::string& samples_csv) {
    const Json cfg = load_json(config_path);
    ergo::toral::ToralAffineMap map;
    map.B = ergo::io::int_matrix_from_json(cfg.at("matrix"));
    map.b = parse_rationals(
        cfg.value("b", std::vector<std::string>(map.B.d, "0")));

    const int q = cfg.value("q", 1);
    const int K = cfg.at("K").get<int>();
    const int N = cfg.at("N").get<int>();
    const double r = cfg.at("r").get<double>();
    const std::size_t samples = cfg.at("samples").get<std::size_t>();

    std::vector<ergo::toral::Int> h0;
    if (cfg.contains("h0"))
        for (const auto& c : cfg.at("h0"))
            h0.emplace_back(c.is_string() ? ergo::toral::Int(c.get<std::string>())
                                          : ergo::toral::Int(c.get<long long>()));
    else
        h0 = ergo::toral::choose_h0(ergo::toral::spectral_analysis(map.B));

    const auto wspec = ergo::io::weight_spec_from_json(cfg.at("weight"));
    const auto w = ergo::weights::generate(
        wspec, static_cast<std::size_t>(q) * static_cast<std::size_t>(N) + 1);

    auto plan = ergo::toral::make_plan(map.B, h0, q, std::max(K, 8));
    bool b_zero = true;
    for (const auto& c : map.b)
        if (c != 0) b_zero = false;
    ergo::toral::RieszSpec spec =
        b_zero && wspec.kind == ergo::weights::WeightSpec::Kind::Constant &&
                wspec.value == ergo::weights::Complex{1.0, 0.0}
            ? ergo::toral::make_riesz_spec(plan, r, K, seed)
            : ergo::toral::make_riesz_spec(
                  plan, r, K, seed, w,
                  ergo::toral::psi_sequence(map.B, map.b, h0, q * K));
    const auto rep = ergo::toral::verify_weighted_limit(map, w, spec, N,
                                                        samples, jobs);
    if (!samples_csv.empty()) {
        std::ostringstream csv;
        ergo::io::write_per_sample_csv(csv, rep);
        write_file(resolve_out(samples_csv), csv.str());
    }
    emit(out, ergo::io::to_json(rep).dump(2) + "\n",
         Json{{"name", "toral riesz-verify"}, {"jobs", jobs}},
         Json{{"config", ergo::io::fnv1a(cfg.dump())}}, seed);
    bool all_ok = true;
    for (const auto& st : rep.residues) all_ok = all_ok && st.within_3_stderr;
    return all_ok ? 0 : 2;
}

int cmd_control_rotation(double alpha, double beta, std::int64_t n_max,
                         const std::string& out) {
    const auto grid = ergo::weights::geometric_grid(n_max);
    const auto rep = ergo::birkhoff::ue_control(alpha, beta, grid);
    Json j;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["denom"] = rep.denom;
    j["grid"] = rep.grid;
    j["abs_values"] = rep.abs_values;
    j["ratios"] = rep.ratios;
    j["max_ratio"] = rep.max_ratio;
    j["bound_holds"] = rep.bound_holds;
    j["resonance_warning"] = rep.resonance_warning;
    emit(out, j.dump(2) + "\n",
         Json{{"name", "control rotation"},
              {"alpha", alpha},
              {"beta", beta},
              {"n_max", n_max}},
         Json::object(), 0);
    return rep.bound_holds ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic horseshoe certificates, weighted Birkhoff averages, "
                 "and Riesz-product experiments"};
    app.require_subcommand(1);

    std::string cylinder, g0, g1, sided = "one", out, cert_path, spec_path,
                config_path, matrix_path, mask, samples_csv;
    std::int64_t n = 0, n_max = 0;
    int max_depth = 16, q = 1, horizon = 8, q_max = 16, jobs = 1;
    std::uint64_t seed = 0;
    double alpha = 0.0, beta = 0.0;
    bool seed_set = false;

    auto* horseshoe_cmd = app.add_subcommand("horseshoe", "coded horseshoes");
    auto* hs_build = horseshoe_cmd->add_subcommand("build", "horseshoe in a cylinder");
    hs_build->add_option("--cylinder", cylinder, "cylinder word")->required();
    hs_build->add_option("--sided", sided, "one|two");
    hs_build->add_option("--out", out, "output JSON path");
    auto* hs_disj = horseshoe_cmd->add_subcommand(
        "disjointify", "full first-return certificate from a horseshoe");
    hs_disj->add_option("--g0", g0, "first generator")->required();
    hs_disj->add_option("--g1", g1, "second generator")->required();
    hs_disj->add_option("--sided", sided, "one|two");
    hs_disj->add_option("--max-depth", max_depth, "witness search depth cap");
    hs_disj->add_option("--out", out, "output JSON path");
    auto* hs_verify = horseshoe_cmd->add_subcommand("verify", "re-check a certificate");
    hs_verify->add_option("cert", cert_path, "certificate JSON")->required();

    auto* weights_cmd = app.add_subcommand("weights", "weight sequences");
    auto* w_gen = weights_cmd->add_subcommand("gen", "generate a prefix as CSV");
    w_gen->add_option("--spec", spec_path, "weight spec JSON")->required();
    w_gen->add_option("--n", n, "prefix length")->required();
    w_gen->add_option("--mask-residue", mask, "q,j: keep residue j mod q");
    w_gen->add_option("--out", out, "output CSV path");
    auto* w_index = weights_cmd->add_subcommand("index", "non-triviality index");
    w_index->add_option("--spec", spec_path, "weight spec JSON")->required();
    w_index->add_option("--n", n, "grid maximum")->required();
    w_index->add_option("--q", q, "also report best residue mod q");
    w_index->add_option("--out", out, "output JSON path");

    auto* average_cmd = app.add_subcommand("average", "weighted Birkhoff averages");
    auto* a_run = average_cmd->add_subcommand("run", "series from a config");
    a_run->add_option("--config", config_path, "experiment JSON")->required();
    a_run->add_option("--out", out, "output CSV path");
    auto* a_pair = average_cmd->add_subcommand(
        "pair", "correlated pair identity on the full shift");
    a_pair->add_option("--spec", spec_path, "weight spec JSON")->required();
    a_pair->add_option("--n", n, "series length")->required();
    a_pair->add_option("--out", out, "output CSV path");
    auto* a_lift = average_cmd->add_subcommand(
        "lift", "lift a coded pair through a certificate");
    a_lift->add_option("--cert", cert_path, "certificate JSON")->required();
    a_lift->add_option("--spec", spec_path, "weight spec JSON")->required();
    a_lift->add_option("--n", n, "coded series length")->required();
    a_lift->add_option("--out", out, "output JSON path");

    auto* toral_cmd = app.add_subcommand("toral", "integer toral maps");
    auto* t_analyze = toral_cmd->add_subcommand("analyze", "spectral data");
    t_analyze->add_option("--matrix", matrix_path, "matrix JSON")->required();
    t_analyze->add_option("--out", out, "output JSON path");
    auto* t_classify = toral_cmd->add_subcommand("classify", "hyperbolicity class");
    t_classify->add_option("--matrix", matrix_path, "matrix JSON")->required();
    t_classify->add_option("--out", out, "output JSON path");
    auto* t_plan = toral_cmd->add_subcommand("plan", "lacunary frequency plan");
    t_plan->add_option("--matrix", matrix_path, "matrix JSON")->required();
    t_plan->add_option("--horizon", horizon, "brute-force horizon D");
    t_plan->add_option("--q-max", q_max, "largest split to try");
    t_plan->add_option("--out", out, "output JSON path");
    auto* t_riesz = toral_cmd->add_subcommand(
        "riesz-verify", "Monte-Carlo weighted-limit verification");
    t_riesz->add_option("--config", config_path, "verification JSON")->required();
    t_riesz->add_option("--seed", seed, "RNG seed (required)")
        ->required()
        ->each([&](const std::string&) { seed_set = true; });
    t_riesz->add_option("--jobs", jobs, "worker threads");
    t_riesz->add_option("--out", out, "output JSON path");
    t_riesz->add_option("--samples-csv", samples_csv,
                        "also dump per-sample averages as CSV");

    auto* control_cmd = app.add_subcommand("control", "negative controls");
    auto* c_rot = control_cmd->add_subcommand(
        "rotation", "uniquely ergodic rotation bound");
    c_rot->add_option("--alpha", alpha, "rotation angle")->required();
    c_rot->add_option("--beta", beta, "weight phase")->required();
    c_rot->add_option("--n-max", n_max, "largest grid N")->required();
    c_rot->add_option("--out", out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (hs_build->parsed()) return cmd_horseshoe_build(cylinder, sided, out);
        if (hs_disj->parsed())
            return cmd_horseshoe_disjointify(g0, g1, sided, max_depth, out);
        if (hs_verify->parsed()) return cmd_horseshoe_verify(cert_path);
        if (w_gen->parsed()) return cmd_weights_gen(spec_path, n, mask, out);
        if (w_index->parsed()) return cmd_weights_index(spec_path, n, q, out);
        if (a_run->parsed()) return cmd_average_run(config_path, out);
        if (a_pair->parsed()) return cmd_average_pair(spec_path, n, out);
        if (a_lift->parsed()) return cmd_average_lift(cert_path, spec_path, n, out);
        if (t_analyze->parsed()) return cmd_toral_analyze(matrix_path, out);
        if (t_classify->parsed()) return cmd_toral_classify(matrix_path, out);
        if (t_plan->parsed()) return cmd_toral_plan(matrix_path, horizon, q_max, out);
        if (t_riesz->parsed())
            return cmd_toral_riesz_verify(config_path, seed, jobs, out,
                                          samples_csv);
        if (c_rot->parsed()) return cmd_control_rotation(alpha, beta, n_max, out);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}

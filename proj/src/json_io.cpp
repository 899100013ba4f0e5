#include "ergo/json_io.hpp"

#include <ostream>

namespace ergo::io {

namespace {

std::string sided_name(symbolic::Sided s) {
    return s == symbolic::Sided::One ? "one" : "two";
}

symbolic::Sided sided_from(const std::string& s) {
    if (s == "one") return symbolic::Sided::One;
    if (s == "two") return symbolic::Sided::Two;
    throw InvalidArgument("sided must be \"one\" or \"two\"");
}

}  // namespace

Json to_json(const symbolic::BlockCode& code) {
    return Json{{"phi0", code.phi0.str()}, {"phi1", code.phi1.str()}};
}

symbolic::BlockCode block_code_from_json(const Json& j) {
    return symbolic::BlockCode(symbolic::Word(j.at("phi0").get<std::string>()),
                               symbolic::Word(j.at("phi1").get<std::string>()));
}

Json to_json(const horseshoe::CertifiedHorseshoe& ch) {
    Json j;
    j["generators"] = Json::array();
    for (const symbolic::Word& g : ch.horseshoe.generators)
        j["generators"].push_back(g.str());
    j["tau"] = ch.horseshoe.order;
    j["sided"] = sided_name(ch.horseshoe.sided);
    j["marker_len"] = ch.horseshoe.marker_len;
    if (ch.horseshoe.ambient_code)
        j["ambient_code"] = to_json(*ch.horseshoe.ambient_code);
    j["offsets_checked"] = ch.certificate.offsets_checked;
    j["injectivity_checked"] = ch.certificate.injectivity_checked;
    j["trace"] = ch.certificate.trace;
    return j;
}

horseshoe::CertifiedHorseshoe certified_horseshoe_from_json(const Json& j) {
    horseshoe::CertifiedHorseshoe ch;
    for (const auto& g : j.at("generators"))
        ch.horseshoe.generators.emplace_back(g.get<std::string>());
    ch.horseshoe.order = j.at("tau").get<int>();
    ch.horseshoe.sided = sided_from(j.at("sided").get<std::string>());
    ch.horseshoe.marker_len = j.value("marker_len", 0);
    if (j.contains("ambient_code"))
        ch.horseshoe.ambient_code = block_code_from_json(j.at("ambient_code"));
    ch.certificate.tau = ch.horseshoe.order;
    ch.certificate.offsets_checked =
        j.at("offsets_checked").get<std::vector<int>>();
    ch.certificate.injectivity_checked =
        j.value("injectivity_checked", std::vector<int>{});
    ch.certificate.trace = j.value("trace", std::vector<std::string>{});
    return ch;
}

Json to_json(const horseshoe::ResidueCoverSolution& sol) {
    Json rows = Json::array();
    for (const horseshoe::ResidueCoverEntry& e : sol.table)
        rows.push_back(Json{{"n", e.n}, {"x", e.x}, {"prime", e.prime}});
    return Json{{"N", sol.N}, {"table", rows}};
}

Json to_json(const weights::WeightSpec& spec) {
    Json j;
    j["kind"] = spec.name();
    using Kind = weights::WeightSpec::Kind;
    switch (spec.kind) {
        case Kind::Constant:
            j["re"] = spec.value.real();
            j["im"] = spec.value.imag();
            break;
        case Kind::Phase:
        case Kind::LacunaryExp:
            j["beta"] = spec.beta;
            break;
        case Kind::PolyPhase:
            j["coefficients"] = spec.poly;
            break;
        case Kind::BernoulliPm1:
            j["seed"] = spec.seed;
            break;
        case Kind::Moebius:
            break;
        case Kind::CustomTable: {
            Json rows = Json::array();
            for (const weights::Complex& v : spec.table)
                rows.push_back(Json::array({v.real(), v.imag()}));
            j["table"] = rows;
            break;
        }
    }
    return j;
}

weights::WeightSpec weight_spec_from_json(const Json& j) {
    weights::WeightSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    using Kind = weights::WeightSpec::Kind;
    if (kind == "constant") {
        spec.kind = Kind::Constant;
        spec.value = {j.value("re", 1.0), j.value("im", 0.0)};
    } else if (kind == "phase") {
        spec.kind = Kind::Phase;
        spec.beta = j.at("beta").get<double>();
    } else if (kind == "lacunary_exp") {
        spec.kind = Kind::LacunaryExp;
        spec.beta = j.at("beta").get<double>();
    } else if (kind == "poly_phase") {
        spec.kind = Kind::PolyPhase;
        spec.poly = j.at("coefficients").get<std::vector<double>>();
    } else if (kind == "bernoulli_pm1") {
        spec.kind = Kind::BernoulliPm1;
        spec.seed = j.at("seed").get<std::uint64_t>();
    } else if (kind == "moebius") {
        spec.kind = Kind::Moebius;
    } else if (kind == "custom_table") {
        spec.kind = Kind::CustomTable;
        for (const auto& row : j.at("table"))
            spec.table.emplace_back(row.at(0).get<double>(),
                                    row.at(1).get<double>());
    } else {
        throw InvalidArgument("unknown weight kind: " + kind);
    }
    return spec;
}

Json to_json(const toral::IntMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.d; ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.d; ++j) row.push_back(m.at(i, j).str());
        rows.push_back(row);
    }
    return Json{{"d", m.d}, {"rows", rows}};
}

toral::IntMatrix int_matrix_from_json(const Json& j) {
    const int d = j.at("d").get<int>();
    toral::IntMatrix m(d);
    const Json& rows = j.at("rows");
    if (static_cast<int>(rows.size()) != d)
        throw InvalidArgument("matrix row count mismatch");
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d)
            throw InvalidArgument("matrix column count mismatch");
        for (int k = 0; k < d; ++k) {
            const Json& cell = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (cell.is_string())
                m.at(i, k) = toral::Int(cell.get<std::string>());
            else
                m.at(i, k) = toral::Int(cell.get<long long>());
        }
    }
    return m;
}

Json to_json(const toral::SpectralData& sd) {
    Json eigs = Json::array();
    for (const toral::Complex& z : sd.eigenvalues)
        eigs.push_back(Json{{"re", z.real()}, {"im", z.imag()},
                            {"abs", std::abs(z)}});
    Json vec = Json::array();
    for (const toral::Complex& z : sd.leading_eigenvector)
        vec.push_back(Json::array({z.real(), z.imag()}));
    return Json{{"eigenvalues", eigs},
                {"entropy", sd.entropy},
                {"spectral_radius", sd.spectral_radius},
                {"leading_eigenvector", vec},
                {"transform_norm_bound", sd.transform_norm_bound}};
}

Json to_json(const toral::Classification& c) {
    const char* cls = nullptr;
    switch (c.cls) {
        case toral::HyperbolicityClass::Hyperbolic: cls = "hyperbolic"; break;
        case toral::HyperbolicityClass::PartiallyHyperbolic:
            cls = "partially_hyperbolic";
            break;
        case toral::HyperbolicityClass::NoExpansion: cls = "no_expansion"; break;
    }
    return Json{{"class", cls},
                {"horseshoe_free", c.horseshoe_free},
                {"horseshoe_free_applicable", c.horseshoe_free_applicable},
                {"irreducible", c.irreducible},
                {"entropy", c.entropy}};
}

Json to_json(const toral::SplitReport& rep) {
    Json j{{"dissociate_ok", rep.dissociate_ok},
           {"split_ok", rep.split_ok},
           {"min_gap_class", rep.min_gap_class},
           {"min_gap_diff", rep.min_gap_diff},
           {"horizon", rep.horizon}};
    if (rep.collision) {
        j["collision"] = Json{{"eps_a", rep.collision->eps_a},
                              {"eps_b", rep.collision->eps_b}};
    }
    return j;
}

Json to_json(const toral::LimitReport& rep) {
    Json residues = Json::array();
    for (const toral::ResidueStat& st : rep.residues)
        residues.push_back(Json{{"residue", st.residue},
                                {"estimate_re", st.estimate.real()},
                                {"estimate_im", st.estimate.imag()},
                                {"stderr", st.stderr_est},
                                {"target", st.target},
                                {"within_3_stderr", st.within_3_stderr}});
    return Json{{"target", rep.target},
                {"estimate_re", rep.estimate.real()},
                {"estimate_im", rep.estimate.imag()},
                {"stderr", rep.stderr_est},
                {"n_samples", rep.n_samples},
                {"N", rep.N},
                {"truncation", Json{{"K", rep.K}, {"path", rep.path},
                                    {"bias_caveat", rep.truncation_bias_caveat}}},
                {"residues", residues}};
}

void write_series_csv(std::ostream& os, const birkhoff::AverageSeries& series) {
    os << "# ergo-series-csv v1 system=" << series.system
       << " observable=" << series.observable << " point=" << series.point
       << " weight=" << series.weight << "\n";
    os << "N,re,im,abs\n";
    os.precision(17);
    for (std::size_t i = 0; i < series.grid.size(); ++i) {
        const birkhoff::Complex v = series.values[i];
        os << series.grid[i] << ',' << v.real() << ',' << v.imag() << ','
           << std::abs(v) << '\n';
    }
}

void write_weights_csv(std::ostream& os, const weights::WeightSequence& w) {
    os << "# ergo-weights-csv v1 kind=" << w.spec.name() << "\n";
    os << "n,re,im\n";
    os.precision(17);
    for (std::size_t n = 0; n < w.cache.size(); ++n)
        os << n << ',' << w.cache[n].real() << ',' << w.cache[n].imag() << '\n';
}

void write_per_sample_csv(std::ostream& os, const toral::LimitReport& rep) {
    os << "# ergo-riesz-samples-csv v1 path=" << rep.path << " N=" << rep.N
       << " K=" << rep.K << "\n";
    os << "sample,residue,re,im,abs\n";
    os.precision(17);
    for (std::size_t r = 0; r < rep.per_sample.size(); ++r) {
        const int residue = rep.residues[r].residue;
        for (std::size_t i = 0; i < rep.per_sample[r].size(); ++i) {
            const toral::Complex v = rep.per_sample[r][i];
            os << i << ',' << residue << ',' << v.real() << ',' << v.imag()
               << ',' << std::abs(v) << '\n';
        }
    }
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace ergo::io

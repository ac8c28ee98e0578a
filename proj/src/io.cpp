#include "gmshape/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gmshape {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path);
    out << content;
    if (!out) throw Error("io", "write failed for " + path);
}

double parse_double(const std::string& tok, const std::string& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error("io", "bad numeric field '" + tok + "' in " + path);
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

}  // namespace

std::uint64_t hash_file(const std::string& path) { return fnv1a(read_file(path)); }

MixtureModel model_from_json(const json& j) {
    if (!j.is_object()) throw Error("io", "model JSON must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key == "d" || key == "k" || key == "weights" || key == "means" || key == "form")
            continue;
        if (key == "covariance" || key == "covariances" || key == "sigma" || key == "cov")
            throw Error("model",
                        "non-identity covariances are not supported (key '" + key + "')");
        throw Error("io", "unknown model key '" + key + "'");
    }

    MixtureModel m;
    try {
        m.d = j.at("d").get<int>();
        m.k = j.at("k").get<int>();
        const auto& jw = j.at("weights");
        m.weights.resize(static_cast<Eigen::Index>(jw.size()));
        for (std::size_t i = 0; i < jw.size(); ++i) m.weights[static_cast<Eigen::Index>(i)] = jw[i].get<double>();
        const auto& jm = j.at("means");
        m.means.resize(static_cast<Eigen::Index>(jm.size()), m.d);
        for (std::size_t i = 0; i < jm.size(); ++i) {
            if (static_cast<int>(jm[i].size()) != m.d)
                throw Error("model", "mean " + std::to_string(i) + " has wrong length");
            for (int c = 0; c < m.d; ++c) m.means(static_cast<Eigen::Index>(i), c) = jm[i][static_cast<std::size_t>(c)].get<double>();
        }
        if (j.contains("form")) {
            const auto& jf = j.at("form");
            const std::string kind = jf.at("kind").get<std::string>();
            if (kind == "euclidean") {
                m.form = DistanceForm::euclidean();
            } else if (kind == "diagonal") {
                const auto& js = jf.at("signs");
                Eigen::VectorXd signs(static_cast<Eigen::Index>(js.size()));
                for (std::size_t i = 0; i < js.size(); ++i) signs[static_cast<Eigen::Index>(i)] = js[i].get<double>();
                m.form = DistanceForm::diagonal(signs);
            } else if (kind == "matrix") {
                const auto& je = jf.at("entries");
                Eigen::MatrixXd mat(static_cast<Eigen::Index>(je.size()),
                                    static_cast<Eigen::Index>(je.size()));
                for (std::size_t r = 0; r < je.size(); ++r) {
                    if (je[r].size() != je.size())
                        throw Error("io", "form matrix rows must have equal length");
                    for (std::size_t c = 0; c < je[r].size(); ++c)
                        mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                            je[r][c].get<double>();
                }
                m.form = DistanceForm::full(mat);
            } else {
                throw Error("io", "unknown form kind '" + kind + "'");
            }
        }
    } catch (const json::exception& e) {
        throw Error("io", std::string("malformed model JSON: ") + e.what());
    }
    m.validate();
    return m;
}

json model_to_json(const MixtureModel& model) {
    json j;
    j["d"] = model.d;
    j["k"] = model.k;
    j["weights"] = json::array();
    for (int i = 0; i < model.k; ++i) j["weights"].push_back(model.weights[i]);
    j["means"] = json::array();
    for (int i = 0; i < model.k; ++i) {
        json row = json::array();
        for (int c = 0; c < model.d; ++c) row.push_back(model.means(i, c));
        j["means"].push_back(row);
    }
    switch (model.form.kind) {
        case FormKind::Euclidean:
            j["form"] = {{"kind", "euclidean"}};
            break;
        case FormKind::DiagonalSigns: {
            json signs = json::array();
            for (Eigen::Index i = 0; i < model.form.signs.size(); ++i)
                signs.push_back(model.form.signs[i]);
            j["form"] = {{"kind", "diagonal"}, {"signs", signs}};
            break;
        }
        case FormKind::FullMatrix: {
            json entries = json::array();
            for (Eigen::Index r = 0; r < model.form.matrix.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < model.form.matrix.cols(); ++c)
                    row.push_back(model.form.matrix(r, c));
                entries.push_back(row);
            }
            j["form"] = {{"kind", "matrix"}, {"entries", entries}};
            break;
        }
    }
    return j;
}

MixtureModel load_model(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error("io", "cannot parse " + path + ": " + e.what());
    }
    return model_from_json(j);
}

void save_model(const MixtureModel& model, const std::string& path) {
    write_file(path, model_to_json(model).dump(2) + "\n");
}

void save_deltas(const DeltaSamples& samples, const std::string& path) {
    std::ostringstream ss;
    for (double v : samples.values) ss << format_g17(v) << "\n";
    write_file(path, ss.str());
}

DeltaSamples load_deltas(const std::string& path) {
    const std::string content = read_file(path);
    DeltaSamples out;
    std::istringstream ss(content);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        out.values.push_back(parse_double(line, path));
    }
    return out;
}

namespace {

void save_series(const std::vector<double>& values, const std::vector<double>* errs,
                 const std::string& path) {
    std::ostringstream ss;
    for (std::size_t n = 0; n < values.size(); ++n) {
        ss << n << "," << format_g17(values[n]);
        if (errs) ss << "," << format_g17((*errs)[n]);
        ss << "\n";
    }
    write_file(path, ss.str());
}

void load_series(const std::string& path, std::vector<double>& values,
                 std::vector<double>& errs) {
    const std::string content = read_file(path);
    std::istringstream ss(content);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        const auto toks = split_csv(line);
        if (toks.size() < 2 || toks.size() > 3)
            throw Error("io", "expected 'order,value[,stderr]' rows in " + path);
        const double order = parse_double(toks[0], path);
        if (order != static_cast<double>(values.size()))
            throw Error("io", "non-contiguous orders in " + path);
        values.push_back(parse_double(toks[1], path));
        if (toks.size() == 3) errs.push_back(parse_double(toks[2], path));
    }
    if (values.empty()) throw Error("io", "no rows in " + path);
    if (!errs.empty() && errs.size() != values.size())
        throw Error("io", "stderr column is incomplete in " + path);
}

}  // namespace

void save_moments(const MomentVector& m, const std::string& path) {
    save_series(m.values, m.stderrs.empty() ? nullptr : &m.stderrs, path);
}

MomentVector load_moments(const std::string& path) {
    MomentVector m;
    load_series(path, m.values, m.stderrs);
    m.source = m.stderrs.empty() ? MomentSource::Exact : MomentSource::Empirical;
    return m;
}

void save_power_sums(const PowerSums& p, const std::string& path) {
    save_series(p.values, nullptr, path);
}

PowerSums load_power_sums(const std::string& path) {
    PowerSums p;
    std::vector<double> errs;
    load_series(path, p.values, errs);
    return p;
}

void save_points(const Eigen::MatrixXd& points, const std::string& path) {
    std::ostringstream ss;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            if (c) ss << ",";
            ss << format_g17(points(i, c));
        }
        ss << "\n";
    }
    write_file(path, ss.str());
}

void save_nodes(const NodeSet& nodes, const std::string& path) {
    std::ostringstream ss;
    for (const Node& n : nodes.nodes)
        ss << format_g17(n.weight) << "," << format_g17(n.x) << "\n";
    write_file(path, ss.str());
}

json report_to_json(const RecoveryReport& report) {
    json j;
    j["recovered"] = model_to_json(report.recovered);
    j["residuals"] = {{"power_sum", report.power_sum_residual},
                      {"weight_sum_defect", report.weight_sum_defect},
                      {"zero_node_defect", report.zero_node_defect}};
    json diag;
    diag["prony_residual"] = report.prony_residual;
    diag["prony_scale"] = report.prony_scale;
    diag["merged_roots"] = report.merged_roots;
    diag["hankel_singular_values"] = report.hankel_singular_values;
    diag["search_nodes"] = report.search_nodes;
    diag["solutions_found"] = report.solutions_found;
    diag["noise_level"] = report.noise_level;
    j["diagnostics"] = diag;
    json prov;
    prov["input_hash"] = report.input_hash;
    if (report.has_seed) prov["seed"] = report.seed;
    json tols;
    tols["rank_tol"] = report.tolerances.rank_tol;
    tols["imag_tol"] = report.tolerances.imag_tol;
    tols["cluster_tol"] = report.tolerances.cluster_tol;
    tols["zero_tol"] = report.tolerances.zero_tol;
    tols["match_tol"] = report.tolerances.match_tol;
    tols["weight_tol"] = report.tolerances.weight_tol;
    tols["report_tol"] = report.tolerances.report_tol;
    prov["tolerances"] = tols;
    j["provenance"] = prov;
    j["warnings"] = report.warnings;
    return j;
}

void save_report(const RecoveryReport& report, const std::string& path) {
    write_file(path, report_to_json(report).dump(2) + "\n");
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, int bins) {
    if (bins < 1) throw Error("domain", "bin count must be positive");
    if (values.empty()) throw Error("empty", "no values to bin");
    double lo = values.front(), hi = values.front();
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) hi = lo + 1.0;  // degenerate range: one unit-wide bin row
    const double width = (hi - lo) / bins;
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        out[static_cast<std::size_t>(b)].left = lo + b * width;
        out[static_cast<std::size_t>(b)].right = lo + (b + 1) * width;
    }
    for (double v : values) {
        int b = static_cast<int>((v - lo) / width);
        b = std::min(std::max(b, 0), bins - 1);
        ++out[static_cast<std::size_t>(b)].count;
    }
    return out;
}

void save_histogram(const std::vector<HistogramBin>& bins, const std::string& path) {
    std::ostringstream ss;
    for (const HistogramBin& b : bins)
        ss << format_g17(b.left) << "," << format_g17(b.right) << "," << b.count << "\n";
    write_file(path, ss.str());
}

}  // namespace gmshape

#include "conic/io.hpp"

#include "conic/direction.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace conic {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError(std::string(what) + ": expected numbers");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw ParseError(std::string(what) + ": expected a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Matrix m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError(std::string(what) + ": ragged rows");
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number())
                throw ParseError(std::string(what) + ": expected numbers");
            m(static_cast<int>(i), static_cast<int>(k)) = j[i][k].get<double>();
        }
    }
    return m;
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed document");
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

} // namespace

std::string save_instance(const ConeInstance& instance) {
    json j;
    j["n"] = instance.dim();
    j["m"] = instance.row_count();
    j["rows"] = matrix_to_json(instance.original_rows());
    if (instance.planted()) {
        j["planted"] = {{"center", vector_to_json(instance.planted()->center)},
                        {"rho", instance.planted()->rho}};
    }
    return j.dump(2) + "\n";
}

ConeInstance load_instance(const std::string& text) {
    const json j = parse_text(text);
    if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("rows"))
        throw ParseError("instance document needs n, m, rows");
    if (!j["n"].is_number_integer() || !j["m"].is_number_integer())
        throw ParseError("instance document: n and m must be integers");
    const int n = j["n"].get<int>();
    const int m = j["m"].get<int>();
    if (n < 1 || m < 1) throw ParseError("instance document: m and n must be >= 1");
    Matrix rows = matrix_from_json(j["rows"], "rows");
    if (rows.rows() != m || rows.cols() != n)
        throw ParseError("instance document: rows shape disagrees with n, m");
    std::optional<PlantedWitness> witness;
    if (j.contains("planted")) {
        const json& p = j["planted"];
        if (!p.is_object() || !p.contains("center") || !p.contains("rho"))
            throw ParseError("planted block needs center and rho");
        witness = PlantedWitness{vector_from_json(p["center"], "planted center"),
                                 p["rho"].get<double>()};
        if (witness->center.size() != n)
            throw ParseError("planted center dimension disagrees with n");
    }
    try {
        return ConeInstance(std::move(rows), std::move(witness));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

ConeInstance load_instance_file(const std::string& path) {
    return load_instance(read_file(path));
}

void save_instance_file(const ConeInstance& instance, const std::string& path) {
    write_file(path, save_instance(instance));
}

namespace {

json transforms_to_json(const TransformLog& log) {
    json steps = json::array();
    for (const auto& step : log.steps) {
        if (const auto* r1 = std::get_if<Rank1Step>(&step)) {
            steps.push_back({{"kind", "rank1"}, {"c", vector_to_json(r1->c)}});
        } else {
            const auto& mr = std::get<MultiRankStep>(step);
            steps.push_back(
                {{"kind", "multirank"}, {"alpha", mr.alpha}, {"M", matrix_to_json(mr.m)}});
        }
    }
    return steps;
}

TransformLog transforms_from_json(const json& j) {
    TransformLog log;
    if (!j.is_array()) throw ParseError("transform_log must be an array");
    for (const auto& step : j) {
        if (!step.is_object() || !step.contains("kind"))
            throw ParseError("transform step needs a kind");
        const std::string kind = step["kind"].get<std::string>();
        try {
            if (kind == "rank1") {
                log.push(Rank1Step{vector_from_json(step.at("c"), "rank1 c")});
            } else if (kind == "multirank") {
                log.push(MultiRankStep{matrix_from_json(step.at("M"), "multirank M"),
                                       step.at("alpha").get<double>()});
            } else {
                throw ParseError("unknown transform kind: " + kind);
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what());
        }
    }
    return log;
}

} // namespace

std::string save_certificate(const Certificate& cert) {
    json j;
    if (const auto* f = std::get_if<FeasiblePoint>(&cert.value)) {
        j["type"] = "feasible";
        j["x"] = vector_to_json(f->x);
    } else if (const auto* e = std::get_if<DualEvidence>(&cert.value)) {
        j["type"] = "dual_evidence";
        j["lambda"] = vector_to_json(e->lambda);
        j["delta_achieved"] = e->delta_achieved;
    } else {
        j["type"] = "budget_exhausted";
        j["summary"] = std::get<BudgetExhausted>(cert.value).summary;
    }
    j["transform_log"] = transforms_to_json(cert.transforms);
    if (!cert.norm_coefficients.empty()) j["norm_coefficients"] = cert.norm_coefficients;
    return j.dump(2) + "\n";
}

Certificate load_certificate(const std::string& text) {
    const json j = parse_text(text);
    if (!j.is_object() || !j.contains("type"))
        throw ParseError("certificate document needs a type");
    Certificate cert;
    const std::string type = j["type"].get<std::string>();
    if (type == "feasible") {
        cert.value = FeasiblePoint{vector_from_json(j.at("x"), "certificate x")};
    } else if (type == "dual_evidence") {
        cert.value = DualEvidence{vector_from_json(j.at("lambda"), "certificate lambda"),
                                  j.at("delta_achieved").get<double>()};
    } else if (type == "budget_exhausted") {
        cert.value = BudgetExhausted{j.value("summary", std::string())};
    } else {
        throw ParseError("unknown certificate type: " + type);
    }
    if (j.contains("transform_log")) cert.transforms = transforms_from_json(j["transform_log"]);
    if (j.contains("norm_coefficients")) {
        if (!j["norm_coefficients"].is_array())
            throw ParseError("norm_coefficients must be an array");
        cert.norm_coefficients = j["norm_coefficients"].get<std::vector<double>>();
    }
    return cert;
}

Certificate load_certificate_file(const std::string& path) {
    return load_certificate(read_file(path));
}

void save_certificate_file(const Certificate& cert, const std::string& path) {
    write_file(path, save_certificate(cert));
}

std::string save_result(const SolveResult& result, const SolveConfig& cfg, double wall_ms) {
    json j;
    j["config"] = {{"phase", to_string(cfg.phase_mode)},
                   {"rescale", to_string(cfg.rescale_mode)},
                   {"seed", cfg.seed},
                   {"max_phases", cfg.max_phases},
                   {"alpha_cap", cfg.alpha_cap},
                   {"log_exponent_a", cfg.log_exponent_a},
                   {"termination_phi_log", cfg.termination_phi_log},
                   {"derandomize", cfg.derandomize},
                   {"fixed_step", cfg.fixed_step}};
    if (cfg.rho_hint) j["config"]["rho_hint"] = *cfg.rho_hint;
    j["thresholds"] = {{"delta", result.delta},
                       {"eigen_split_c", kEigenSplitC},
                       {"alpha_cap", cfg.alpha_cap}};
    j["certificate"] = parse_text(save_certificate(result.certificate));
    j["phases_used"] = result.phases_used;
    j["total_iterations"] = result.total_iterations;
    j["rescales"] = result.rescales;
    j["det_growth_log_sum"] = result.det_growth_log_sum;
    j["phase_iterations"] = result.phase_iterations;
    j["summary"] = result.summary;
    if (result.roundedness) {
        j["roundedness"] = {{"z", vector_to_json(result.roundedness->z)},
                            {"T", result.roundedness->t},
                            {"inner_radius", result.roundedness->inner_radius},
                            {"outer_radius_bound", result.roundedness->outer_radius_bound},
                            {"ratio", result.roundedness->ratio}};
    }
    j["version"] = "0.1.0";
    j["wall_ms"] = wall_ms;
    return j.dump(2) + "\n";
}

std::string trace_to_jsonl(const SolveResult& result) {
    std::ostringstream oss;
    std::size_t next_rescale = 0;
    int last_phase = -1;
    const auto flush_rescales_through = [&](int phase) {
        while (next_rescale < result.rescale_reports.size() &&
               result.rescale_reports[next_rescale].phase <= phase) {
            const auto& r = result.rescale_reports[next_rescale];
            json jr = {{"phase", r.phase},
                       {"rescale",
                        {{"kind", r.kind == RescaleReport::Kind::Rank1       ? "rank1"
                          : r.kind == RescaleReport::Kind::MultiRank ? "multirank"
                                                                     : "norm"},
                         {"alpha", r.alpha},
                         {"detGrowthLog", r.det_growth_log},
                         {"widthBound", r.width_bound},
                         {"retries", r.retries},
                         {"derandomized", r.derandomized}}}};
            oss << jr.dump() << "\n";
            ++next_rescale;
        }
    };
    for (const auto& row : result.trace) {
        if (row.phase != last_phase && last_phase >= 0) flush_rescales_through(last_phase);
        last_phase = row.phase;
        json jr = {{"phase", row.phase},
                   {"iter", row.iter},
                   {"phiLog", std::isnan(row.phi_log) ? json(nullptr) : json(row.phi_log)},
                   {"normYDual", row.norm_y_dual},
                   {"epsilon", row.epsilon},
                   {"mode", to_string(row.mode)}};
        oss << jr.dump() << "\n";
    }
    flush_rescales_through(std::numeric_limits<int>::max());
    return oss.str();
}

} // namespace conic

#include "fpc/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fpc {

namespace {

const char* kHeader = "metric,estimate,std_error,target,target_kind,z,pass";

double z_of(double est, double se, double target) {
    if (std::isnan(est) || std::isnan(target)) return std::numeric_limits<double>::quiet_NaN();
    if (est == target) return 0.0;  // also covers inf == inf
    if (se > 0.0 && std::isfinite(se)) return (est - target) / se;
    return est > target ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

double parse_num(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("bad number '" + s + "'");
    return v;
}

nlohmann::ordered_json num_json(double x) {
    if (!std::isfinite(x)) return fmt_num(x);
    return std::stod(fmt_num(x));
}

double json_num(const nlohmann::ordered_json& j) {
    if (j.is_string()) return parse_num(j.get<std::string>());
    return j.get<double>();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            f.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    f.push_back(cur);
    return f;
}

}  // namespace

const char* target_kind_name(TargetKind k) {
    switch (k) {
        case TargetKind::closed_form: return "closed-form";
        case TargetKind::upper_bound: return "bound-upper";
        case TargetKind::lower_bound: return "bound-lower";
        case TargetKind::trend: return "trend";
    }
    return "?";
}

TargetKind parse_target_kind(const std::string& s) {
    if (s == "closed-form") return TargetKind::closed_form;
    if (s == "bound-upper") return TargetKind::upper_bound;
    if (s == "bound-lower") return TargetKind::lower_bound;
    if (s == "trend") return TargetKind::trend;
    throw std::runtime_error("unknown target kind '" + s + "'");
}

std::string fmt_num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

ReportRow& ExperimentReport::add(std::string metric, double estimate, double std_error, double target,
                                 TargetKind kind) {
    ReportRow r{std::move(metric), estimate, std_error, target, kind, 0.0, false};
    r.z = z_of(estimate, std_error, target);
    switch (kind) {
        case TargetKind::closed_form: r.pass = std::abs(r.z) <= 3.0; break;
        case TargetKind::upper_bound: r.pass = r.z <= 3.0; break;
        case TargetKind::lower_bound: r.pass = r.z >= -3.0; break;
        case TargetKind::trend: r.pass = true; break;
    }
    rows.push_back(std::move(r));
    return rows.back();
}

ReportRow& ExperimentReport::add_tol(std::string metric, double estimate, double std_error, double target,
                                     double tol) {
    // deterministic values get the tol/3 convention so that z stays finite
    if (!(std_error > 0.0)) std_error = tol / 3.0;
    ReportRow& r = add(std::move(metric), estimate, std_error, target, TargetKind::closed_form);
    r.pass = std::abs(estimate - target) <= tol;
    return r;
}

ReportRow& ExperimentReport::add_trend(std::string metric, double estimate, double std_error, bool verdict) {
    ReportRow r{std::move(metric), estimate, std_error, std::numeric_limits<double>::quiet_NaN(),
                TargetKind::trend, std::numeric_limits<double>::quiet_NaN(), verdict};
    rows.push_back(std::move(r));
    return rows.back();
}

bool ExperimentReport::all_pass() const {
    for (const auto& r : rows)
        if (r.kind != TargetKind::trend && !r.pass) return false;
    return true;
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("format must be csv or json, got '" + s + "'");
}

std::string emit(const ExperimentReport& r, Format f) {
    if (f == Format::csv) {
        std::ostringstream os;
        os << kHeader << "\n";
        for (const auto& w : r.rows)
            os << csv_field(w.metric) << ',' << fmt_num(w.estimate) << ',' << fmt_num(w.std_error) << ','
               << fmt_num(w.target) << ',' << target_kind_name(w.kind) << ',' << fmt_num(w.z) << ','
               << (w.pass ? "true" : "false") << "\n";
        return os.str();
    }
    nlohmann::ordered_json j;
    auto& p = j["provenance"];
    p["experiment"] = r.provenance.experiment;
    p["seed"] = r.provenance.seed;
    p["commit"] = r.provenance.commit;
    p["parameters"] = r.provenance.parameters.empty() ? nlohmann::ordered_json::object()
                                                      : nlohmann::ordered_json::parse(r.provenance.parameters);
    p["runtime_seconds"] = num_json(r.provenance.runtime_seconds);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& w : r.rows) {
        nlohmann::ordered_json o;
        o["metric"] = w.metric;
        o["estimate"] = num_json(w.estimate);
        o["std_error"] = num_json(w.std_error);
        o["target"] = num_json(w.target);
        o["target_kind"] = target_kind_name(w.kind);
        o["z"] = num_json(w.z);
        o["pass"] = w.pass;
        j["rows"].push_back(o);
    }
    return j.dump(2) + "\n";
}

ExperimentReport parse_report(const std::string& text, Format f) {
    ExperimentReport r;
    if (f == Format::csv) {
        std::istringstream is(text);
        std::string line;
        if (!std::getline(is, line) || line != kHeader) throw std::runtime_error("missing CSV header");
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            auto c = split_csv(line);
            if (c.size() != 7) throw std::runtime_error("CSV row with " + std::to_string(c.size()) + " columns");
            r.rows.push_back({c[0], parse_num(c[1]), parse_num(c[2]), parse_num(c[3]), parse_target_kind(c[4]),
                              parse_num(c[5]), c[6] == "true"});
        }
        return r;
    }
    auto j = nlohmann::ordered_json::parse(text);
    const auto& p = j.at("provenance");
    r.provenance.experiment = p.at("experiment").get<std::string>();
    r.provenance.seed = p.at("seed").get<unsigned long long>();
    r.provenance.commit = p.at("commit").get<std::string>();
    r.provenance.parameters = p.at("parameters").dump();
    r.provenance.runtime_seconds = json_num(p.at("runtime_seconds"));
    for (const auto& o : j.at("rows"))
        r.rows.push_back({o.at("metric").get<std::string>(), json_num(o.at("estimate")),
                          json_num(o.at("std_error")), json_num(o.at("target")),
                          parse_target_kind(o.at("target_kind").get<std::string>()), json_num(o.at("z")),
                          o.at("pass").get<bool>()});
    return r;
}

}  // namespace fpc

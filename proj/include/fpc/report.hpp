#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fpc {

enum class TargetKind { closed_form, upper_bound, lower_bound, trend };
const char* target_kind_name(TargetKind k);
TargetKind parse_target_kind(const std::string& s);

struct ReportRow {
    std::string metric;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    TargetKind kind = TargetKind::closed_form;
    double z = 0.0;
    bool pass = false;
};

struct Provenance {
    std::string experiment;
    unsigned long long seed = 0;
    std::string commit;
    std::string parameters;  // canonical JSON text of the resolved parameters
    double runtime_seconds = 0.0;
};

struct ExperimentReport {
    Provenance provenance;
    std::vector<ReportRow> rows;

    // 3-sigma rule: two-sided for closed forms, one-sided for bounds
    ReportRow& add(std::string metric, double estimate, double std_error, double target, TargetKind kind);
    // pass iff |estimate - target| <= tol; a zero std_error becomes tol/3
    ReportRow& add_tol(std::string metric, double estimate, double std_error, double target, double tol);
    // trend rows carry a verdict but never decide the exit status
    ReportRow& add_trend(std::string metric, double estimate, double std_error, bool verdict);
    bool all_pass() const;  // every non-trend row
};

enum class Format { csv, json };
Format parse_format(const std::string& s);

std::string emit(const ExperimentReport& r, Format f);
ExperimentReport parse_report(const std::string& text, Format f);

// %.12g, with inf/-inf/nan spelled out
std::string fmt_num(double x);

}  // namespace fpc

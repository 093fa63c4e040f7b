#include "cvqkd/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace cvqkd {

namespace {

constexpr ReferenceRow kReferenceRows[] = {
    {"21% loss", 0.79, 1069, 0.220, 415, 0.060, 1.0, 0.76, 249, 189},
    {"64% loss", 0.36, 1096, 0.273, 165, 0.076, 2.3, 0.49, 80, 39},
};

constexpr double kReferenceAlpha = 0.6;
// Pre-selection error gap beyond which the report flags a model/experiment mismatch.
constexpr double kErrorGapFlag = 0.015;

double ratio(std::uint64_t num, std::uint64_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

double SessionReport::rate(std::uint64_t count) const noexcept {
    if (n_events == 0)
        return 0.0;
    return static_cast<double>(count) / (static_cast<double>(n_events) * event_period());
}

double SessionReport::pre_error() const noexcept {
    return ratio(pre_errors, raw_count);
}

double SessionReport::post_error() const noexcept {
    return ratio(post_errors, selected_count);
}

double SessionReport::advantage() const noexcept {
    return estimator == info::AdvantageEstimator::per_event ? advantage_per_event : advantage_bulk;
}

const char* estimator_name(info::AdvantageEstimator e) noexcept {
    return e == info::AdvantageEstimator::per_event ? "per_event" : "bulk";
}

std::optional<ReferenceRow> reference_row(double alpha, double eta) {
    if (std::abs(alpha - kReferenceAlpha) > 1e-9)
        return std::nullopt;
    for (const auto& row : kReferenceRows)
        if (std::abs(eta - row.eta) < 1e-9)
            return row;
    return std::nullopt;
}

std::string to_json(const SessionReport& r) {
    nlohmann::ordered_json j;
    j["inputs"] = {{"alpha", r.alpha},
                   {"eta", r.eta},
                   {"excess_noise", r.excess_noise},
                   {"n_events", r.n_events},
                   {"event_duration", r.event_duration},
                   {"dead_time_fraction", r.dead_time_fraction}};
    j["threshold"] = {{"auto", r.threshold_auto},
                      {"outcome_units", r.threshold},
                      {"sent_alpha_units", r.threshold_sent_alpha},
                      {"received_alpha_units", r.threshold_received_alpha}};
    j["counts"] = {{"raw", r.raw_count},
                   {"pre_errors", r.pre_errors},
                   {"selected", r.selected_count},
                   {"post_errors", r.post_errors},
                   {"leakage_bits", r.leakage_bits},
                   {"error_corrected", r.ec_count},
                   {"final", r.final_count}};
    j["errors"] = {{"pre_selection", r.pre_error()}, {"post_selection", r.post_error()}};
    if (r.eve_pre_error)
        j["errors"]["eve_pre_selection"] = *r.eve_pre_error;
    j["model"] = {{"pre_error", r.model_pre_error},
                  {"yield", r.model_yield},
                  {"post_error", r.model_post_error},
                  {"eve_info", r.eve_info},
                  {"advantage_per_event", r.advantage_per_event},
                  {"advantage_bulk", r.advantage_bulk}};
    j["advantage"] = {{"estimator", estimator_name(r.estimator)}, {"value", r.advantage()}};
    j["reconciliation"] = {{"performed", r.reconciled},
                           {"verified", r.verified},
                           {"initial_block", r.cascade_initial_block}};
    j["rates_bps"] = {{"raw", r.raw_rate()},
                      {"post_selection", r.post_rate()},
                      {"error_corrected", r.ec_rate()},
                      {"final", r.final_rate()}};
    if (const auto ref = reference_row(r.alpha, r.eta)) {
        j["reference"] = {{"label", ref->label},
                          {"raw_rate", ref->raw_rate},
                          {"pre_error", ref->pre_error},
                          {"post_rate", ref->post_rate},
                          {"post_error", ref->post_error},
                          {"threshold", ref->threshold},
                          {"advantage", ref->advantage},
                          {"ec_rate", ref->ec_rate},
                          {"final_rate", ref->final_rate}};
        j["reference_delta"] = {{"pre_error", r.pre_error() - ref->pre_error},
                                {"post_error", r.post_error() - ref->post_error},
                                {"advantage", r.advantage() - ref->advantage},
                                {"pre_error_gap_flag", r.raw_count > 0 && std::abs(r.pre_error() - ref->pre_error) > kErrorGapFlag}};
    }
    return j.dump(2) + "\n";
}

std::string to_text(const SessionReport& r) {
    std::ostringstream os;
    os << "session: alpha=" << fmt("%.4g", r.alpha) << " eta=" << fmt("%.4g", r.eta)
       << " excess_noise=" << fmt("%.4g", r.excess_noise) << " events=" << r.n_events
       << " event_period=" << fmt("%.6g", r.event_period()) << " s\n";
    os << "threshold: " << (r.threshold_auto ? "auto" : "fixed") << ", " << fmt("%.6f", r.threshold)
       << " outcome units = " << fmt("%.4f", r.threshold_sent_alpha) << " x sent alpha = "
       << fmt("%.4f", r.threshold_received_alpha) << " x received alpha\n";
    os << "advantage estimator: " << estimator_name(r.estimator) << " (per_event "
       << fmt("%.4f", r.advantage_per_event) << ", bulk " << fmt("%.4f", r.advantage_bulk)
       << "), I_AE " << fmt("%.4f", r.eve_info) << "\n";
    if (r.eve_pre_error)
        os << "eve observer error: " << fmt("%.4f", *r.eve_pre_error) << "\n";
    if (r.reconciled)
        os << "cascade: initial block " << r.cascade_initial_block << ", leaked " << r.leakage_bits
           << " bits, verification " << (r.verified ? "passed" : "FAILED") << "\n";

    const auto ref = reference_row(r.alpha, r.eta);
    os << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-34s %14s %12s %12s %12s\n", "quantity", "simulated", "model",
                  ref ? "expt. ref" : "-", ref ? "delta" : "-");
    os << line;
    const auto row = [&](const char* name, double sim, double model, std::optional<double> refv, const char* f) {
        const std::string s = fmt(f, sim);
        const std::string m = std::isnan(model) ? "-" : fmt(f, model);
        const std::string rv = refv ? fmt(f, *refv) : "-";
        const std::string d = refv ? fmt(f, sim - *refv) : "-";
        std::snprintf(line, sizeof line, "%-34s %14s %12s %12s %12s\n", name, s.c_str(), m.c_str(), rv.c_str(),
                      d.c_str());
        os << line;
    };
    const double nan = std::nan("");
    const auto opt = [&](double ReferenceRow::*field) -> std::optional<double> {
        return ref ? std::optional<double>((*ref).*field) : std::nullopt;
    };
    row("raw bit rate [bit/s]", r.raw_rate(), nan, opt(&ReferenceRow::raw_rate), "%.1f");
    row("errors before post selection", r.pre_error(), r.model_pre_error, opt(&ReferenceRow::pre_error), "%.4f");
    row("bit rate after post selection", r.post_rate(), r.model_yield * r.raw_rate(), opt(&ReferenceRow::post_rate), "%.1f");
    row("errors after post selection", r.post_error(), r.model_post_error, opt(&ReferenceRow::post_error), "%.4f");
    row("threshold [sent alpha]", r.threshold_sent_alpha, nan, opt(&ReferenceRow::threshold), "%.3f");
    row("threshold [received alpha]", r.threshold_received_alpha, nan, std::nullopt, "%.3f");
    row("information advantage", r.advantage(), r.advantage(), opt(&ReferenceRow::advantage), "%.4f");
    row("bit rate after error correction", r.ec_rate(), nan, opt(&ReferenceRow::ec_rate), "%.1f");
    row("bit rate after privacy amplification", r.final_rate(), nan, opt(&ReferenceRow::final_rate), "%.1f");
    if (ref && r.raw_count > 0 && std::abs(r.pre_error() - ref->pre_error) > kErrorGapFlag)
        os << "FLAG: pre-selection error differs from the experimental reference by "
           << fmt("%+.1f", 100.0 * (r.pre_error() - ref->pre_error))
           << " percentage points (ideal model vs. measured data)\n";
    os << "final key: " << r.final_count << " bits\n";
    return os.str();
}

} // namespace cvqkd

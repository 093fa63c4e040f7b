#include "cvqkd/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cvqkd/error.hpp"

namespace cvqkd::app {

using nlohmann::json;

namespace {

const char* units_name(protocol::ThresholdUnits u) {
    switch (u) {
    case protocol::ThresholdUnits::outcome: return "outcome";
    case protocol::ThresholdUnits::sent_alpha: return "sent_alpha";
    case protocol::ThresholdUnits::received_alpha: return "received_alpha";
    }
    return "outcome";
}

protocol::ThresholdUnits parse_units(const std::string& s) {
    if (s == "outcome") return protocol::ThresholdUnits::outcome;
    if (s == "sent_alpha") return protocol::ThresholdUnits::sent_alpha;
    if (s == "received_alpha") return protocol::ThresholdUnits::received_alpha;
    throw ConfigError("threshold.units", "expected outcome, sent_alpha or received_alpha, got '" + s + "'");
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
    for (const auto& [key, _] : obj.items())
        if (!known.count(key))
            throw ConfigError(prefix + key, "unknown key");
}

template <class T>
T get(const json& obj, const char* key, const std::string& path) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path, std::string("wrong type (") + e.what() + ")");
    }
}

double get_number(const json& obj, const char* key, const std::string& path) {
    if (!obj.at(key).is_number())
        throw ConfigError(path, "expected a number");
    return obj.at(key).get<double>();
}

std::uint64_t get_count(const json& obj, const char* key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

} // namespace

std::uint64_t default_seed(std::uint64_t fallback) {
    const char* env = std::getenv(kSeedEnvVar);
    if (!env || !*env)
        return fallback;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 0);
    if (errno != 0 || *end != '\0' || env[0] == '-')
        throw ConfigError(kSeedEnvVar, std::string("not an unsigned integer: '") + env + "'");
    return v;
}

double reference_dead_time_fraction(double event_duration) {
    return 1.0 - 1069.0 * event_duration;
}

void validate(const ExperimentConfig& c) {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!(c.alpha > 0.0) || !finite(c.alpha))
        throw ConfigError("alpha", "must be > 0");
    if (!(c.eta > 0.0 && c.eta <= 1.0))
        throw ConfigError("eta", "must lie in (0, 1]");
    if (!(c.excess_noise >= 0.0) || !finite(c.excess_noise))
        throw ConfigError("excess_noise", "must be >= 0");
    if (!c.threshold.automatic && (!(c.threshold.value >= 0.0) || !finite(c.threshold.value)))
        throw ConfigError("threshold.value", "must be >= 0");
    if (c.n_events > 0xFFFFFFFFull)
        throw ConfigError("n_events", "must fit in 32 bits");
    if (!(c.event_duration > 0.0) || !finite(c.event_duration))
        throw ConfigError("event_duration", "must be > 0");
    if (!(c.dead_time_fraction >= 0.0 && c.dead_time_fraction < 1.0))
        throw ConfigError("dead_time_fraction", "must lie in [0, 1)");
    if (c.cascade.passes < 1)
        throw ConfigError("cascade.passes", "must be >= 1");
    if (c.cascade.initial_block && *c.cascade.initial_block < 1)
        throw ConfigError("cascade.initial_block", "must be >= 1 or \"auto\"");
}

ExperimentConfig parse_config(std::string_view text, const ExperimentConfig& defaults) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.what() carries "at line L, column C"
        throw ConfigError("", std::string("syntax error: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("", "top level must be a JSON object");
    reject_unknown(j,
                   {"alpha", "eta", "excess_noise", "threshold", "n_events", "event_duration",
                    "dead_time_fraction", "seed", "eve_observer", "advantage_estimator", "cascade",
                    "safety_margin", "output"},
                   "");

    ExperimentConfig c = defaults;
    if (j.contains("alpha")) c.alpha = get_number(j, "alpha", "alpha");
    if (j.contains("eta")) c.eta = get_number(j, "eta", "eta");
    if (j.contains("excess_noise")) c.excess_noise = get_number(j, "excess_noise", "excess_noise");
    if (j.contains("threshold")) {
        const json& t = j.at("threshold");
        if (t.is_string()) {
            if (t.get<std::string>() != "auto")
                throw ConfigError("threshold", "expected \"auto\" or {\"value\", \"units\"}");
            c.threshold = {};
        } else if (t.is_object()) {
            reject_unknown(t, {"value", "units"}, "threshold.");
            if (!t.contains("value"))
                throw ConfigError("threshold.value", "missing");
            c.threshold.automatic = false;
            c.threshold.value = get_number(t, "value", "threshold.value");
            c.threshold.units = t.contains("units") ? parse_units(get<std::string>(t, "units", "threshold.units"))
                                                    : protocol::ThresholdUnits::outcome;
        } else {
            throw ConfigError("threshold", "expected \"auto\" or {\"value\", \"units\"}");
        }
    }
    if (j.contains("n_events")) c.n_events = get_count(j, "n_events", "n_events");
    if (j.contains("event_duration")) c.event_duration = get_number(j, "event_duration", "event_duration");
    if (j.contains("dead_time_fraction"))
        c.dead_time_fraction = get_number(j, "dead_time_fraction", "dead_time_fraction");
    if (j.contains("seed")) c.seed = get_count(j, "seed", "seed");
    if (j.contains("eve_observer")) c.eve_observer = get<bool>(j, "eve_observer", "eve_observer");
    if (j.contains("advantage_estimator")) {
        const auto s = get<std::string>(j, "advantage_estimator", "advantage_estimator");
        if (s == "per_event")
            c.estimator = info::AdvantageEstimator::per_event;
        else if (s == "bulk")
            c.estimator = info::AdvantageEstimator::bulk;
        else
            throw ConfigError("advantage_estimator", "expected per_event or bulk, got '" + s + "'");
    }
    if (j.contains("cascade")) {
        const json& cj = j.at("cascade");
        if (!cj.is_object())
            throw ConfigError("cascade", "expected an object");
        reject_unknown(cj, {"passes", "initial_block"}, "cascade.");
        if (cj.contains("passes")) c.cascade.passes = static_cast<int>(get_count(cj, "passes", "cascade.passes"));
        if (cj.contains("initial_block")) {
            const json& b = cj.at("initial_block");
            if (b.is_string() && b.get<std::string>() == "auto")
                c.cascade.initial_block.reset();
            else
                c.cascade.initial_block = static_cast<std::uint32_t>(get_count(cj, "initial_block", "cascade.initial_block"));
        }
    }
    if (j.contains("safety_margin")) c.safety_margin = get_count(j, "safety_margin", "safety_margin");
    if (j.contains("output")) {
        const json& o = j.at("output");
        if (!o.is_object())
            throw ConfigError("output", "expected an object");
        reject_unknown(o, {"dir", "report_json", "report_text", "transcript", "events_csv"}, "output.");
        if (o.contains("dir")) c.output.dir = get<std::string>(o, "dir", "output.dir");
        if (o.contains("report_json")) c.output.report_json = get<std::string>(o, "report_json", "output.report_json");
        if (o.contains("report_text")) c.output.report_text = get<std::string>(o, "report_text", "output.report_text");
        if (o.contains("transcript")) c.output.transcript = get<std::string>(o, "transcript", "output.transcript");
        if (o.contains("events_csv")) c.output.events_csv = get<std::string>(o, "events_csv", "output.events_csv");
    }
    validate(c);
    return c;
}

std::string emit_config(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["alpha"] = c.alpha;
    j["eta"] = c.eta;
    j["excess_noise"] = c.excess_noise;
    if (c.threshold.automatic)
        j["threshold"] = "auto";
    else
        j["threshold"] = {{"value", c.threshold.value}, {"units", units_name(c.threshold.units)}};
    j["n_events"] = c.n_events;
    j["event_duration"] = c.event_duration;
    j["dead_time_fraction"] = c.dead_time_fraction;
    j["seed"] = c.seed;
    j["eve_observer"] = c.eve_observer;
    j["advantage_estimator"] = estimator_name(c.estimator);
    j["cascade"]["passes"] = c.cascade.passes;
    if (c.cascade.initial_block)
        j["cascade"]["initial_block"] = *c.cascade.initial_block;
    else
        j["cascade"]["initial_block"] = "auto";
    j["safety_margin"] = c.safety_margin;
    j["output"] = {{"dir", c.output.dir},
                   {"report_json", c.output.report_json},
                   {"report_text", c.output.report_text},
                   {"transcript", c.output.transcript},
                   {"events_csv", c.output.events_csv}};
    return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& defaults) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), defaults);
}

} // namespace cvqkd::app

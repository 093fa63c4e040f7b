// Command-line front end: run, scan, scatter, verify.
//
// Exit codes: 0 success, 1 a check failed, 2 bad configuration.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cvqkd/config.hpp"
#include "cvqkd/error.hpp"
#include "cvqkd/pipeline.hpp"

using namespace cvqkd;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, eta, excess_noise;
    std::optional<std::string> estimator;
    bool serial = false;
    bool dump_config = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("-c,--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, std::string("master seed (default: config, then $") + app::kSeedEnvVar + ", then 1)");
    sub->add_option("--alpha", o.alpha, "coherent amplitude sent by Alice");
    sub->add_option("--eta", o.eta, "channel transmission");
    sub->add_option("--excess-noise", o.excess_noise, "added outcome variance");
    sub->add_option("--estimator", o.estimator, "advantage estimator")->check(CLI::IsMember({"per_event", "bulk"}));
    sub->add_flag("--serial", o.serial, "use the serial reference kernels");
    sub->add_flag("--dump-config", o.dump_config, "print the effective config and exit");
}

app::ExperimentConfig resolve(const CommonOptions& o) {
    app::ExperimentConfig defaults;
    defaults.seed = app::default_seed(1);
    app::ExperimentConfig cfg = o.config_path.empty() ? defaults : app::load_config(o.config_path, defaults);
    if (o.seed) cfg.seed = *o.seed;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.eta) cfg.eta = *o.eta;
    if (o.excess_noise) cfg.excess_noise = *o.excess_noise;
    if (o.estimator)
        cfg.estimator = *o.estimator == "bulk" ? info::AdvantageEstimator::bulk : info::AdvantageEstimator::per_event;
    return cfg;
}

protocol::ThresholdUnits parse_units(const std::string& s) {
    if (s == "sent_alpha") return protocol::ThresholdUnits::sent_alpha;
    if (s == "received_alpha") return protocol::ThresholdUnits::received_alpha;
    return protocol::ThresholdUnits::outcome;
}

void write_or_print(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw ConfigError("--out", "cannot write '" + path + "'");
    out << data;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Continuous-variable polarization QKD simulator"};
    cli.require_subcommand(1);

    // run
    CommonOptions run_o;
    std::optional<std::uint64_t> n_events;
    std::optional<std::string> threshold;
    std::string threshold_units = "outcome";
    std::optional<std::string> out_dir;
    std::optional<int> passes;
    std::optional<std::uint64_t> margin;
    bool reference_duty = false;
    auto* run = cli.add_subcommand("run", "simulate a session, reconcile, amplify and report");
    add_common(run, run_o);
    run->add_option("-n,--n-events", n_events, "number of events");
    run->add_option("-t,--threshold", threshold, "post-selection threshold, or 'auto'");
    run->add_option("--threshold-units", threshold_units, "units of --threshold")
        ->check(CLI::IsMember({"outcome", "sent_alpha", "received_alpha"}));
    run->add_option("-o,--out", out_dir, "output directory");
    run->add_option("--passes", passes, "Cascade passes");
    run->add_option("--safety-margin", margin, "bits removed from the final key");
    run->add_flag("--reference-duty-cycle", reference_duty, "dead time giving 1069 events/s at the configured event duration");

    // scan
    CommonOptions scan_o;
    double eta_min = 0.1, eta_max = 1.0, eta_step = 0.1;
    std::size_t sample_bits = 20000;
    std::string scan_out;
    auto* scan = cli.add_subcommand("scan", "model sweep over channel transmission");
    add_common(scan, scan_o);
    scan->add_option("--eta-min", eta_min, "first eta")->capture_default_str();
    scan->add_option("--eta-max", eta_max, "last eta")->capture_default_str();
    scan->add_option("--eta-step", eta_step, "eta step")->capture_default_str();
    scan->add_option("--sample-bits", sample_bits, "synthetic key length for the Cascade cost; 0 skips it")
        ->capture_default_str();
    scan->add_option("-o,--out", scan_out, "CSV file (default stdout)");

    // scatter
    CommonOptions sc_o;
    std::string mode = "qfunction";
    std::size_t sc_n = 2000;
    bool unmodulated = false;
    std::string sc_out;
    auto* sc = cli.add_subcommand("scatter", "per-event outcome pairs as CSV");
    add_common(sc, sc_o);
    sc->add_option("--mode", mode, "qfunction or dual_detector")
        ->check(CLI::IsMember({"qfunction", "dual_detector"}))
        ->capture_default_str();
    sc->add_option("-n,--n-events", sc_n, "number of events")->capture_default_str();
    sc->add_flag("--unmodulated", unmodulated, "dual_detector: independent random signs per arm");
    sc->add_option("-o,--out", sc_out, "CSV file (default stdout)");

    // verify
    int n_max = 12;
    double v_alpha = 0.6;
    std::optional<std::uint64_t> v_seed;
    auto* ver = cli.add_subcommand("verify", "check the Stokes operator algebra in a truncated Fock space");
    ver->add_option("--n-max", n_max, "photon-number cutoff per mode")->capture_default_str();
    ver->add_option("--alpha", v_alpha, "amplitude for the overlap check")->capture_default_str();
    ver->add_option("--seed", v_seed, "seed for the random test states");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            app::ExperimentConfig cfg = resolve(run_o);
            if (n_events) cfg.n_events = *n_events;
            if (threshold) {
                if (*threshold == "auto") {
                    cfg.threshold = {};
                } else {
                    cfg.threshold.automatic = false;
                    try {
                        cfg.threshold.value = std::stod(*threshold);
                    } catch (const std::exception&) {
                        throw ConfigError("threshold", "expected a number or 'auto'");
                    }
                    cfg.threshold.units = parse_units(threshold_units);
                }
            }
            if (out_dir) cfg.output.dir = *out_dir;
            if (passes) cfg.cascade.passes = *passes;
            if (margin) cfg.safety_margin = *margin;
            if (reference_duty) cfg.dead_time_fraction = app::reference_dead_time_fraction(cfg.event_duration);
            app::validate(cfg);
            if (run_o.dump_config) {
                std::cout << app::emit_config(cfg);
                return kOk;
            }
            const auto result = app::run_experiment(cfg, run_o.serial ? Exec::serial : Exec::parallel);
            app::write_artifacts(result, cfg.output);
            std::cout << to_text(result.report);
            if (cfg.n_events == 0) {
                std::cerr << "no events simulated\n";
                return kCheckFailed;
            }
            if (result.report.reconciled && !result.report.verified) {
                std::cerr << "reconciliation failed verification\n";
                return kCheckFailed;
            }
            if (result.alice_key.bits != result.bob_key.bits) {
                std::cerr << "final keys differ\n";
                return kCheckFailed;
            }
            return kOk;
        }
        if (*scan) {
            const app::ExperimentConfig cfg = resolve(scan_o);
            app::validate(cfg);
            if (scan_o.dump_config) {
                std::cout << app::emit_config(cfg);
                return kOk;
            }
            const auto rows = app::scan(cfg, app::eta_grid(eta_min, eta_max, eta_step), sample_bits,
                                        scan_o.serial ? Exec::serial : Exec::parallel);
            write_or_print(scan_out, app::scan_csv(rows, cfg.estimator));
            return kOk;
        }
        if (*sc) {
            const app::ExperimentConfig cfg = resolve(sc_o);
            app::validate(cfg);
            if (sc_o.dump_config) {
                std::cout << app::emit_config(cfg);
                return kOk;
            }
            const auto m = mode == "dual_detector" ? app::ScatterMode::dual_detector : app::ScatterMode::qfunction;
            const auto res = app::scatter(cfg, m, !unmodulated, sc_n);
            write_or_print(sc_out, res.csv);
            if (res.correlation)
                std::cerr << "correlation " << *res.correlation << "\n";
            return kOk;
        }
        if (*ver) {
            const auto v = app::verify_algebra(n_max, v_alpha, v_seed ? *v_seed : app::default_seed(1));
            std::cout << app::to_text(v);
            return v.passed() ? kOk : kCheckFailed;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InsufficientDataError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kOk;
}

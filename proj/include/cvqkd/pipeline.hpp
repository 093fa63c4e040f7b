#pragma once

// End-to-end drivers behind the command-line subcommands.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cvqkd/config.hpp"
#include "cvqkd/privacy.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/report.hpp"
#include "cvqkd/wire.hpp"

namespace cvqkd::app {

struct RunArtifacts {
    SessionReport report;
    wire::Bytes transcript;
    std::vector<protocol::SentEvent> sent;
    std::vector<protocol::EventRecord> measured;
    reconcile::FinalKey alice_key;
    reconcile::FinalKey bob_key;
};

/// Session, Cascade and privacy amplification over one loopback link.
/// Reconciliation is skipped when the sifted key is shorter than the first
/// Cascade block.
RunArtifacts run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

void write_events_csv(std::ostream& out, const std::vector<protocol::SentEvent>& sent,
                      const std::vector<protocol::EventRecord>& measured);
/// Writes report, transcript and events CSV under cfg.output.dir.
void write_artifacts(const RunArtifacts& run, const OutputPaths& paths);

struct ScanRow {
    double eta = 0.0;
    double threshold = 0.0;
    double yield = 0.0;
    double post_error = 0.0;
    double eve_info = 0.0;
    double advantage_per_event = 0.0;
    double advantage_bulk = 0.0;
    double ec_leak_fraction = 0.0; // disclosed bits per sifted bit
    bool ec_verified = false;
    double final_fraction = 0.0;   // final bits per event
};

/// Model sweep over `etas` with the automatic threshold. Reconciliation cost
/// is measured by running Cascade on `ec_sample_bits` synthetic bits with the
/// predicted post-selection error; 0 skips it.
std::vector<ScanRow> scan(const ExperimentConfig& cfg, const std::vector<double>& etas,
                          std::size_t ec_sample_bits = 20000, Exec exec = Exec::parallel);
std::vector<double> eta_grid(double lo, double hi, double step);
std::string scan_csv(const std::vector<ScanRow>& rows, info::AdvantageEstimator e);

enum class ScatterMode { qfunction, dual_detector };

/// One line per event. qfunction: the four-state cloud Bob would see measuring
/// S2 and S3 on half of the received light each. dual_detector: two detectors
/// on a split, unattenuated beam, with their correlation.
struct ScatterResult {
    std::string csv;
    std::optional<double> correlation;
};
ScatterResult scatter(const ExperimentConfig& cfg, ScatterMode mode, bool modulated, std::size_t n_events);

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string note;
};

struct VerifyResult {
    int n_max = 0;
    double alpha = 0.0;
    std::vector<VerifyCheck> checks;
    bool passed() const noexcept;
};

/// Operator-algebra checks on the truncated two-mode space.
VerifyResult verify_algebra(int n_max, double alpha, std::uint64_t seed = 1);
std::string to_text(const VerifyResult& v);

} // namespace cvqkd::app

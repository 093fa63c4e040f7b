#include "cvqkd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cvqkd/cascade.hpp"
#include "cvqkd/channel.hpp"
#include "cvqkd/error.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"
#include "cvqkd/stokes.hpp"
#include "cvqkd/transport.hpp"

namespace cvqkd::app {

namespace {

protocol::SessionConfig session_config(const ExperimentConfig& c, Exec exec) {
    protocol::SessionConfig s;
    s.alpha = c.alpha;
    s.eta = c.eta;
    s.excess_noise = c.excess_noise;
    s.threshold = c.threshold;
    s.n_events = c.n_events;
    s.event_duration = c.event_duration;
    s.dead_time_fraction = c.dead_time_fraction;
    s.seed = c.seed;
    s.eve_observer = c.eve_observer;
    s.estimator = c.estimator;
    s.exec = exec;
    return s;
}

// Block length for a Cascade run, or nullopt if the key is too short for it.
std::optional<std::uint32_t> first_block(const CascadeSettings& s, double error_estimate, std::size_t n) {
    if (s.initial_block)
        return *s.initial_block <= n ? s.initial_block : std::nullopt;
    if (n < 4)
        return std::nullopt;
    const double p = std::clamp(error_estimate, 1e-6, 0.499);
    return reconcile::choose_block_length(p, n);
}

void write_file(const std::filesystem::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + p.string() + "'");
    out << data;
}

} // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg, Exec exec) {
    validate(cfg);
    RunArtifacts run;
    transport::LoopbackLink link;
    auto session = protocol::run_session(session_config(cfg, exec), link);
    SessionReport& r = session.report;

    const Bits& bob_bits = session.keys.bob_bits;
    const auto block = first_block(cfg.cascade, r.model_post_error, bob_bits.size());
    if (block) {
        const auto seeds = protocol::derive_seeds(cfg.seed);
        reconcile::CascadeConfig cc;
        cc.passes = cfg.cascade.passes;
        cc.initial_block = block;
        cc.error_estimate = r.model_post_error;
        cc.seed = seeds.cascade;

        transport::LoopbackSession channel(link, *session.alice);
        const auto ec = reconcile::run_cascade(bob_bits, cc, channel);
        r.reconciled = true;
        r.verified = ec.verified;
        r.cascade_initial_block = ec.initial_block;
        r.leakage_bits = ec.ledger.total();
        r.ec_count = ec.verified && ec.ledger.total() < ec.corrected.size()
                         ? ec.corrected.size() - ec.ledger.total()
                         : 0;
        if (ec.verified) {
            const double adv = std::clamp(r.advantage(), 0.0, 1.0);
            run.bob_key = reconcile::amplify_over(channel, ec.corrected, adv, ec.ledger, cfg.safety_margin,
                                                  seeds.amplification, exec);
            const auto* alice_side = session.alice->reconciliation();
            if (!alice_side || !alice_side->final_key())
                throw ProtocolError("amplification was not acknowledged");
            run.alice_key.bits = *alice_side->final_key();
            r.final_count = run.bob_key.length();
        }
    }

    run.report = r;
    run.transcript = link.transcript().bytes();
    run.sent = session.alice->sent_events();
    run.measured = session.bob->measured();
    return run;
}

void write_events_csv(std::ostream& out, const std::vector<protocol::SentEvent>& sent,
                      const std::vector<protocol::EventRecord>& measured) {
    out << "event_id,basis,x,selected,alice_bit,bob_bit\n";
    out << std::setprecision(17);
    for (const auto& rec : measured) {
        out << rec.event_id << ',' << (rec.basis == channel::Basis::S2 ? "S2" : "S3") << ',' << rec.x << ','
            << (rec.selected ? 1 : 0) << ',' << int(sent.at(rec.event_id).bit_in(rec.basis)) << ',';
        if (rec.bit)
            out << int(*rec.bit);
        out << '\n';
    }
}

void write_artifacts(const RunArtifacts& run, const OutputPaths& paths) {
    namespace fs = std::filesystem;
    const fs::path dir(paths.dir);
    fs::create_directories(dir);
    if (!paths.report_json.empty())
        write_file(dir / paths.report_json, to_json(run.report));
    if (!paths.report_text.empty())
        write_file(dir / paths.report_text, to_text(run.report));
    if (!paths.transcript.empty())
        write_file(dir / paths.transcript, std::string(run.transcript.begin(), run.transcript.end()));
    if (!paths.events_csv.empty()) {
        std::ofstream out(dir / paths.events_csv);
        if (!out)
            throw Error("cannot write '" + (dir / paths.events_csv).string() + "'");
        write_events_csv(out, run.sent, run.measured);
    }
}

std::vector<double> eta_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(lo > 0.0) || !(hi <= 1.0) || lo > hi)
        throw ConfigError("eta grid", "need 0 < lo <= hi <= 1 and step > 0");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
        out.push_back(std::min(hi, lo + static_cast<double>(i) * step));
    return out;
}

std::vector<ScanRow> scan(const ExperimentConfig& cfg, const std::vector<double>& etas, std::size_t ec_sample_bits,
                          Exec exec) {
    std::vector<ScanRow> rows;
    for (std::size_t k = 0; k < etas.size(); ++k) {
        ScanRow row;
        row.eta = etas[k];
        const info::InfoParams model{cfg.alpha, row.eta, channel::kVacuumVariance + cfg.excess_noise,
                                     channel::kVacuumVariance};
        model.validate();
        row.threshold = info::solve_threshold(model);
        const auto st = info::selection_stats(model, row.threshold);
        row.yield = st.yield;
        row.post_error = st.post_error;
        row.eve_info = st.eve_info;
        row.advantage_per_event = st.advantage_per_event;
        row.advantage_bulk = st.advantage_bulk;
        const double adv = std::max(0.0, st.advantage(cfg.estimator));

        double keep = 1.0;
        if (ec_sample_bits > 0 && row.post_error > 0.0) {
            RngStream rng(RngStream::derive(cfg.seed, k));
            Bits a(ec_sample_bits), b(ec_sample_bits);
            for (std::size_t i = 0; i < ec_sample_bits; ++i) {
                a[i] = rng.bit();
                b[i] = a[i] ^ static_cast<std::uint8_t>(rng.uniform() < row.post_error);
            }
            reconcile::CascadeConfig cc;
            cc.passes = cfg.cascade.passes;
            cc.initial_block = first_block(cfg.cascade, row.post_error, ec_sample_bits);
            cc.error_estimate = row.post_error;
            cc.seed = RngStream::derive(cfg.seed, 0x5CA9u + k)();
            transport::LoopbackLink link;
            reconcile::CascadeResponder alice(a, exec);
            transport::LoopbackSession channel(link, alice);
            const auto ec = reconcile::run_cascade(b, cc, channel);
            row.ec_verified = ec.verified;
            row.ec_leak_fraction = static_cast<double>(ec.ledger.total()) / static_cast<double>(ec_sample_bits);
            keep = ec.verified ? std::max(0.0, 1.0 - row.ec_leak_fraction) : 0.0;
        } else {
            row.ec_verified = ec_sample_bits > 0;
        }
        row.final_fraction = row.yield * keep * adv;
        rows.push_back(row);
    }
    return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows, info::AdvantageEstimator e) {
    std::ostringstream out;
    out << "eta,threshold,yield,post_error,eve_info,advantage_per_event,advantage_bulk,ec_leak_fraction,"
           "ec_verified,final_fraction,estimator\n";
    out << std::setprecision(10);
    for (const auto& r : rows)
        out << r.eta << ',' << r.threshold << ',' << r.yield << ',' << r.post_error << ',' << r.eve_info << ','
            << r.advantage_per_event << ',' << r.advantage_bulk << ',' << r.ec_leak_fraction << ','
            << (r.ec_verified ? 1 : 0) << ',' << r.final_fraction << ',' << estimator_name(e) << '\n';
    return out.str();
}

ScatterResult scatter(const ExperimentConfig& cfg, ScatterMode mode, bool modulated, std::size_t n_events) {
    validate(cfg);
    ScatterResult res;
    std::ostringstream out;
    out << std::setprecision(10);
    if (mode == ScatterMode::qfunction) {
        const auto seeds = protocol::derive_seeds(cfg.seed);
        const channel::ChannelParams ch{cfg.eta, cfg.excess_noise};
        out << "event_id,s2_bit,s3_bit,x_s2,x_s3\n";
        for (std::size_t i = 0; i < n_events; ++i) {
            const auto bits = kernels::alice_bits(seeds.alice, i);
            auto sig = channel::apply_loss(channel::signal_from_bits(cfg.alpha, bits.s2, bits.s3), ch);
            sig.s2_amp /= std::sqrt(2.0);
            sig.s3_amp /= std::sqrt(2.0);
            RngStream rng(RngStream::derive(seeds.bob, i));
            const double x2 = channel::measure(sig, channel::Basis::S2, cfg.excess_noise, rng).x;
            const double x3 = channel::measure(sig, channel::Basis::S3, cfg.excess_noise, rng).x;
            out << i << ',' << int(bits.s2) << ',' << int(bits.s3) << ',' << x2 << ',' << x3 << '\n';
        }
    } else {
        if (n_events < 2)
            throw InsufficientDataError("dual-detector scatter needs at least 2 events");
        const channel::Signal sig{cfg.alpha, 0.0};
        out << "event_id,x_first,x_second\n";
        for (std::size_t i = 0; i < n_events; ++i) {
            RngStream rng(RngStream::derive(cfg.seed, i));
            const auto pair = channel::dual_detector_event(sig, modulated, rng);
            out << i << ',' << pair.first << ',' << pair.second << '\n';
        }
        res.correlation = channel::dual_detector_experiment(sig, n_events, modulated, cfg.seed, Exec::serial);
    }
    res.csv = out.str();
    return res;
}

bool VerifyResult::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

namespace {

// Largest per-mode mean photon number whose truncation tail stays below 1e-13.
double safe_mean_photons(int n_max) {
    double lo = 0.0, hi = std::min(2.0, n_max / 4.0);
    if (stokes::poisson_tail(hi, n_max) <= 1e-13)
        return hi;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (stokes::poisson_tail(mid, n_max) <= 1e-13 ? lo : hi) = mid;
    }
    return lo;
}

std::string sci(double v) {
    std::ostringstream out;
    out << std::scientific << std::setprecision(2) << v;
    return out.str();
}

VerifyCheck check(std::string name, double value, double tol, std::string note = {}) {
    return {std::move(name), value, tol, value <= tol, std::move(note)};
}

} // namespace

VerifyResult verify_algebra(int n_max, double alpha, std::uint64_t seed) {
    using stokes::Axis;
    VerifyResult v;
    v.n_max = n_max;
    v.alpha = alpha;

    if (n_max < 4) {
        const double tail = n_max >= 1 ? stokes::poisson_tail(alpha * alpha, n_max) : 1.0;
        v.checks.push_back({"truncation adequacy", tail, 0.0, false,
                            "n_max must be >= 4 for the quadratic algebra to have a protected subspace"});
        return v;
    }
    const stokes::FockCutoff cut(n_max);

    try {
        const auto plus = stokes::coherent_state(0.0, alpha, cut);
        const auto minus = stokes::coherent_state(0.0, -alpha, cut);
        const double got = std::abs(stokes::overlap(plus, minus));
        const double want = std::exp(-2.0 * alpha * alpha);
        const double tail = plus.truncation_loss();
        v.checks.push_back(check("overlap <a|-a> vs exp(-2|a|^2)", std::abs(got - want), std::max(1e-6, tail),
                                 "truncation tail " + sci(tail)));
    } catch (const TruncationError& e) {
        v.checks.push_back({"truncation adequacy", e.tail_mass(), 0.0, false, e.what()});
    }

    const auto S = stokes::stokes_operators(cut);
    double herm = 0.0;
    for (const auto& op : S)
        herm = std::max(herm, stokes::hermiticity_deviation(op));
    v.checks.push_back(check("hermiticity of S0..S3", herm, 1e-12));

    double ladder = 0.0;
    for (auto m : {stokes::Mode::x, stokes::Mode::y})
        ladder = std::max(ladder, (stokes::creation(m, cut).matrix - stokes::annihilation(m, cut).matrix.adjoint())
                                      .cwiseAbs()
                                      .maxCoeff());
    v.checks.push_back(check("creation = annihilation^dagger", ladder, 0.0));

    double comm = 0.0;
    const Axis axes[] = {Axis::S1, Axis::S2, Axis::S3};
    for (Axis k : axes)
        for (Axis l : axes)
            if (k != l)
                comm = std::max(comm, stokes::commutator_check(k, l, cut));
    v.checks.push_back(check("[S_k, S_l] = 2i eps_klm S_m (protected subspace)", comm, 1e-10));

    // Coherent test states kept well inside the cutoff.
    const double m = safe_mean_photons(n_max);
    RngStream rng(seed);
    double unc = 0.0, bridge = 0.0, means = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double r = std::sqrt(m * rng.uniform());
        const double th = 2.0 * M_PI * rng.uniform();
        const double ry = std::sqrt(m * rng.uniform());
        const double ty = 2.0 * M_PI * rng.uniform();
        const stokes::Complex ax = std::polar(r, th), ay = std::polar(ry, ty);
        const auto st = stokes::coherent_state(ax, ay, cut);
        for (Axis k : axes)
            for (Axis l : axes)
                if (k < l) {
                    const auto u = stokes::uncertainty_check(st, k, l);
                    unc = std::max(unc, u.rhs - u.lhs);
                }
        const double s0 = stokes::expectation(S[0], st);
        for (int k = 1; k <= 3; ++k)
            bridge = std::max(bridge, std::abs(stokes::variance(S[k], st) - s0));
        const double want_s1 = std::norm(ax) - std::norm(ay);
        const double want_s2 = 2.0 * std::real(std::conj(ax) * ay);
        const double want_s3 = 2.0 * std::imag(std::conj(ax) * ay);
        means = std::max({means, std::abs(stokes::expectation(S[0], st) - (std::norm(ax) + std::norm(ay))),
                          std::abs(stokes::expectation(S[1], st) - want_s1),
                          std::abs(stokes::expectation(S[2], st) - want_s2),
                          std::abs(stokes::expectation(S[3], st) - want_s3)});
    }
    const std::string range = "100 coherent states, mean photons per mode <= " + sci(m);
    v.checks.push_back(check("uncertainty V_k V_l >= |eps <S_m>|^2", unc, 1e-10, range));
    v.checks.push_back(check("coherent V(S_k) = <S0>", bridge, 1e-8, range));
    v.checks.push_back(check("coherent <S_k> closed form", means, 1e-8, range));
    return v;
}

std::string to_text(const VerifyResult& v) {
    std::ostringstream out;
    out << "operator algebra, n_max = " << v.n_max << ", alpha = " << v.alpha << "\n";
    out << std::scientific << std::setprecision(3);
    for (const auto& c : v.checks) {
        out << (c.passed ? "  ok   " : "  FAIL ") << std::left << std::setw(50) << c.name << " dev " << c.value
            << "  tol " << c.tolerance;
        if (!c.note.empty())
            out << "  (" << c.note << ")";
        out << '\n';
    }
    out << (v.passed() ? "all checks passed\n" : "some checks failed\n");
    return out.str();
}

} // namespace cvqkd::app

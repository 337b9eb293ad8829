#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "expklms/analysis.hpp"
#include "expklms/checks.hpp"
#include "expklms/config.hpp"
#include "expklms/error.hpp"
#include "expklms/simulator.hpp"

namespace expklms {

// Locale-independent, 17 significant digits: parsing the text back gives the
// same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc{}) throw IoError("number formatting failed");
    return std::string(buf, ptr);
}

inline std::string trace_csv(const SweepResult& sweep) {
    std::string out = "t,mean_regret,std_regret,n_reps\n";
    for (std::size_t i = 0; i < sweep.times.size(); ++i) {
        out += std::to_string(sweep.times[i]);
        out += ',';
        out += format_number(sweep.mean[i]);
        out += ',';
        out += format_number(sweep.std[i]);
        out += ',';
        out += std::to_string(sweep.n_reps);
        out += '\n';
    }
    return out;
}

struct SummaryRow {
    std::string policy;
    std::size_t horizon;
    double final_mean_regret;
    double final_std;
    double asymptotic_constant;
    double theorem1_bound;
};

inline std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& hash) {
    std::string out = "policy,T,final_mean_regret,final_std,asymptotic_constant,theorem1_bound\n";
    for (const auto& r : rows) {
        out += r.policy + ',' + std::to_string(r.horizon) + ',' + format_number(r.final_mean_regret) + ',' +
               format_number(r.final_std) + ',' + format_number(r.asymptotic_constant) + ',' +
               format_number(r.theorem1_bound) + '\n';
    }
    out += "# config_hash=" + hash + "\n";
    return out;
}

inline std::string checks_csv(const std::vector<CheckRow>& rows) {
    std::string out = "case,measured,reference,pass\n";
    for (const auto& r : rows) {
        out += '"' + r.label + "\","  + format_number(r.measured) + ',' + format_number(r.reference) + ',' +
               (r.pass ? "pass" : "fail") + '\n';
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

struct ExperimentOutcome {
    std::vector<SweepResult> sweeps;
    std::vector<SummaryRow> summary;
    std::string config_hash;
};

// Runs every policy of the config and writes trace_<policy>.csv and
// summary.csv into cfg.output_dir. All files are written after the sweeps
// finish.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto instance = make_instance(cfg.instance);
    const std::filesystem::path dir(cfg.output_dir);
    ensure_directory(dir);

    ExperimentOutcome outcome;
    outcome.config_hash = config_hash(cfg);
    const double constant = asymptotic_constant(instance);
    double bound = std::numeric_limits<double>::quiet_NaN();
    try {
        bound = theorem1_bound_best(instance, cfg.horizon, 0.25).value;
    } catch (const DomainError&) {
    }

    SweepOptions options;
    options.times = trace_times(cfg.grid, cfg.horizon);
    options.threads = cfg.threads;
    for (const auto& policy : cfg.policies) {
        auto sweep = run_sweep(instance, policy, cfg.horizon, cfg.n_reps, cfg.base_seed, options);
        outcome.summary.push_back(
            {policy.name, cfg.horizon, sweep.final_mean(), sweep.final_std(), constant, bound});
        outcome.sweeps.push_back(std::move(sweep));
    }

    for (const auto& sweep : outcome.sweeps) write_file(dir / ("trace_" + sweep.policy + ".csv"), trace_csv(sweep));
    write_file(dir / "summary.csv", summary_csv(outcome.summary, outcome.config_hash));
    write_file(dir / "resolved_config.txt", canonical_text(cfg));
    return outcome;
}

}  // namespace expklms

#pragma once

// Experiment configuration: a flat `key = value` text file with dotted
// namespaces. `#` starts a comment. Example:
//
//   instance.family = bernoulli
//   instance.means  = 0.9, 0.8
//   horizon = 100000
//   reps    = 200
//   seed    = 7
//   policy.expklms.type = exp_kl_ms
//   policy.expklms.temperature = shift_by_one
//   policy.half.type = exp_kl_ms
//   policy.half.temperature = scaled
//   policy.half.d = 2
//   policy.unif.type = uniform
//   trace.grid = log
//   trace.points_per_decade = 20

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "expklms/error.hpp"
#include "expklms/oped.hpp"
#include "expklms/policies.hpp"
#include "expklms/simulator.hpp"

namespace expklms {

struct TraceGrid {
    enum class Kind { log, linear };
    Kind kind = Kind::log;
    std::size_t points_per_decade = 20;
    std::size_t points = 100;
};

struct InstanceSpec {
    FamilyKind family = FamilyKind::bernoulli;
    double sigma = 1.0;
    double shape = 1.0;
    double lambda = 1.0;
    std::optional<double> cap;
    std::vector<double> means;
};

struct ExperimentConfig {
    InstanceSpec instance;
    std::vector<PolicySpec> policies;
    std::size_t horizon = 0;
    std::size_t n_reps = 1;
    std::uint64_t base_seed = 0;
    std::string output_dir = "out";
    TraceGrid grid;
    unsigned threads = 0;
};

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Entry {
    std::string value;
    std::size_t line;
};

inline std::string at_line(std::size_t line) { return "config line " + std::to_string(line) + ": "; }

inline double parse_double(const Entry& e, std::string_view key) {
    double v = 0.0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw ConfigError(at_line(e.line) + "'" + std::string(key) + "' expects a number, got '" + e.value + "'");
    }
    return v;
}

inline std::uint64_t parse_uint(const Entry& e, std::string_view key) {
    std::uint64_t v = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError(at_line(e.line) + "'" + std::string(key) + "' expects a nonnegative integer, got '" +
                          e.value + "'");
    }
    return v;
}

inline bool valid_policy_name(std::string_view name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

}  // namespace detail

inline ExperimentConfig parse_config(std::string_view text) {
    using detail::Entry;
    using detail::at_line;
    std::map<std::string, Entry> entries;
    std::vector<std::string> policy_order;

    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(at_line(line_no) + "expected 'key = value'");
        auto key = detail::trim(std::string_view(line).substr(0, eq));
        auto value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(at_line(line_no) + "empty key");
        if (value.empty()) throw ConfigError(at_line(line_no) + "key '" + key + "' has an empty value");
        if (auto it = entries.find(key); it != entries.end()) {
            throw ConfigError(at_line(line_no) + "duplicate key '" + key + "' (first set on line " +
                              std::to_string(it->second.line) + ")");
        }

        static const std::vector<std::string> known{
            "instance.family", "instance.means", "instance.sigma", "instance.shape", "instance.lambda",
            "instance.cap", "horizon", "reps", "seed", "output", "threads",
            "trace.grid", "trace.points_per_decade", "trace.points"};
        if (key.starts_with("policy.")) {
            const auto rest = std::string_view(key).substr(7);
            const auto dot = rest.rfind('.');
            if (dot == std::string_view::npos) throw ConfigError(at_line(line_no) + "expected policy.<name>.<field>");
            const std::string name(rest.substr(0, dot));
            const auto field = rest.substr(dot + 1);
            if (!detail::valid_policy_name(name)) {
                throw ConfigError(at_line(line_no) + "policy name '" + name + "' must use [A-Za-z0-9_-]");
            }
            if (field != "type" && field != "temperature" && field != "d") {
                throw ConfigError(at_line(line_no) + "unknown policy field '" + std::string(field) + "'");
            }
            if (std::find(policy_order.begin(), policy_order.end(), name) == policy_order.end()) {
                policy_order.push_back(name);
            }
        } else if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(at_line(line_no) + "unknown key '" + key + "'");
        }
        entries.emplace(key, Entry{value, line_no});
    }

    auto require = [&](const std::string& key) -> const Entry& {
        auto it = entries.find(key);
        if (it == entries.end()) throw ConfigError("config: missing required key '" + key + "'");
        return it->second;
    };
    auto find = [&](const std::string& key) -> const Entry* {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };

    ExperimentConfig cfg;

    const auto& family = require("instance.family");
    if (family.value == "bernoulli") cfg.instance.family = FamilyKind::bernoulli;
    else if (family.value == "poisson") cfg.instance.family = FamilyKind::poisson;
    else if (family.value == "gaussian") cfg.instance.family = FamilyKind::gaussian;
    else if (family.value == "gamma") cfg.instance.family = FamilyKind::gamma;
    else if (family.value == "inverse_gaussian") cfg.instance.family = FamilyKind::inverse_gaussian;
    else throw ConfigError(at_line(family.line) + "unknown family '" + family.value + "'");

    const auto& means = require("instance.means");
    {
        std::istringstream list(means.value);
        std::string item;
        while (std::getline(list, item, ',')) {
            cfg.instance.means.push_back(detail::parse_double(Entry{detail::trim(item), means.line}, "instance.means"));
        }
        if (cfg.instance.means.size() < 2) {
            throw ConfigError(at_line(means.line) + "'instance.means' needs at least two arms");
        }
    }
    if (auto* e = find("instance.sigma")) cfg.instance.sigma = detail::parse_double(*e, "instance.sigma");
    if (auto* e = find("instance.shape")) cfg.instance.shape = detail::parse_double(*e, "instance.shape");
    if (auto* e = find("instance.lambda")) cfg.instance.lambda = detail::parse_double(*e, "instance.lambda");
    if (auto* e = find("instance.cap")) cfg.instance.cap = detail::parse_double(*e, "instance.cap");
    const bool needs_cap = cfg.instance.family == FamilyKind::poisson || cfg.instance.family == FamilyKind::gamma ||
                           cfg.instance.family == FamilyKind::inverse_gaussian;
    if (needs_cap && !cfg.instance.cap) {
        throw ConfigError("config: missing required key 'instance.cap' for family '" + family.value + "'");
    }

    cfg.horizon = detail::parse_uint(require("horizon"), "horizon");
    if (auto* e = find("reps")) cfg.n_reps = detail::parse_uint(*e, "reps");
    if (auto* e = find("seed")) cfg.base_seed = detail::parse_uint(*e, "seed");
    if (auto* e = find("output")) cfg.output_dir = e->value;
    if (auto* e = find("threads")) cfg.threads = static_cast<unsigned>(detail::parse_uint(*e, "threads"));
    if (auto* e = find("trace.grid")) {
        if (e->value == "log") cfg.grid.kind = TraceGrid::Kind::log;
        else if (e->value == "linear") cfg.grid.kind = TraceGrid::Kind::linear;
        else throw ConfigError(at_line(e->line) + "trace.grid must be 'log' or 'linear'");
    }
    if (auto* e = find("trace.points_per_decade")) {
        cfg.grid.points_per_decade = detail::parse_uint(*e, "trace.points_per_decade");
        if (cfg.grid.points_per_decade == 0) throw ConfigError(at_line(e->line) + "trace.points_per_decade must be >= 1");
    }
    if (auto* e = find("trace.points")) {
        cfg.grid.points = detail::parse_uint(*e, "trace.points");
        if (cfg.grid.points == 0) throw ConfigError(at_line(e->line) + "trace.points must be >= 1");
    }

    if (policy_order.empty()) throw ConfigError("config: missing required key 'policy.<name>.type'");
    for (const auto& name : policy_order) {
        const auto& type = require("policy." + name + ".type");
        PolicySpec spec{name, UniformPolicy{}};
        if (type.value == "exp_kl_ms") {
            auto temperature = TemperatureFn::shift_by_one();
            if (auto* t = find("policy." + name + ".temperature")) {
                if (t->value == "shift_by_one") temperature = TemperatureFn::shift_by_one();
                else if (t->value == "identity") temperature = TemperatureFn::identity();
                else if (t->value == "scaled") {
                    const auto& d = require("policy." + name + ".d");
                    const double dv = detail::parse_double(d, "policy." + name + ".d");
                    if (!(dv > 1.0)) throw ConfigError(at_line(d.line) + "scaled temperature needs d > 1");
                    temperature = TemperatureFn::scaled(dv);
                } else {
                    throw ConfigError(at_line(t->line) + "unknown temperature '" + t->value + "'");
                }
            }
            spec.kind = ExpKlMs{temperature};
        } else if (type.value == "kl_ucb") {
            spec.kind = KlUcb{};
        } else if (type.value == "uniform") {
            spec.kind = UniformPolicy{};
        } else {
            throw ConfigError(at_line(type.line) + "unknown policy type '" + type.value + "'");
        }
        cfg.policies.push_back(std::move(spec));
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

inline OpedFamily make_family(const InstanceSpec& spec) {
    switch (spec.family) {
        case FamilyKind::bernoulli: return OpedFamily::bernoulli();
        case FamilyKind::poisson: return OpedFamily::poisson(spec.cap.value_or(0.0));
        case FamilyKind::gaussian: return OpedFamily::gaussian(spec.sigma);
        case FamilyKind::gamma: return OpedFamily::gamma(spec.shape, spec.cap.value_or(0.0));
        case FamilyKind::inverse_gaussian: return OpedFamily::inverse_gaussian(spec.lambda, spec.cap.value_or(0.0));
    }
    throw ConfigError("unknown family");
}

// Validates the instance part of a config (means inside the mean space etc.)
// and builds it; domain problems are reported as configuration errors.
inline BanditInstance make_instance(const InstanceSpec& spec) {
    try {
        return BanditInstance(make_family(spec), spec.means);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline void validate(const ExperimentConfig& cfg) {
    const auto instance = make_instance(cfg.instance);
    if (cfg.horizon < instance.arms()) {
        throw ConfigError("config: horizon " + std::to_string(cfg.horizon) + " is shorter than the " +
                          std::to_string(instance.arms()) + " arms");
    }
    if (cfg.n_reps == 0) throw ConfigError("config: reps must be >= 1");
}

// Rounds kept in trace files: 1-based, strictly increasing, always ending at T.
inline std::vector<std::size_t> trace_times(const TraceGrid& grid, std::size_t horizon) {
    std::vector<std::size_t> times;
    auto push = [&](std::size_t t) {
        if (t >= 1 && t <= horizon && (times.empty() || t > times.back())) times.push_back(t);
    };
    if (grid.kind == TraceGrid::Kind::log) {
        const double ppd = static_cast<double>(grid.points_per_decade);
        for (std::size_t j = 0;; ++j) {
            const double t = std::round(std::pow(10.0, static_cast<double>(j) / ppd));
            if (t > static_cast<double>(horizon)) break;
            push(static_cast<std::size_t>(t));
        }
    } else {
        for (std::size_t i = 1; i <= grid.points; ++i) {
            push((i * horizon + grid.points - 1) / grid.points);
        }
    }
    push(horizon);
    return times;
}

// Canonical text of everything that determines the numbers in the output
// (output directory and thread count excluded).
inline std::string canonical_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "instance.family=" << to_string(cfg.instance.family) << "\n";
    os << "instance.means=";
    for (std::size_t i = 0; i < cfg.instance.means.size(); ++i) os << (i ? "," : "") << cfg.instance.means[i];
    os << "\n";
    switch (cfg.instance.family) {
        case FamilyKind::gaussian: os << "instance.sigma=" << cfg.instance.sigma << "\n"; break;
        case FamilyKind::gamma: os << "instance.shape=" << cfg.instance.shape << "\n"; break;
        case FamilyKind::inverse_gaussian: os << "instance.lambda=" << cfg.instance.lambda << "\n"; break;
        default: break;
    }
    if (cfg.instance.cap) os << "instance.cap=" << *cfg.instance.cap << "\n";
    os << "horizon=" << cfg.horizon << "\nreps=" << cfg.n_reps << "\nseed=" << cfg.base_seed << "\n";
    if (cfg.grid.kind == TraceGrid::Kind::log) {
        os << "trace.grid=log\ntrace.points_per_decade=" << cfg.grid.points_per_decade << "\n";
    } else {
        os << "trace.grid=linear\ntrace.points=" << cfg.grid.points << "\n";
    }
    for (const auto& p : cfg.policies) os << "policy." << p.name << "=" << describe(p.kind) << "\n";
    return os.str();
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_hash(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a64(canonical_text(cfg));
    return "fnv1a64:" + os.str();
}

}  // namespace expklms

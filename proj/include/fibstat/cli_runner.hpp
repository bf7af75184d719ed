#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "fibstat/fibstat.hpp"
#include "fibstat/json_io.hpp"

namespace fibstat::cli {

using io::Json;

inline constexpr std::string_view kExperiments[] = {"fib-audit", "transform", "density", "statconv",
                                                    "membership", "korovkin", "rates", "full-paper-audit"};

enum ExitCode : int { kOk = 0, kConfigError = 1, kIntegrityError = 2 };

/// Fully resolved experiment settings. `out` does not take part in the
/// canonical form, so reports written to different directories match.
struct ExperimentConfig {
    std::string experiment;
    std::size_t N = 0;
    std::size_t K = 0;
    std::size_t M = 1024;
    std::vector<double> eps;
    double zero_threshold = 0.005;
    double rate_threshold = 0.25;
    double tolerance = 1e-6;
    std::string witness;
    std::string family;
    std::string target;
    std::string weights;
    std::string set;
    std::string out;

    Json canonical() const {
        return {{"experiment", experiment}, {"N", N},
                {"K", K},                   {"M", M},
                {"eps", eps},               {"zero_threshold", zero_threshold},
                {"rate_threshold", rate_threshold}, {"tolerance", tolerance},
                {"witness", witness},       {"family", family},
                {"target", target},         {"weights", weights},
                {"set", set}};
    }

    StatConfig stat_config() const {
        StatConfig c;
        c.density.zero_threshold = zero_threshold;
        c.convergence_tolerance = tolerance;
        return c;
    }
};

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Flat `key = value` lines; `#` starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::map<std::string, std::string> values;
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            return std::string();
        }
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) {
            key.erase(0, 2);
        }
        values[key] = trim(line.substr(eq + 1));
    }
    return values;
}

namespace detail {

inline double parse_real(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw ConfigError(key + ": '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

/// Accepts plain integers and exact powers written as 1e6.
inline std::size_t parse_count(const std::string& key, std::string_view text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec == std::errc() && res.ptr == end) {
        return v;
    }
    const double d = parse_real(key, text);
    if (d < 0 || d != std::floor(d) || d > 1e12) {
        throw ConfigError(key + ": '" + std::string(text) + "' is not a nonnegative integer");
    }
    return static_cast<std::size_t>(d);
}

inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == ',' || c == ' ') {
            if (!current.empty()) {
                parts.push_back(current);
            }
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) {
        parts.push_back(current);
    }
    return parts;
}

struct Defaults {
    std::size_t N;
    std::size_t K;
    std::string witness;
    std::string family;
    std::string target;
    std::string weights;
    std::string set;
};

inline Defaults defaults_for(std::string_view experiment) {
    if (experiment == "fib-audit") return {300, 0, "", "", "", "", ""};
    if (experiment == "transform") return {50, 0, "fib-squares", "", "", "", ""};
    if (experiment == "density") return {1000000, 0, "", "", "", "", "evens"};
    if (experiment == "statconv") return {1000000, 0, "char-squares", "", "", "", ""};
    if (experiment == "membership") return {100000, 0, "all", "", "", "", ""};
    if (experiment == "korovkin") return {0, 256, "", "fejer", "sin2", "", ""};
    if (experiment == "rates") return {100000, 128, "char-squares", "fejer", "sin,sin2", "all", ""};
    return {1000000, 256, "", "", "", "", ""};
}

inline std::size_t minimum_n(std::string_view experiment) {
    if (experiment == "fib-audit") return 4;
    if (experiment == "transform") return 1;
    if (experiment == "density") return 100;
    if (experiment == "rates" || experiment == "full-paper-audit") return 10000;
    if (experiment == "korovkin") return 0;
    return 1000;
}

}  // namespace detail

/// Builds a validated config from merged key/value settings.
inline ExperimentConfig resolve_config(const std::string& experiment, const std::map<std::string, std::string>& kv) {
    static const std::vector<std::string> known = {"N",       "K",      "M",      "eps",     "zero-threshold",
                                                   "out",     "witness", "family", "target", "weights",
                                                   "set",     "rate-threshold", "tolerance"};
    for (const auto& [key, value] : kv) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    const detail::Defaults d = detail::defaults_for(experiment);
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    ExperimentConfig c;
    c.experiment = experiment;
    c.N = get("N") ? detail::parse_count("N", *get("N")) : d.N;
    c.K = get("K") ? detail::parse_count("K", *get("K")) : d.K;
    c.M = get("M") ? detail::parse_count("M", *get("M")) : 1024;
    c.eps = {0.5, 0.25, 0.1, 0.05};
    if (auto e = get("eps")) {
        c.eps.clear();
        for (const auto& part : detail::split_list(*e)) {
            c.eps.push_back(detail::parse_real("eps", part));
        }
    }
    if (auto z = get("zero-threshold")) c.zero_threshold = detail::parse_real("zero-threshold", *z);
    if (auto r = get("rate-threshold")) c.rate_threshold = detail::parse_real("rate-threshold", *r);
    if (auto t = get("tolerance")) c.tolerance = detail::parse_real("tolerance", *t);
    c.witness = get("witness").value_or(d.witness);
    c.family = get("family").value_or(d.family);
    c.target = get("target").value_or(d.target);
    c.weights = get("weights").value_or(d.weights);
    c.set = get("set").value_or(d.set);
    c.out = get("out").value_or("");

    if (c.N < detail::minimum_n(experiment)) {
        throw ConfigError("N = " + std::to_string(c.N) + " is below the minimum " +
                          std::to_string(detail::minimum_n(experiment)) + " for " + experiment);
    }
    if (c.M < 8 || (c.M & (c.M - 1)) != 0) {
        throw ConfigError("M must be a power of two >= 8");
    }
    if (experiment == "korovkin" || experiment == "full-paper-audit") {
        if (c.K < 100) {
            throw ConfigError("K must be >= 100");
        }
    }
    if ((experiment == "korovkin" || experiment == "rates" || experiment == "full-paper-audit") && c.K >= c.M / 2) {
        throw ConfigError("K must be below M/2");
    }
    if (experiment == "rates" && c.K < 1) {
        throw ConfigError("K must be >= 1");
    }
    if (c.eps.empty()) {
        throw ConfigError("epsilon grid is empty");
    }
    for (std::size_t i = 0; i < c.eps.size(); ++i) {
        if (!(c.eps[i] > 0.0)) {
            throw ConfigError("epsilon values must be positive");
        }
        if (i > 0 && !(c.eps[i] < c.eps[i - 1])) {
            throw ConfigError("epsilon grid must be sorted strictly descending");
        }
    }
    if (!(c.zero_threshold > 0.0 && c.zero_threshold < 1.0)) {
        throw ConfigError("zero-threshold must lie in (0, 1)");
    }
    if (!(c.rate_threshold > 0.0)) {
        throw ConfigError("rate-threshold must be positive");
    }
    if (!(c.tolerance > 0.0)) {
        throw ConfigError("tolerance must be positive");
    }
    return c;
}

/// What an experiment produces: the results payload, extra CSV files, an
/// optional discrepancy list, and optional replacement text for stdout.
struct Artifacts {
    Json results;
    std::vector<std::pair<std::string, std::string>> files;
    std::optional<Json> discrepancies;
    std::optional<std::string> stdout_text;
};

namespace detail {

inline FibCache cache_for(std::size_t n) {
    constexpr std::size_t kExactCap = 4200;
    return n + 1 <= kExactCap ? build_fib_cache(n + 1) : build_ratio_cache(n + 1, kExactCap);
}

inline std::vector<std::string> witness_list(const std::string& spec) {
    if (spec == "all") {
        std::vector<std::string> names;
        for (Witness w : kAllWitnesses) {
            names.emplace_back(witness_name(w));
        }
        return names;
    }
    return split_list(spec);
}

inline SeqSample named_sample(const std::string& name, std::size_t n) {
    if (name.rfind("constant", 0) == 0) {
        double c = 2.0;
        if (const auto colon = name.find(':'); colon != std::string::npos) {
            c = parse_real("witness", name.substr(colon + 1));
        }
        SeqPrefix p = constant_sequence(c, n);
        p.label = name;
        return sample_of(std::move(p));
    }
    return witness_sample(parse_witness(name), n);
}

inline Json fib_audit_results(std::size_t n, std::vector<std::pair<std::string, std::string>>* files) {
    const FibCache cache = build_fib_cache(n);
    const IdentityReport report = identity_audit(cache);
    double max_gap = 0.0;
    io::CsvWriter csv({"n", "ratio", "abs_error"});
    for (std::size_t k = 1; k < n; ++k) {
        const double r = cache.ratio_up(k);
        const double gap = std::abs(r - kGoldenRatio);
        if (k >= 40) {
            max_gap = std::max(max_gap, gap);
        }
        csv.row({std::to_string(k), io::cell(r), io::cell(gap)});
    }
    if (files) {
        files->emplace_back("ratios.csv", csv.str());
    }
    Json cassini = Json::array();
    for (std::size_t k = 1; k <= std::min<std::size_t>(8, n - 1); ++k) {
        const Integer v = cache.value(k - 1) * cache.value(k + 1) - cache.value(k) * cache.value(k);
        cassini.push_back({{"n", k}, {"value", v.convert_to<long long>()}});
    }
    return {{"identities", io::to_json(report)},
            {"cassini_sign", "(-1)^n"},
            {"cassini_values", cassini},
            {"ratio_max_error_from_40", max_gap},
            {"f_" + std::to_string(std::min<std::size_t>(n, 90)), cache.value(std::min<std::size_t>(n, 90)).str()}};
}

inline Artifacts run_fib_audit(const ExperimentConfig& c) {
    Artifacts a;
    a.results = fib_audit_results(c.N, &a.files);
    return a;
}

inline Artifacts run_transform(const ExperimentConfig& c) {
    const SeqSample x = named_sample(c.witness, c.N);
    const FibCache cache = cache_for(c.N);
    const TransformResult t = fib_difference_transform(x, cache);
    io::CsvWriter csv({"index", "value"});
    for (std::size_t n = 1; n <= t.size(); ++n) {
        csv.row({std::to_string(n), io::cell(t.at(n))});
    }
    Artifacts a;
    const SeqPrefix p = t.as_prefix("F(" + x.label() + ")", x.horizon());
    a.results = {{"witness", x.label()},
                 {"horizon_requested", c.N},
                 {"horizon", x.horizon()},
                 {"route", x.exact ? "exact" : "binary64"},
                 {"transform", io::head_tail(p)}};
    a.files.emplace_back("transform.csv", csv.str());
    a.stdout_text = csv.str();
    return a;
}

inline Artifacts run_density(const ExperimentConfig& c) {
    DensityConfig dc;
    dc.zero_threshold = c.zero_threshold;
    Artifacts a;
    Json sets_json = Json::array();
    for (const auto& name : split_list(c.set)) {
        const IndexSet s = sets::by_name(name);
        const DensityReport r = density_estimate(s, c.N, dc);
        io::CsvWriter csv({"n", "count", "ratio"});
        std::uint64_t count = 0;
        std::uint64_t next = 1;
        for (std::uint64_t k = 1; k <= c.N; ++k) {
            count += s.contains(k) ? 1 : 0;
            if (k == next || k == c.N) {
                csv.row({std::to_string(k), io::cell(count), io::cell(static_cast<double>(count) / static_cast<double>(k))});
                next *= 2;
            }
        }
        a.files.emplace_back("counting_" + name + ".csv", csv.str());
        sets_json.push_back({{"set", name}, {"exact_density", io::optional_json(s.exact_density)},
                             {"report", io::to_json(r)}});
    }
    a.results = {{"sets", sets_json}};
    return a;
}

inline Json statconv_json(const SeqSample& x, std::size_t requested, const ExperimentConfig& c, const FibCache& cache) {
    const std::size_t n = std::min(requested, x.horizon());
    const StatConfig sc = c.stat_config();
    const SeqPrefix fx = transformed_prefix(x, cache);
    const StatVerdict s = stat_limit(x.values, c.eps, n, sc);
    const StatVerdict fs = stat_limit(fx, c.eps, n, sc);
    return {{"witness", x.label()},
            {"horizon_requested", requested},
            {"horizon", n},
            {"verdict", io::verdict_label(s)},
            {"fib_verdict", io::verdict_label(fs)},
            {"stat", io::to_json(s)},
            {"cauchy", io::to_json(stat_cauchy(x.values, c.eps, n, sc))},
            {"bounded", io::to_json(stat_bounded(x.values, n, sc))},
            {"admissible_half", admissible_bound(x.values, 0.5, n, sc)},
            {"fib_stat", io::to_json(fs)},
            {"fib_cauchy", io::to_json(stat_cauchy(fx, c.eps, n, sc))},
            {"fib_bounded", io::to_json(stat_bounded(fx, n, sc))}};
}

inline Artifacts run_statconv(const ExperimentConfig& c) {
    const FibCache cache = cache_for(c.N);
    Artifacts a;
    const auto names = witness_list(c.witness);
    if (names.size() == 1) {
        a.results = statconv_json(named_sample(names[0], c.N), c.N, c, cache);
        return a;
    }
    Json all = Json::array();
    for (const auto& name : names) {
        all.push_back(statconv_json(named_sample(name, c.N), c.N, c, cache));
    }
    a.results = {{"witnesses", all}};
    return a;
}

inline std::string flag_cell(const MembershipFlag& f) { return std::string(to_string(f.value)); }

inline Json membership_json(const ExperimentConfig& c, const FibCache& cache, std::string* csv_out) {
    io::CsvWriter csv({"witness", "N", "c", "c0", "l_inf", "S", "stat_bounded", "m0", "c(F)", "c0(F)", "l_inf(F)",
                       "S(F)", "m(F)", "m0(F)"});
    Json records = Json::array();
    for (const auto& name : witness_list(c.witness)) {
        const SeqSample x = named_sample(name, c.N);
        const std::size_t n = std::min(c.N, x.horizon());
        const MembershipRecord r = space_membership(x, c.eps, n, cache, c.stat_config());
        records.push_back(io::to_json(r));
        csv.row({name, std::to_string(n), flag_cell(r.raw.c), flag_cell(r.raw.c0), flag_cell(r.raw.l_inf),
                 flag_cell(r.raw.s), flag_cell(r.raw.stat_bounded), flag_cell(r.raw.m0), flag_cell(r.transformed.c),
                 flag_cell(r.transformed.c0), flag_cell(r.transformed.l_inf), flag_cell(r.transformed.s),
                 flag_cell(r.transformed.l_inf), flag_cell(r.transformed.m0)});
    }
    if (csv_out) {
        *csv_out = csv.str();
    }
    return records;
}

inline Artifacts run_membership(const ExperimentConfig& c) {
    const FibCache cache = cache_for(c.N);
    Artifacts a;
    std::string csv;
    a.results = {{"records", membership_json(c, cache, &csv)}};
    a.files.emplace_back("membership.csv", csv);
    return a;
}

inline KorovkinReport korovkin_report(const ExperimentConfig& c, const std::string& family_name,
                                      const std::string& target_spec) {
    const OperatorFamily family = family_by_name(family_name, c.K);
    std::vector<std::pair<std::string, GridFunction>> targets;
    for (const auto& name : split_list(target_spec)) {
        targets.emplace_back(name, target_function(name, c.M));
    }
    KorovkinConfig kc;
    kc.grid_size = c.M;
    kc.epsilon_grid = c.eps;
    kc.stat = c.stat_config();
    const FibCache cache = build_fib_cache(c.K + 2);
    return korovkin_audit(family, targets, c.K, cache, kc);
}

inline void add_error_files(const KorovkinReport& r, const std::string& prefix,
                            std::vector<std::pair<std::string, std::string>>& files) {
    for (const auto& rec : r.records) {
        files.emplace_back(prefix + "errors_" + rec.function + ".csv", io::error_csv(rec));
    }
}

inline Artifacts run_korovkin(const ExperimentConfig& c) {
    Artifacts a;
    const KorovkinReport r = korovkin_report(c, c.family, c.target);
    a.results = io::to_json(r);
    add_error_files(r, "", a.files);
    return a;
}

inline Json rates_json(const ExperimentConfig& c, std::vector<std::pair<std::string, std::string>>& files) {
    RateConfig rc;
    rc.final_threshold = c.rate_threshold;
    const FibCache cache = cache_for(c.N);
    std::vector<std::string> weight_names;
    if (c.weights == "all") {
        for (auto w : weights::kPresetNames) {
            weight_names.emplace_back(w);
        }
    } else {
        weight_names = split_list(c.weights);
    }
    Json verdicts = Json::array();
    for (const auto& wname : witness_list(c.witness)) {
        const SeqSample x = named_sample(wname, c.N);
        const std::size_t n = std::min(c.N, x.horizon());
        if (n < rc.min_horizon) {
            verdicts.push_back({{"witness", wname}, {"skipped", "prefix shorter than the rate horizon minimum"}});
            continue;
        }
        const SeqPrefix fx = transformed_prefix(x, cache);
        const StatVerdict fs = stat_limit(fx, c.eps, n, c.stat_config());
        const double limit = fs.limit.value_or(0.0);
        for (const auto& name : weight_names) {
            const RateWeights w = weights::by_name(name);
            for (double eps : c.eps) {
                const RateReport r = rate_verdict(fx, limit, w, eps, n, rc);
                Json j = io::to_json(r);
                j["witness"] = wname;
                verdicts.push_back(j);
                std::string safe = name;
                std::replace(safe.begin(), safe.end(), '/', '_');
                std::replace(safe.begin(), safe.end(), '^', '_');
                files.emplace_back("rate_" + wname + "_" + safe + "_eps" + io::format_double(eps) + ".csv",
                                   io::rate_csv(r));
            }
        }
    }
    const SeqPrefix on_squares = exceedance_sequence("squares", [](std::size_t k) { return is_square(k); }, c.N);
    const SeqPrefix on_cubes = exceedance_sequence(
        "cubes", [](std::size_t k) { return sets::cubes().contains(k); }, c.N);
    const RateWeights quarter = weights::by_name("n^-1/4");
    const RateAlgebraReport algebra =
        rate_algebra_check(on_squares, on_cubes, 0.0, 0.0, quarter, quarter, 0.5, c.N, 7.0, rc);

    Json bounds = Json::array();
    const OperatorFamily family = family_by_name(c.family, c.K);
    for (const auto& t : split_list(c.target)) {
        const RateBoundReport b = theorem_3_8_audit(family, target_function(t, c.M), c.K);
        Json j = io::to_json(b);
        j["target"] = t;
        bounds.push_back(j);
        files.emplace_back("bound_" + t + ".csv", io::bound_csv(b));
    }
    return {{"verdicts", verdicts}, {"algebra", io::to_json(algebra)}, {"rate_bound", bounds}};
}

inline Artifacts run_rates(const ExperimentConfig& c) {
    Artifacts a;
    a.results = rates_json(c, a.files);
    return a;
}

inline Artifacts run_full_audit(const ExperimentConfig& c) {
    Artifacts a;
    Json results;
    Json discrepancies = Json::array();
    Json notes = Json::array();

    // Fibonacci identities, plus the sign convention check for Cassini.
    results["fib_audit"] = fib_audit_results(300, &a.files);
    {
        const FibCache cache = build_fib_cache(16);
        Json evidence = Json::array();
        for (std::size_t n = 2; n <= 7; ++n) {
            const Integer v = cache.value(n - 1) * cache.value(n + 1) - cache.value(n) * cache.value(n);
            evidence.push_back({{"n", n}, {"computed", v.convert_to<long long>()}, {"claimed", n % 2 == 0 ? -1 : 1}});
        }
        discrepancies.push_back({{"id", "cassini-sign"},
                                 {"claim", "f_{n-1} f_{n+1} - f_n^2 = (-1)^{n+1}"},
                                 {"computed", "f_{n-1} f_{n+1} - f_n^2 = (-1)^n"},
                                 {"evidence", evidence}});
    }

    // Transform fixture.
    {
        const FibCache cache = build_fib_cache(81);
        const TransformResult t = fib_difference_transform(witness_sample(Witness::FibSquares, 80), cache);
        double tail = 0.0;
        for (std::size_t n = 2; n <= t.size(); ++n) {
            tail = std::max(tail, std::abs(t.at(n)));
        }
        results["transform_fixture"] = {{"witness", "fib-squares"}, {"N", 80}, {"first", t.at(1)}, {"tail_max_abs", tail}};
    }

    DensityConfig dc;
    dc.zero_threshold = c.zero_threshold;
    results["density"] = {{"evens", io::to_json(density_estimate(sets::evens(), c.N, dc))},
                          {"squares", io::to_json(density_estimate(sets::squares(), c.N, dc))},
                          {"axioms", io::to_json(axiom_suite(sets::evens(), sets::multiples_of(3), 10000))}};

    const FibCache cache = cache_for(c.N);
    const StatConfig sc = c.stat_config();
    std::vector<SeqSample> corpus;
    for (Witness w : kAllWitnesses) {
        corpus.push_back(witness_sample(w, c.N));
    }
    corpus.push_back(named_sample("constant:2", c.N));
    results["theorem_audit"] = io::to_json(theorem_audit(corpus, c.eps, c.N, cache, sc));

    ExperimentConfig mc = c;
    mc.witness = "all";
    results["membership"] = membership_json(mc, cache, nullptr);

    // u = (n): its transform tends to -n + golden ratio.
    {
        const SeqSample u = witness_sample(Witness::NLinear, c.N);
        const SeqPrefix fu = transformed_prefix(u, cache);
        const StatVerdict fs = stat_limit(fu, c.eps, c.N, sc);
        const StatVerdict s = stat_limit(u.values, c.eps, c.N, sc);
        Json evidence = {{"F(u)_head", io::head_tail(fu, 6)["head"]},
                         {"F(u)_N_plus_N", fu.terms[c.N - 1] + static_cast<double>(c.N)},
                         {"golden_ratio", kGoldenRatio},
                         {"S_verdict", io::verdict_label(s)},
                         {"S(F)_verdict", io::verdict_label(fs)}};
        if (!fs.convergent()) {
            discrepancies.push_back({{"id", "u-linear-in-S(F)"},
                                     {"claim", "u = (n) is not in S but is in S(F)"},
                                     {"computed", "(F u)_n = -n + golden ratio + o(1); F u is not statistically convergent"},
                                     {"evidence", evidence}});
        } else {
            notes.push_back({{"id", "u-linear-in-S(F)"}, {"evidence", evidence}});
        }
        const SeqSample x = witness_sample(Witness::CharSquares, c.N);
        const StatVerdict xs = stat_limit(transformed_prefix(x, cache), c.eps, c.N, sc);
        notes.push_back({{"id", "char-squares-in-S(F)"},
                         {"printed", "x in S but x in S(F)"},
                         {"computed", io::verdict_label(xs)},
                         {"comment", "the printed membership is what the computation gives"}});
    }

    // Korovkin audits.
    ExperimentConfig kc = c;
    const KorovkinReport fejer = korovkin_report(kc, "fejer", "sin2,abs-sin-smoothed");
    const KorovkinReport paper = korovkin_report(kc, "paper-example", "sin2");
    results["korovkin_fejer"] = io::to_json(fejer);
    results["korovkin_paper_example"] = io::to_json(paper);
    add_error_files(fejer, "fejer_", a.files);
    add_error_files(paper, "paper_example_", a.files);
    {
        const ErrorRecord& one = paper.record("1");
        const GridFunction k1 = family_by_name("paper-example", 2)(1, constant_function(1.0, c.M));
        discrepancies.push_back({{"id", "example-K_n(1)"},
                                 {"claim", "K_n(1, x) = 1"},
                                 {"computed", "K_n(1, x) = 1 + y_n, so ||K_n(1) - 1|| = y_n = f_{n+1}^2"},
                                 {"evidence", {{"K_1(1)", k1[0]}, {"e_k(1)_head", io::head_tail(one.errors.values, 6)["head"]},
                                               {"F(e(1))_head", io::head_tail(one.transformed, 6)["head"]},
                                               {"F-statistical", io::verdict_label(one.fib_statistical)}}}});
        const GridFunction k2 = family_by_name("paper-example", 2)(2, target_function("sin", c.M));
        discrepancies.push_back({{"id", "example-K_n(sin)"},
                                 {"claim", "K_n(sin t, x) = n/(n+1) sin x"},
                                 {"computed", "K_n(sin t, x) = (1 + y_n) n/(n+1) sin x"},
                                 {"evidence", {{"K_2(sin)(pi/2)", k2[3 * c.M / 4]}, {"claimed", 2.0 / 3.0}}}});
        for (const char* fn : {"sin", "cos"}) {
            const ErrorRecord& rec = paper.record(fn);
            Json evidence = {{"e_k_head", io::head_tail(rec.errors.values, 6)["head"]},
                             {"F(e)_tail", io::head_tail(rec.transformed, 4)["tail"]},
                             {"F-statistical", io::verdict_label(rec.fib_statistical)}};
            if (!rec.fib_statistical.convergent()) {
                discrepancies.push_back({{"id", std::string("example-condition-") + (fn == std::string("sin") ? "k2" : "k3")},
                                         {"claim", "(K_n) satisfies the d(F) condition for " + std::string(fn)},
                                         {"computed", "the F-transformed error sequence is not F-statistically convergent"},
                                         {"evidence", evidence}});
            } else {
                notes.push_back({{"id", std::string("example-condition-") + fn}, {"evidence", evidence}});
            }
        }
    }

    ExperimentConfig rc = c;
    rc.K = std::min<std::size_t>(c.K, 128);
    rc.witness = "char-squares";
    rc.weights = "all";
    rc.family = "fejer";
    rc.target = "sin,sin2";
    results["rates"] = rates_json(rc, a.files);

    a.results = std::move(results);
    a.discrepancies = Json{{"discrepancies", discrepancies}, {"notes", notes}};
    return a;
}

inline Artifacts run_experiment(const ExperimentConfig& c) {
    if (c.experiment == "fib-audit") return run_fib_audit(c);
    if (c.experiment == "transform") return run_transform(c);
    if (c.experiment == "density") return run_density(c);
    if (c.experiment == "statconv") return run_statconv(c);
    if (c.experiment == "membership") return run_membership(c);
    if (c.experiment == "korovkin") return run_korovkin(c);
    if (c.experiment == "rates") return run_rates(c);
    if (c.experiment == "full-paper-audit") return run_full_audit(c);
    throw ConfigError("unknown experiment '" + c.experiment + "'");
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << text;
}

}  // namespace detail

/// The report.json text for a resolved config, plus the side artifacts.
struct RunOutput {
    std::string report;
    Artifacts artifacts;
};

inline RunOutput execute(const ExperimentConfig& c) {
    RunOutput out;
    out.artifacts = detail::run_experiment(c);
    const Json config = c.canonical();
    const std::string canonical = config.dump();
    Json report = {{"experiment", c.experiment},
                   {"config", config},
                   {"config_hash", fnv1a_hex(canonical)},
                   {"results", out.artifacts.results}};
    out.report = report.dump(2) + "\n";
    return out;
}

/// Command-line entry point. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fibonacci statistical-convergence toolkit"};
    app.require_subcommand(1);
    std::map<std::string, std::string> flags;
    std::vector<std::string> eps_flags;
    std::string config_path;
    struct Flag {
        const char* name;
        const char* help;
    };
    const Flag scalar_flags[] = {{"N", "sequence horizon"},
                                 {"K", "operator index horizon"},
                                 {"M", "grid size (power of two)"},
                                 {"zero-threshold", "density zero threshold"},
                                 {"rate-threshold", "final weighted-count threshold for rate verdicts"},
                                 {"tolerance", "tail tolerance for c / c0 membership"},
                                 {"out", "output directory"},
                                 {"witness", "witness name(s), comma separated, or all"},
                                 {"family", "operator family: fejer, fejer-kernel, identity, paper-example"},
                                 {"target", "target function name(s), comma separated"},
                                 {"weights", "rate weights preset(s), comma separated, or all"},
                                 {"set", "index set name(s) for density"}};
    std::map<std::string, std::string> raw;
    for (const auto& f : scalar_flags) {
        app.add_option("--" + std::string(f.name), raw[f.name], f.help);
    }
    app.add_option("--eps", eps_flags, "epsilon value (repeatable)");
    app.add_option("--config", config_path, "flat key = value config file; flags win");
    std::map<std::string, CLI::App*> subs;
    const std::map<std::string_view, const char*> about = {
        {"fib-audit", "exact Fibonacci identity checks"},
        {"transform", "print the Fibonacci difference transform of a witness as CSV"},
        {"density", "natural density estimates for index sets"},
        {"statconv", "statistical limit, Cauchy and boundedness verdicts"},
        {"membership", "sequence space membership of x and F x"},
        {"korovkin", "error sequences and verdicts for an operator family"},
        {"rates", "rate verdicts, rate algebra and the modulus bound"},
        {"full-paper-audit", "every experiment plus the discrepancy report"}};
    for (auto name : kExperiments) {
        subs[std::string(name)] = app.add_subcommand(std::string(name), about.at(name))->fallthrough();
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    std::string experiment;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) {
            experiment = name;
        }
    }
    try {
        std::map<std::string, std::string> merged;
        if (!config_path.empty()) {
            merged = read_config_file(config_path);
        }
        for (const auto& f : scalar_flags) {
            if (app.count("--" + std::string(f.name)) > 0) {
                merged[f.name] = raw[f.name];
            }
        }
        if (!eps_flags.empty()) {
            std::string joined;
            for (const auto& e : eps_flags) {
                joined += (joined.empty() ? "" : ",") + e;
            }
            merged["eps"] = joined;
        }
        const ExperimentConfig config = resolve_config(experiment, merged);
        const RunOutput result = execute(config);
        if (!config.out.empty()) {
            const std::filesystem::path dir = std::filesystem::path(config.out) / config.experiment;
            detail::write_file(dir / "report.json", result.report);
            for (const auto& [file, text] : result.artifacts.files) {
                detail::write_file(dir / file, text);
            }
            if (result.artifacts.discrepancies) {
                detail::write_file(std::filesystem::path(config.out) / "discrepancies.json",
                                   result.artifacts.discrepancies->dump(2) + "\n");
            }
        }
        out << result.artifacts.stdout_text.value_or(result.report);
        return kOk;
    } catch (const IntegrityError& e) {
        err << "integrity error: " << e.what() << "\n";
        return kIntegrityError;
    } catch (const OperatorCheckError& e) {
        err << "operator check failed: " << e.what() << "\n";
        return kIntegrityError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace fibstat::cli

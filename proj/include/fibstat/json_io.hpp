#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fibstat/density.hpp"
#include "fibstat/fib_core.hpp"
#include "fibstat/korovkin.hpp"
#include "fibstat/rate.hpp"
#include "fibstat/sequence.hpp"
#include "fibstat/stat_convergence.hpp"

namespace fibstat::io {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal; -0 prints as 0.
inline std::string format_double(double v) {
    if (v == 0.0) {
        v = 0.0;
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// CSV text with a header row. Cells are preformatted strings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                text_ += ',';
            }
            text_ += cells[i];
        }
        text_ += '\n';
    }

    const std::string& str() const noexcept { return text_; }

private:
    std::string text_;
};

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(std::string_view v) { return std::string(v); }

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(const IdentityReport& r) {
    return {{"horizon", r.horizon},
            {"recurrence_checks", r.recurrence_checks},
            {"cassini_checks", r.cassini_checks},
            {"cassini_variant_checks", r.cassini_variant_checks},
            {"prefix_sum_checks", r.prefix_sum_checks},
            {"reciprocal_partial_sum", r.reciprocal_partial_sum},
            {"reciprocal_last_gap", r.reciprocal_last_gap},
            {"cauchy_tolerance", r.cauchy_tolerance},
            {"reciprocal_cauchy", r.reciprocal_cauchy}};
}

inline Json to_json(const DensityReport& r) {
    return {{"horizon", r.horizon},         {"count", r.count},       {"point_estimate", r.point_estimate},
            {"tail_min", r.tail_min},       {"tail_max", r.tail_max}, {"tail_empty", r.tail_empty},
            {"verdict", to_string(r.verdict)}, {"rule", r.rule}};
}

inline Json to_json(const AxiomReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"applicable", c.applicable},
                          {"holds", c.holds},
                          {"lhs", c.lhs},
                          {"rhs", c.rhs},
                          {"detail", c.detail}});
    }
    return {{"horizon", r.horizon}, {"tolerance", r.tolerance}, {"all_hold", r.all_hold()}, {"checks", checks}};
}

/// "stat-convergent(0)" style label.
inline std::string verdict_label(const StatVerdict& v) {
    std::string s(to_string(v.classification));
    if (v.convergent() && v.limit) {
        s += "(" + format_double(*v.limit) + ")";
    }
    return s;
}

inline Json to_json(const StatVerdict& v) {
    Json devs = Json::array();
    for (const auto& d : v.deviations) {
        devs.push_back({{"epsilon", d.epsilon}, {"density", to_json(d.density)}});
    }
    return {{"label", v.label},
            {"horizon", v.horizon},
            {"verdict", verdict_label(v)},
            {"classification", to_string(v.classification)},
            {"limit", optional_json(v.limit)},
            {"candidates", v.candidates},
            {"epsilon_grid", v.epsilon_grid},
            {"deviations", devs},
            {"reason", v.reason}};
}

inline Json to_json(const CauchyVerdict& v) {
    Json pivots = Json::array();
    for (const auto& p : v.pivots) {
        pivots.push_back(optional_json(p));
    }
    return {{"label", v.label},
            {"horizon", v.horizon},
            {"answer", to_string(v.answer)},
            {"epsilon_grid", v.epsilon_grid},
            {"pivots", pivots},
            {"reason", v.reason}};
}

inline Json to_json(const BoundedVerdict& v) {
    return {{"label", v.label},         {"horizon", v.horizon},       {"answer", to_string(v.answer)},
            {"bound", optional_json(v.bound)}, {"candidates", v.candidates}, {"reason", v.reason}};
}

inline Json to_json(const MembershipFlag& f) { return {{"value", to_string(f.value)}, {"evidence", f.evidence}}; }

inline Json to_json(const MembershipRecord& r) {
    const SpaceFlags& a = r.raw;
    const SpaceFlags& b = r.transformed;
    return {{"label", r.label},
            {"horizon", r.horizon},
            {"c", to_json(a.c)},
            {"c0", to_json(a.c0)},
            {"l_inf", to_json(a.l_inf)},
            {"S", to_json(a.s)},
            {"stat_bounded", to_json(a.stat_bounded)},
            {"m0", to_json(a.m0)},
            {"c(F)", to_json(b.c)},
            {"c0(F)", to_json(b.c0)},
            {"l_inf(F)", to_json(b.l_inf)},
            {"S(F)", to_json(b.s)},
            {"m(F)", to_json(b.l_inf)},
            {"m0(F)", to_json(b.m0)},
            {"S_limit", to_json(r.raw_limit)},
            {"S(F)_limit", to_json(r.transformed_limit)},
            {"violations", r.violations}};
}

inline Json to_json(const MemberAudit& m) {
    return {{"label", m.label},
            {"horizon", m.horizon},
            {"stat", to_json(m.stat)},
            {"cauchy", to_json(m.cauchy)},
            {"bounded", to_json(m.bounded)},
            {"fib_stat", to_json(m.fib_stat)},
            {"fib_cauchy", to_json(m.fib_cauchy)},
            {"fib_bounded", to_json(m.fib_bounded)},
            {"mutation_applicable", m.mutation_applicable},
            {"mutated_transform_verdict", verdict_label(m.mutated_transform_stat)},
            {"mutated_transform_unchanged", m.mutated_transform_unchanged},
            {"mutated_input_verdict", verdict_label(m.mutated_input_stat)},
            {"mutated_input_changed", m.mutated_input_changed},
            {"violations", m.violations},
            {"unconfirmed", m.unconfirmed}};
}

inline Json to_json(const TheoremAuditReport& r) {
    Json members = Json::array();
    for (const auto& m : r.members) {
        members.push_back(to_json(m));
    }
    return {{"violation_count", r.violation_count()}, {"members", members}};
}

inline Json to_json(const ClassicalVerdict& v) {
    return {{"verdict", to_string(v.verdict)}, {"window_sups", {v.early, v.middle, v.late}},
            {"threshold", v.threshold},        {"reason", v.reason}};
}

/// First and last few terms, enough to read a trend without the full prefix.
inline Json head_tail(const SeqPrefix& s, std::size_t count = 8) {
    Json head = Json::array();
    Json tail = Json::array();
    for (std::size_t i = 0; i < std::min(count, s.size()); ++i) {
        head.push_back(s.terms[i]);
    }
    for (std::size_t i = s.size() > count ? s.size() - count : 0; i < s.size(); ++i) {
        tail.push_back(s.terms[i]);
    }
    return {{"size", s.size()}, {"overflow_at", optional_json(s.overflow_at)}, {"head", head}, {"tail", tail}};
}

inline Json to_json(const SpotCheck& c) {
    return {{"k", c.index},
            {"linearity_error", c.linearity_error},
            {"min_on_nonnegative", c.min_on_nonnegative},
            {"linear", c.linear},
            {"positive", c.positive}};
}

inline Json to_json(const KorovkinReport& r) {
    Json records = Json::array();
    for (const auto& rec : r.records) {
        records.push_back({{"function", rec.function},
                           {"test_function", rec.test_function},
                           {"errors", head_tail(rec.errors.values)},
                           {"transformed", head_tail(rec.transformed)},
                           {"classical", to_json(rec.classical)},
                           {"statistical", to_json(rec.statistical)},
                           {"fib_statistical", to_json(rec.fib_statistical)}});
    }
    Json implications = Json::array();
    for (const auto& c : r.implications) {
        implications.push_back({{"mode", c.mode},
                                {"k1", to_string(c.k1)},
                                {"k2", to_string(c.k2)},
                                {"k3", to_string(c.k3)},
                                {"k0", to_string(c.k0)},
                                {"forward_consistent", c.forward_consistent},
                                {"converse_consistent", c.converse_consistent}});
    }
    Json spots = Json::array();
    for (const auto& s : r.spot_checks) {
        spots.push_back(to_json(s));
    }
    return {{"family", r.family},         {"K", r.max_index},        {"M", r.grid_size},
            {"epsilon_grid", r.epsilon_grid}, {"spot_checks", spots}, {"records", records},
            {"implications", implications}};
}

inline std::string error_csv(const ErrorRecord& rec) {
    CsvWriter csv({"k", "e_k", "Fe_k"});
    const std::size_t n = std::max(rec.errors.values.size(), rec.transformed.size());
    for (std::size_t k = 1; k <= n; ++k) {
        csv.row({std::to_string(k), k <= rec.errors.values.size() ? cell(rec.errors.values.terms[k - 1]) : "",
                 k <= rec.transformed.size() ? cell(rec.transformed.terms[k - 1]) : ""});
    }
    return csv.str();
}

inline Json to_json(const RateReport& r) {
    return {{"weights", r.weights},
            {"epsilon", r.epsilon},
            {"limit", r.limit},
            {"horizon", r.horizon},
            {"dyadic_horizons", r.dyadic_horizons},
            {"counts", r.counts},
            {"weighted", r.weighted},
            {"verdict", to_string(r.verdict)},
            {"rule", r.rule}};
}

inline std::string rate_csv(const RateReport& r) {
    CsvWriter csv({"n", "count", "weighted"});
    for (std::size_t i = 0; i < r.weighted.size(); ++i) {
        csv.row({std::to_string(r.dyadic_horizons[i]), cell(r.counts[i]), cell(r.weighted[i])});
    }
    return csv.str();
}

inline Json to_json(const RateAlgebraReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"report", to_json(c.report)}});
    }
    return {{"preconditions_hold", r.preconditions_hold},
            {"all_pass", r.all_pass()},
            {"x", to_json(r.x_report)},
            {"y", to_json(r.y_report)},
            {"checks", checks}};
}

inline Json to_json(const RateBoundReport& r) {
    double worst_ratio = 0.0;
    for (const auto& row : r.rows) {
        if (row.rhs > 0.0) {
            worst_ratio = std::max(worst_ratio, row.lhs / row.rhs);
        }
    }
    return {{"family", r.family},
            {"note", r.note},
            {"Kmax", r.kmax},
            {"K", r.rows.size()},
            {"holds", r.holds()},
            {"min_margin", r.min_margin},
            {"max_lhs_over_rhs", worst_ratio},
            {"pairs_checked", r.pairs_checked},
            {"pair_violations", r.pair_violations}};
}

inline std::string bound_csv(const RateBoundReport& r) {
    CsvWriter csv({"k", "lhs", "rhs", "margin", "theta", "omega", "e1"});
    for (const auto& row : r.rows) {
        csv.row({std::to_string(row.k), cell(row.lhs), cell(row.rhs), cell(row.margin), cell(row.theta),
                 cell(row.omega), cell(row.error_one)});
    }
    return csv.str();
}

}  // namespace fibstat::io

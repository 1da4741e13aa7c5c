#ifndef AFFQ_AVERAGING_HPP
#define AFFQ_AVERAGING_HPP

// Averaged relation between I_v(t) and T_v(t): bins p_i = [i/k, (i+1)/k) of
// the ratio, and t_i the weighted mean of T over the (v, t) pairs whose ratio
// falls in p_i, with weight dv dt / sqrt(1 + t^2).
//
// The substitution t = sinh(s) turns the weight into ds exactly. The s axis
// is sampled at cell midpoints of [-s_max, s_max]; a negative s stands for
// the mirrored affinity a^v_{-|t|}, the reflection of K^v(|t|) in H, which
// has the same ratio and the same equilibria. The symmetric table therefore
// carries the t in (0, sinh(s_max)) integrals twice and the ratios t_i are
// unchanged.

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "affq/body.hpp"
#include "affq/csv.hpp"
#include "affq/equilibria.hpp"
#include "affq/error.hpp"
#include "affq/isoperimetric.hpp"

namespace affq {

template <int D>
struct FieldRow {
    Vec<D> v{};
    double sphere_weight = 0.0;
    double s = 0.0;
    double t = 0.0;  // sinh(s)
    double iso = 0.0;
    int T = 0;
    EquilibriumCounts counts;
    bool failed = false;  // counts() degenerated; excluded from averages
};

template <int D>
struct FieldTable {
    std::vector<FieldRow<D>> rows;
    double s_max = 0.0;
    int s_steps = 0;
    double ds = 0.0;
    int sphere_res = 0;
    int failed_rows = 0;

    double weight(const FieldRow<D>& r) const { return r.sphere_weight * ds; }
};

struct FieldConfig {
    int sphere_res = 16;
    double s_max = 4.0;
    int s_steps = 32;
    EquilibriumOptions equilibria;
};

namespace detail {

inline void check_field_config(double s_max, int s_steps) {
    if (!(s_max >= 3.0)) throw Error(ErrorCode::BadSpec, "sample_field", "s_max must be at least 3");
    if (s_steps < 32 || s_steps % 2 != 0)
        throw Error(ErrorCode::BadSpec, "sample_field", "s_steps must be even and at least 32");
}

}  // namespace detail

template <int D>
FieldTable<D> sample_field(const Body<D>& body, int sphere_res, double s_max, int s_steps,
                           const EquilibriumOptions& eq = {}) {
    detail::check_field_config(s_max, s_steps);
    const SphereGrid<D> grid = sphere_grid<D>(sphere_res);
    const AffineFamily<D> family(body);
    FieldTable<D> table;
    table.s_max = s_max;
    table.s_steps = s_steps;
    table.ds = 2.0 * s_max / s_steps;
    table.sphere_res = sphere_res;
    const int half = s_steps / 2;

    // Values for s > 0 at each direction; s < 0 and antipodal directions are
    // exact copies (the affinity depends on v v^T and on |t| up to reflection).
    struct Cell {
        double iso = 0.0;
        EquilibriumCounts counts;
        bool failed = false;
    };
    std::vector<std::vector<Cell>> cells(grid.size());
    const std::size_t total_rows = grid.size() * static_cast<std::size_t>(s_steps);
    std::size_t failed_so_far = 0;
    auto excessive = [&](std::size_t failed) {
        return Error(ErrorCode::ExcessiveDegeneracy, "sample_field",
                     std::to_string(failed) + " of " + std::to_string(total_rows) + " rows degenerate");
    };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t a = antipode_index<D>(grid, k);
        if (a < k) {
            cells[k] = cells[a];
            continue;
        }
        // Each computed cell stands for its mirror in s and, when distinct,
        // for the antipodal direction.
        const std::size_t copies = a == k ? 2 : 4;
        const Vec<D>& v = grid.nodes[k];
        cells[k].resize(half);
        for (int j = 0; j < half; ++j) {
            const double t = std::sinh((j + 0.5) * table.ds);
            Cell& c = cells[k][j];
            c.iso = family.iso(v, t);
            try {
                c.counts = counts<D>(apply_affinity<D>(body, v, t), eq);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Degenerate && e.code() != ErrorCode::PoincareHopfViolation) throw;
                c.failed = true;
                failed_so_far += copies;
                // Stop as soon as the outcome is settled.
                if (failed_so_far * 100 > total_rows) throw excessive(failed_so_far);
            }
        }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int j = -half; j < half; ++j) {
            const int m = j >= 0 ? j : -j - 1;
            const double s = (j >= 0 ? 1.0 : -1.0) * (m + 0.5) * table.ds;
            const Cell& c = cells[k][m];
            FieldRow<D> r;
            r.v = grid.nodes[k];
            r.sphere_weight = grid.weights[k];
            r.s = s;
            r.t = std::sinh(s);
            r.iso = c.iso;
            r.counts = c.counts;
            r.T = c.counts.T;
            r.failed = c.failed;
            if (r.failed) ++table.failed_rows;
            table.rows.push_back(r);
        }
    }
    if (static_cast<std::size_t>(table.failed_rows) * 100 > table.rows.size())
        throw excessive(table.failed_rows);
    return table;
}

template <int D>
FieldTable<D> sample_field(const Body<D>& body, const FieldConfig& cfg) {
    return sample_field<D>(body, cfg.sphere_res, cfg.s_max, cfg.s_steps, cfg.equilibria);
}

// Rows with |s| <= s_max of a table sampled on a wider window with the same ds.
template <int D>
FieldTable<D> restrict_window(const FieldTable<D>& wide, double s_max) {
    FieldTable<D> t = wide;
    t.s_max = s_max;
    t.rows.clear();
    t.failed_rows = 0;
    for (const auto& r : wide.rows)
        if (std::abs(r.s) <= s_max) {
            t.rows.push_back(r);
            if (r.failed) ++t.failed_rows;
        }
    t.s_steps = static_cast<int>(std::lround(2.0 * s_max / t.ds));
    return t;
}

struct BinAverages {
    int k = 0;
    std::vector<std::optional<double>> t_values;
    std::vector<double> occupancy;
    std::vector<int> min_T, max_T;
    bool monotone = false;
};

inline int bin_of(double iso, int k) {
    const int i = static_cast<int>(std::floor(iso * k));
    return std::clamp(i, 0, k - 1);
}

// Non-decreasing over the defined entries.
inline bool defined_nondecreasing(const std::vector<std::optional<double>>& t) {
    std::optional<double> prev;
    for (const auto& x : t) {
        if (!x) continue;
        if (prev && *x < *prev) return false;
        prev = x;
    }
    return true;
}

template <int D>
BinAverages bin_averages(const FieldTable<D>& table, int k) {
    if (k < 1) throw Error(ErrorCode::BadSpec, "bin_averages", "k must be positive");
    if (table.rows.empty()) throw Error(ErrorCode::EmptyGrid, "bin_averages", "empty table");
    std::vector<double> num(k, 0.0), den(k, 0.0);
    BinAverages b;
    b.k = k;
    b.min_T.assign(k, 0);
    b.max_T.assign(k, 0);
    std::vector<bool> seen(k, false);
    for (const auto& r : table.rows) {
        if (r.failed) continue;
        const int i = bin_of(r.iso, k);
        const double w = table.weight(r);
        num[i] += w * r.T;
        den[i] += w;
        if (!seen[i]) {
            b.min_T[i] = b.max_T[i] = r.T;
            seen[i] = true;
        } else {
            b.min_T[i] = std::min(b.min_T[i], r.T);
            b.max_T[i] = std::max(b.max_T[i], r.T);
        }
    }
    for (int i = 0; i < k; ++i) {
        b.occupancy.push_back(den[i]);
        b.t_values.push_back(seen[i] ? std::optional<double>(num[i] / den[i]) : std::nullopt);
    }
    b.monotone = defined_nondecreasing(b.t_values);
    return b;
}

struct CriticalNumber {
    int k_star = 1;
    std::vector<BinAverages> per_k;  // k = 1 .. k_max
};

template <int D>
CriticalNumber critical_number(const FieldTable<D>& table, int k_max = 8) {
    if (k_max < 2) throw Error(ErrorCode::BadSpec, "critical_number", "k_max must be at least 2");
    CriticalNumber cn;
    for (int k = 1; k <= k_max; ++k) {
        cn.per_k.push_back(bin_averages<D>(table, k));
        if (cn.per_k.back().monotone) cn.k_star = k;
    }
    return cn;
}

// ---------------------------------------------------------------------------
// Conjecture experiment.

struct ConjectureConfig {
    FieldConfig field;
    int k_max = 8;
    std::vector<int> report_k{2, 3, 4};
    unsigned long seed = 0;
};

struct NamedBody {
    std::string label;
    AnyBody body;
};

inline nlohmann::json optional_json(const std::optional<double>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

inline nlohmann::json bins_json(const BinAverages& b) {
    nlohmann::json j;
    j["k"] = b.k;
    j["monotone"] = b.monotone;
    nlohmann::json tv = nlohmann::json::array(), occ = nlohmann::json::array();
    for (std::size_t i = 0; i < b.t_values.size(); ++i) {
        tv.push_back(optional_json(b.t_values[i]));
        occ.push_back(b.occupancy[i]);
    }
    j["t_i"] = tv;
    j["occupancy"] = occ;
    return j;
}

struct BodyExperiment {
    nlohmann::json entry;
    std::vector<BinAverages> bins;  // k = 1 .. k_max, base window
};

template <int D>
BodyExperiment run_body_experiment(const Body<D>& body, const ConjectureConfig& cfg, const FieldConfig& field) {
    BodyExperiment out;
    nlohmann::json& e = out.entry;
    // One table on the doubled window with the same ds; the base window is a
    // subset of its rows.
    const FieldTable<D> wide = sample_field<D>(body, field.sphere_res, 2.0 * field.s_max, 2 * field.s_steps,
                                               field.equilibria);
    const FieldTable<D> base = restrict_window<D>(wide, field.s_max);
    const CriticalNumber cn = critical_number<D>(base, cfg.k_max);
    const CriticalNumber cw = critical_number<D>(wide, cfg.k_max);
    out.bins = cn.per_k;
    e["dim"] = D;
    e["k_star"] = cn.k_star;
    e["rows"] = base.rows.size();
    e["failed_rows"] = base.failed_rows;
    e["window"] = {{"s_max", field.s_max},
                   {"s_steps", field.s_steps},
                   {"ds", base.ds},
                   {"t_min", std::sinh(0.5 * base.ds)},
                   {"t_max", std::sinh(field.s_max - 0.5 * base.ds)},
                   {"sphere_res", field.sphere_res}};
    nlohmann::json tables = nlohmann::json::array();
    for (int k : cfg.report_k)
        if (k >= 1 && k <= cfg.k_max) tables.push_back(bins_json(cn.per_k[k - 1]));
    e["tables"] = tables;

    nlohmann::json sens;
    sens["s_max"] = 2.0 * field.s_max;
    sens["k_star"] = cw.k_star;
    nlohmann::json deltas = nlohmann::json::array();
    for (int k : cfg.report_k) {
        if (k < 1 || k > cfg.k_max) continue;
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < k; ++i) {
            const auto& a = cn.per_k[k - 1].t_values[i];
            const auto& b = cw.per_k[k - 1].t_values[i];
            row.push_back(a && b ? nlohmann::json(*b - *a) : nlohmann::json(nullptr));
        }
        deltas.push_back({{"k", k}, {"delta_t_i", row}});
    }
    sens["deltas"] = deltas;
    e["truncation_sensitivity"] = sens;
    return out;
}

struct ConjectureReport {
    nlohmann::json document;
    // Per body: label and a k,i,t_i,occupancy table.
    std::vector<std::pair<std::string, std::string>> bins_csv;
};

inline ConjectureReport conjecture_report(const std::vector<NamedBody>& bodies, const ConjectureConfig& cfg) {
    if (bodies.empty()) throw Error(ErrorCode::BadSpec, "conjecture_report", "no bodies");
    ConjectureReport rep;
    nlohmann::json& doc = rep.document;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["seed"] = cfg.seed;
    doc["k_max"] = cfg.k_max;
    doc["truncation"] =
        "t = sinh(s), s at cell midpoints of [-s_max, s_max]; negative s mirrors the affinity; weight = "
        "sphere weight * ds";
    nlohmann::json entries = nlohmann::json::array();
    nlohmann::json flagged = nlohmann::json::array();
    for (const auto& nb : bodies) {
        nlohmann::json e;
        e["label"] = nb.label;
        try {
            BodyExperiment ex = std::visit(
                [&](const auto& b) {
                    constexpr int D = std::decay_t<decltype(b)>::dim;
                    return run_body_experiment<D>(b, cfg, cfg.field);
                },
                nb.body);
            // A k* below 2 is re-run at double direction resolution before it is reported.
            if (ex.entry["k_star"].get<int>() < 2) {
                FieldConfig fine = cfg.field;
                fine.sphere_res *= 2;
                ex = std::visit(
                    [&](const auto& b) {
                        constexpr int D = std::decay_t<decltype(b)>::dim;
                        return run_body_experiment<D>(b, cfg, fine);
                    },
                    nb.body);
                ex.entry["rerun_at_double_resolution"] = true;
            }
            for (auto it = ex.entry.begin(); it != ex.entry.end(); ++it) e[it.key()] = it.value();
            e["counterexample_candidate"] = e["k_star"].get<int>() < 2;
            if (e["counterexample_candidate"].get<bool>()) flagged.push_back(nb.label);
            std::string csv = "k,i,t_i,occupancy\n";
            for (const auto& b : ex.bins)
                for (int i = 0; i < b.k; ++i)
                    csv += join({std::to_string(b.k), std::to_string(i),
                                          b.t_values[i] ? fmt17(*b.t_values[i]) : std::string("nan"),
                                          fmt17(b.occupancy[i])}) +
                           "\n";
            rep.bins_csv.emplace_back(nb.label, csv);
        } catch (const Error& err) {
            e["error"] = err.what();
            e["error_code"] = to_string(err.code());
            e["invariant_failure"] = is_invariant_failure(err.code());
            e["k_star"] = nullptr;
        }
        entries.push_back(e);
    }
    doc["bodies"] = entries;
    doc["flagged"] = flagged;
    return rep;
}

}  // namespace affq

#endif  // AFFQ_AVERAGING_HPP

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "dtsync/simulator.hpp"

/// Result tables and trace dumps. The CSV layout is a stable interface:
/// column order, header spelling and number formatting never change, so
/// downstream plotting scripts can rely on byte-identical output for
/// identical runs.
namespace dtsync::report {

inline constexpr const char* kCsvHeader =
    "sweep_value,policy,beta,avg_aoi,aoi_ci,avg_energy_j,energy_ci,avg_cost,cost_ci,"
    "realizations,base_seed";

/// Shortest-round-trip style formatting; infinities print as "inf".
inline std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct ResultRow {
    double sweep_value = 0.0;
    std::string policy;
    double beta = 0.0;
    sim::Metrics metrics;
    std::uint64_t base_seed = 0;

    bool operator==(const ResultRow&) const = default;
};

inline ResultRow make_row(double sweep_value, const sim::Policy& policy,
                          const sim::Metrics& metrics, std::uint64_t base_seed) {
    ResultRow row;
    row.sweep_value = sweep_value;
    row.policy = sim::policy_name(policy.kind);
    row.beta = sim::effective_beta(policy);
    row.metrics = metrics;
    row.base_seed = base_seed;
    return row;
}

/// Canonical row order: policy name, then threshold, then swept value.
inline void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.policy, a.beta, a.sweep_value) <
               std::tie(b.policy, b.beta, b.sweep_value);
    });
}

inline void write_csv(std::ostream& out, std::vector<ResultRow> rows) {
    sort_rows(rows);
    out << kCsvHeader << "\n";
    for (const ResultRow& row : rows) {
        out << format_value(row.sweep_value) << "," << row.policy << ","
            << format_value(row.beta) << "," << format_value(row.metrics.avg_aoi) << ","
            << format_value(row.metrics.aoi_ci) << "," << format_value(row.metrics.avg_energy_j)
            << "," << format_value(row.metrics.energy_ci) << ","
            << format_value(row.metrics.avg_cost) << "," << format_value(row.metrics.cost_ci)
            << "," << row.metrics.realizations << "," << row.base_seed << "\n";
    }
}

/// Per-slot ledger of one realization.
inline void write_trace(std::ostream& out, const sim::Trace& trace) {
    out << "# seed " << trace.seed << "\n";
    out << "# " << trace.fingerprint << "\n";
    out << "slot,aoi_sum,transmit_j,backhaul_j,migration_j,migrated\n";
    for (const sim::SlotRecord& rec : trace.slots) {
        out << rec.slot << "," << rec.aoi_sum << "," << format_value(rec.transmit_j) << ","
            << format_value(rec.backhaul_j) << "," << format_value(rec.migration_j) << ","
            << (rec.migrated ? 1 : 0) << "\n";
    }
}

}  // namespace dtsync::report

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tailgini/estimators.hpp"
#include "tailgini/simulation.hpp"

namespace tailgini {

// One tail-fraction configuration: k = alpha*n, k1 = alpha1*n, k2 = alpha2*n.
struct GridPoint {
    double alpha = kDefaultAlpha;
    double alpha1 = kDefaultAlpha1;
    double alpha2 = kDefaultAlpha2;

    bool operator==(const GridPoint&) const = default;
};

inline constexpr int kDeskReplications = 200;
inline constexpr int kPaperReplications = 2000;

// Sweep values used when studying sensitivity to one tail fraction with the
// other two held at 0.05.
inline constexpr double kDefaultSweep[] = {0.03, 0.05, 0.08, 0.10};

// Grid consisting of one varying axis at a time, the other two fixed.
std::vector<GridPoint> axis_sweep_grid(std::span<const double> sweep_values, double fixed = 0.05);

struct ExperimentSpec {
    SimModel model;
    int n = 5000;
    int m = kDeskReplications;
    std::vector<double> p_levels;
    std::vector<GridPoint> grid;
    std::uint64_t seed = 0;

    void validate() const;
};

// Outcome of one fit inside one replication. Failed fits keep their error
// text and leave the numeric fields unset.
struct ReplicationRecord {
    int replication = 0;
    GridPoint grid;
    double p = 0.0;
    int k = 0, k1 = 0, k2 = 0;
    bool ok = false;
    std::string error;
    double theta_intermediate = 0.0;
    double gamma1_hat = 0.0;
    double eta_hat = 0.0;
    double d_n = 0.0;
    double theta_extreme = 0.0;
    double theta_baseline = 0.0;
    double true_value = 0.0;
    double ratio_adjusted = 0.0; // theta_extreme / true_value
    double ratio_baseline = 0.0; // theta_baseline / true_value
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<ReplicationRecord> records; // one per (replication, grid point, p)
    int failed_replications = 0;
};

// Runs m seeded replications (one random stream per replication), fitting
// every grid point and extreme level against the supplied true values.
// Individual fit failures are recorded, not fatal; the run aborts only when
// more than 5% of replications contain a failure.
ExperimentResult run_replications(const ExperimentSpec& spec,
                                  const std::map<double, double>& true_values);

struct SmseRow {
    GridPoint grid;
    double p = 0.0;
    double smse = 0.0;
    int used = 0;
    bool missing = false; // no successful replication at this grid point
};

// sMSE(k, k1, k2) = mean over replications of (ratio - 1)^2, per grid point
// and level. Grid points without successful replications are emitted as
// explicit gaps, never interpolated.
std::vector<SmseRow> smse_grid(const ExperimentResult& result);

struct RatioSummaryRow {
    GridPoint grid;
    double p = 0.0;
    std::string method; // "adjusted" or "baseline"
    double mean_ratio = 0.0;
    double sd_ratio = 0.0;
    int used = 0;
};

std::vector<RatioSummaryRow> ratio_summaries(const ExperimentResult& result);

// Paired order statistic of standardized log-ratios vs the matching normal
// quantile at level i/(m+1).
struct QqPair {
    double level = 0.0;
    double sample_quantile = 0.0;
    double normal_quantile = 0.0;
};

struct QqDiagnostics {
    GridPoint grid;
    double p = 0.0;
    int used = 0;
    int excluded_nonpositive = 0;
    double mean_log = 0.0;
    double sd_log = 0.0;
    double correlation = 0.0;
    std::vector<QqPair> pairs;
};

// Core of the normality diagnostic, usable on any log-ratio sample.
QqDiagnostics qq_against_normal(std::span<const double> logratios);

// Diagnostics per (grid point, level); requires at least 30 successful
// replications per combination. Non-positive ratios are excluded and counted.
std::vector<QqDiagnostics> logratio_diagnostics(const ExperimentResult& result);

// Result tables as tab-delimited text with named header rows; exact column
// names are documented in the README.
void write_replication_records(const std::filesystem::path& path, const ExperimentResult& result);
void write_smse(const std::filesystem::path& path, std::span<const SmseRow> rows);
void write_ratio_summary(const std::filesystem::path& path,
                         std::span<const RatioSummaryRow> rows);
void write_qq_pairs(const std::filesystem::path& path, std::span<const QqDiagnostics> diagnostics);
void write_qq_summary(const std::filesystem::path& path,
                      std::span<const QqDiagnostics> diagnostics);

// Re-parses a replication table written by write_replication_records.
std::vector<ReplicationRecord> read_replication_records(const std::filesystem::path& path);

} // namespace tailgini

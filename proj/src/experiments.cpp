#include "tailgini/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tailgini/errors.hpp"
#include "tailgini/normal.hpp"
#include "tailgini/textio.hpp"
#include "tailgini/util.hpp"

namespace tailgini {

std::vector<GridPoint> axis_sweep_grid(std::span<const double> sweep_values, double fixed) {
    std::vector<GridPoint> grid;
    for (double v : sweep_values) {
        const GridPoint candidates[] = {
            {v, fixed, fixed}, {fixed, v, fixed}, {fixed, fixed, v}};
        for (const auto& g : candidates) {
            if (std::find(grid.begin(), grid.end(), g) == grid.end()) grid.push_back(g);
        }
    }
    return grid;
}

void ExperimentSpec::validate() const {
    model.validate();
    if (m < 2) throw std::invalid_argument("ExperimentSpec: m must be >= 2");
    if (n < 4) throw std::invalid_argument("ExperimentSpec: n must be >= 4");
    if (p_levels.empty()) throw std::invalid_argument("ExperimentSpec: no extreme levels given");
    if (grid.empty()) throw std::invalid_argument("ExperimentSpec: empty grid");
    for (const auto& g : grid) {
        for (double a : {g.alpha, g.alpha1, g.alpha2}) {
            if (a * static_cast<double>(n) < 10.0) {
                throw std::invalid_argument(
                    "ExperimentSpec: every tail fraction must satisfy alpha*n >= 10");
            }
        }
        for (double p : p_levels) {
            if (!(p > 0.0 && p <= g.alpha)) {
                throw std::invalid_argument(
                    "ExperimentSpec: each level p must lie in (0, alpha] for every grid point");
            }
        }
    }
}

ExperimentResult run_replications(const ExperimentSpec& spec,
                                  const std::map<double, double>& true_values) {
    spec.validate();
    for (double p : spec.p_levels) {
        if (true_values.find(p) == true_values.end()) {
            throw std::invalid_argument("run_replications: no true value supplied for p = " +
                                        format_double(p));
        }
    }

    const std::size_t n_grid = spec.grid.size();
    const std::size_t n_p = spec.p_levels.size();
    ExperimentResult result;
    result.spec = spec;
    result.records.resize(static_cast<std::size_t>(spec.m) * n_grid * n_p);
    std::vector<std::uint8_t> replication_failed(static_cast<std::size_t>(spec.m), 0);

    parallel_for(static_cast<std::size_t>(spec.m), [&](std::size_t r) {
        RngStream rng(spec.seed, r);
        const PairedSample sample = sample_model(spec.model, static_cast<std::size_t>(spec.n), rng);
        for (std::size_t gi = 0; gi < n_grid; ++gi) {
            const GridPoint& g = spec.grid[gi];
            for (std::size_t pi = 0; pi < n_p; ++pi) {
                const double p = spec.p_levels[pi];
                ReplicationRecord& rec = result.records[(r * n_grid + gi) * n_p + pi];
                rec.replication = static_cast<int>(r);
                rec.grid = g;
                rec.p = p;
                TailConfig config;
                config.k = static_cast<int>(std::lround(g.alpha * spec.n));
                config.k1 = static_cast<int>(std::lround(g.alpha1 * spec.n));
                config.k2 = static_cast<int>(std::lround(g.alpha2 * spec.n));
                config.p = p;
                rec.k = config.k;
                rec.k1 = config.k1;
                rec.k2 = config.k2;
                try {
                    const TailGiniFit fit = fit_tail_gini(sample, config);
                    rec.theta_intermediate = fit.theta_intermediate;
                    rec.gamma1_hat = fit.gamma1_hat;
                    rec.eta_hat = fit.eta_hat;
                    rec.d_n = fit.d_n;
                    rec.theta_extreme = fit.theta_extreme;
                    rec.theta_baseline = fit.theta_baseline;
                    rec.true_value = true_values.at(p);
                    rec.ratio_adjusted = rec.theta_extreme / rec.true_value;
                    rec.ratio_baseline = rec.theta_baseline / rec.true_value;
                    rec.ok = true;
                } catch (const std::exception& e) {
                    rec.ok = false;
                    rec.error = e.what();
                    replication_failed[r] = 1;
                }
            }
        }
    });

    for (std::uint8_t f : replication_failed) result.failed_replications += f;
    if (result.failed_replications > 0.05 * spec.m) {
        throw estimation_error("run_replications: " + std::to_string(result.failed_replications) +
                               " of " + std::to_string(spec.m) +
                               " replications failed (more than 5%)");
    }
    return result;
}

namespace {

template <typename Fn>
void for_each_combination(const ExperimentResult& result, Fn&& fn) {
    for (const auto& g : result.spec.grid) {
        for (double p : result.spec.p_levels) {
            std::vector<const ReplicationRecord*> recs;
            for (const auto& rec : result.records) {
                if (rec.grid == g && rec.p == p) recs.push_back(&rec);
            }
            fn(g, p, recs);
        }
    }
}

} // namespace

std::vector<SmseRow> smse_grid(const ExperimentResult& result) {
    std::vector<SmseRow> rows;
    for_each_combination(result, [&](const GridPoint& g, double p,
                                     const std::vector<const ReplicationRecord*>& recs) {
        SmseRow row;
        row.grid = g;
        row.p = p;
        double acc = 0.0;
        for (const auto* rec : recs) {
            if (!rec->ok) continue;
            const double d = rec->ratio_adjusted - 1.0;
            acc += d * d;
            ++row.used;
        }
        if (row.used == 0) {
            row.missing = true;
        } else {
            row.smse = acc / static_cast<double>(row.used);
        }
        rows.push_back(std::move(row));
    });
    return rows;
}

std::vector<RatioSummaryRow> ratio_summaries(const ExperimentResult& result) {
    std::vector<RatioSummaryRow> rows;
    for_each_combination(result, [&](const GridPoint& g, double p,
                                     const std::vector<const ReplicationRecord*>& recs) {
        std::vector<double> adjusted, baseline;
        for (const auto* rec : recs) {
            if (!rec->ok) continue;
            adjusted.push_back(rec->ratio_adjusted);
            baseline.push_back(rec->ratio_baseline);
        }
        if (adjusted.size() < 2) return;
        for (const char* method : {"adjusted", "baseline"}) {
            const auto& v = method == std::string("adjusted") ? adjusted : baseline;
            RatioSummaryRow row;
            row.grid = g;
            row.p = p;
            row.method = method;
            row.mean_ratio = mean(v);
            row.sd_ratio = sample_sd(v);
            row.used = static_cast<int>(v.size());
            rows.push_back(std::move(row));
        }
    });
    return rows;
}

QqDiagnostics qq_against_normal(std::span<const double> logratios) {
    QqDiagnostics d;
    d.used = static_cast<int>(logratios.size());
    if (d.used < 2) throw std::invalid_argument("qq_against_normal: need at least two values");
    d.mean_log = mean(logratios);
    d.sd_log = sample_sd(logratios);
    if (d.sd_log == 0.0) {
        throw std::invalid_argument("qq_against_normal: log-ratios are constant (zero variance)");
    }
    std::vector<double> standardized(logratios.begin(), logratios.end());
    for (auto& v : standardized) v = (v - d.mean_log) / d.sd_log;
    std::sort(standardized.begin(), standardized.end());

    const std::size_t m = standardized.size();
    std::vector<double> normal_q(m);
    d.pairs.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double level = static_cast<double>(i + 1) / static_cast<double>(m + 1);
        normal_q[i] = normal_quantile(level);
        d.pairs[i] = {level, standardized[i], normal_q[i]};
    }
    d.correlation = pearson_correlation(standardized, normal_q);
    return d;
}

std::vector<QqDiagnostics> logratio_diagnostics(const ExperimentResult& result) {
    std::vector<QqDiagnostics> all;
    for_each_combination(result, [&](const GridPoint& g, double p,
                                     const std::vector<const ReplicationRecord*>& recs) {
        std::vector<double> logs;
        int excluded = 0;
        for (const auto* rec : recs) {
            if (!rec->ok) continue;
            if (rec->ratio_adjusted > 0.0) {
                logs.push_back(std::log(rec->ratio_adjusted));
            } else {
                ++excluded;
            }
        }
        if (logs.size() < 30) {
            throw std::invalid_argument(
                "logratio_diagnostics: fewer than 30 usable replications at alpha = " +
                format_double(g.alpha) + ", p = " + format_double(p));
        }
        QqDiagnostics d = qq_against_normal(logs);
        d.grid = g;
        d.p = p;
        d.excluded_nonpositive = excluded;
        all.push_back(std::move(d));
    });
    return all;
}

namespace {

constexpr char kReplicationHeader[] =
    "replication\talpha\talpha1\talpha2\tp\tk\tk1\tk2\tstatus\terror\ttheta_intermediate\t"
    "gamma1_hat\teta_hat\td_n\ttheta_extreme\ttheta_baseline\ttrue_value\tratio_adjusted\t"
    "ratio_baseline";

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (auto& c : out) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

} // namespace

void write_replication_records(const std::filesystem::path& path,
                               const ExperimentResult& result) {
    std::ostringstream out;
    out << kReplicationHeader << '\n';
    for (const auto& rec : result.records) {
        out << rec.replication << '\t' << format_double(rec.grid.alpha) << '\t'
            << format_double(rec.grid.alpha1) << '\t' << format_double(rec.grid.alpha2) << '\t'
            << format_double(rec.p) << '\t' << rec.k << '\t' << rec.k1 << '\t' << rec.k2 << '\t';
        if (rec.ok) {
            out << "ok\t-\t" << format_double(rec.theta_intermediate) << '\t'
                << format_double(rec.gamma1_hat) << '\t' << format_double(rec.eta_hat) << '\t'
                << format_double(rec.d_n) << '\t' << format_double(rec.theta_extreme) << '\t'
                << format_double(rec.theta_baseline) << '\t' << format_double(rec.true_value)
                << '\t' << format_double(rec.ratio_adjusted) << '\t'
                << format_double(rec.ratio_baseline);
        } else {
            out << "failed\t" << sanitize(rec.error) << "\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA";
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

void write_smse(const std::filesystem::path& path, std::span<const SmseRow> rows) {
    std::ostringstream out;
    out << "alpha\talpha1\talpha2\tp\tsmse\tused\n";
    for (const auto& row : rows) {
        out << format_double(row.grid.alpha) << '\t' << format_double(row.grid.alpha1) << '\t'
            << format_double(row.grid.alpha2) << '\t' << format_double(row.p) << '\t'
            << (row.missing ? "NA" : format_double(row.smse)) << '\t' << row.used << '\n';
    }
    atomic_write(path, out.str());
}

void write_ratio_summary(const std::filesystem::path& path,
                         std::span<const RatioSummaryRow> rows) {
    std::ostringstream out;
    out << "alpha\talpha1\talpha2\tp\tmethod\tmean_ratio\tsd_ratio\tused\n";
    for (const auto& row : rows) {
        out << format_double(row.grid.alpha) << '\t' << format_double(row.grid.alpha1) << '\t'
            << format_double(row.grid.alpha2) << '\t' << format_double(row.p) << '\t' << row.method
            << '\t' << format_double(row.mean_ratio) << '\t' << format_double(row.sd_ratio) << '\t'
            << row.used << '\n';
    }
    atomic_write(path, out.str());
}

void write_qq_pairs(const std::filesystem::path& path,
                    std::span<const QqDiagnostics> diagnostics) {
    std::ostringstream out;
    out << "alpha\talpha1\talpha2\tp\tlevel\tsample_quantile\tnormal_quantile\n";
    for (const auto& d : diagnostics) {
        for (const auto& pair : d.pairs) {
            out << format_double(d.grid.alpha) << '\t' << format_double(d.grid.alpha1) << '\t'
                << format_double(d.grid.alpha2) << '\t' << format_double(d.p) << '\t'
                << format_double(pair.level) << '\t' << format_double(pair.sample_quantile) << '\t'
                << format_double(pair.normal_quantile) << '\n';
        }
    }
    atomic_write(path, out.str());
}

void write_qq_summary(const std::filesystem::path& path,
                      std::span<const QqDiagnostics> diagnostics) {
    std::ostringstream out;
    out << "alpha\talpha1\talpha2\tp\tused\texcluded_nonpositive\tmean_log\tsd_log\t"
           "quantile_correlation\n";
    for (const auto& d : diagnostics) {
        out << format_double(d.grid.alpha) << '\t' << format_double(d.grid.alpha1) << '\t'
            << format_double(d.grid.alpha2) << '\t' << format_double(d.p) << '\t' << d.used << '\t'
            << d.excluded_nonpositive << '\t' << format_double(d.mean_log) << '\t'
            << format_double(d.sd_log) << '\t' << format_double(d.correlation) << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<ReplicationRecord> read_replication_records(const std::filesystem::path& path) {
    const auto rows = read_table(path, kReplicationHeader, '\t');
    std::vector<ReplicationRecord> records;
    records.reserve(rows.size());
    const std::string ctx = path.string();
    for (const auto& fields : rows) {
        if (fields.size() != 19) {
            throw io_error(ctx + ": expected 19 fields per row, found " +
                           std::to_string(fields.size()));
        }
        ReplicationRecord rec;
        rec.replication = static_cast<int>(parse_double(fields[0], ctx));
        rec.grid.alpha = parse_double(fields[1], ctx);
        rec.grid.alpha1 = parse_double(fields[2], ctx);
        rec.grid.alpha2 = parse_double(fields[3], ctx);
        rec.p = parse_double(fields[4], ctx);
        rec.k = static_cast<int>(parse_double(fields[5], ctx));
        rec.k1 = static_cast<int>(parse_double(fields[6], ctx));
        rec.k2 = static_cast<int>(parse_double(fields[7], ctx));
        rec.ok = fields[8] == "ok";
        if (rec.ok) {
            rec.theta_intermediate = parse_double(fields[10], ctx);
            rec.gamma1_hat = parse_double(fields[11], ctx);
            rec.eta_hat = parse_double(fields[12], ctx);
            rec.d_n = parse_double(fields[13], ctx);
            rec.theta_extreme = parse_double(fields[14], ctx);
            rec.theta_baseline = parse_double(fields[15], ctx);
            rec.true_value = parse_double(fields[16], ctx);
            rec.ratio_adjusted = parse_double(fields[17], ctx);
            rec.ratio_baseline = parse_double(fields[18], ctx);
        } else {
            rec.error = fields[9];
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace tailgini

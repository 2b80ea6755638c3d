#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tailgini/sample.hpp"

namespace tailgini {

// Calendar plumbing. Dates are days since 1970-01-01 (civil calendar).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);
std::int64_t parse_iso_date(const std::string& s); // strict YYYY-MM-DD
std::string format_iso_date(std::int64_t days);

// ISO-8601 week identifier, encoded as iso_year * 100 + week number.
int iso_week_id(std::int64_t days);

// Daily close prices for one ticker: strictly increasing dates, positive
// closes.
struct PriceSeries {
    std::string ticker;
    std::vector<std::int64_t> dates;
    std::vector<double> closes;

    void validate() const;
};

// Weekly losses in percent: loss_t = -100 (P_t / P_{t-1} - 1) over the last
// closes of consecutive ISO calendar weeks present in the source. Weeks
// missing from the source are skipped and counted in gap_count.
struct LossSeries {
    std::string ticker;
    std::vector<int> week_ids;
    std::vector<std::int64_t> week_end_dates; // last trading day in the week
    std::vector<double> losses;
    int gap_count = 0;
};

LossSeries weekly_losses(const PriceSeries& prices);

struct SummaryStats {
    double mean = 0.0;
    double sd = 0.0; // sample standard deviation, n-1 denominator
};

SummaryStats summary_stats(const LossSeries& series);

// Pairs two loss series on their common ISO weeks (x from `individual`,
// y from `systemic`).
PairedSample align_losses(const LossSeries& individual, const LossSeries& systemic);

// File formats. Prices: header "date,close", ISO-8601 dates. Pair files:
// header "x,y", one pair per row. Single-series losses: header
// "week_end,loss".
PriceSeries read_price_csv(const std::filesystem::path& path, const std::string& ticker);
void write_loss_series(const std::filesystem::path& path, const LossSeries& series);
PairedSample read_pair_file(const std::filesystem::path& path);
void write_pair_file(const std::filesystem::path& path, const PairedSample& sample);

} // namespace tailgini

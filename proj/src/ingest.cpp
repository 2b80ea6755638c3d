#include "tailgini/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tailgini/errors.hpp"
#include "tailgini/textio.hpp"
#include "tailgini/util.hpp"

namespace tailgini {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, int& year, int& month, int& day) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    year = static_cast<int>(y + (month <= 2));
}

std::int64_t parse_iso_date(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &extra) != 3 || s.size() != 10) {
        throw io_error("invalid ISO-8601 date '" + s + "' (expected YYYY-MM-DD)");
    }
    if (m < 1 || m > 12 || d < 1 || d > 31) {
        throw io_error("invalid calendar date '" + s + "'");
    }
    const std::int64_t days = days_from_civil(y, m, d);
    int ry, rm, rd;
    civil_from_days(days, ry, rm, rd);
    if (ry != y || rm != m || rd != d) {
        throw io_error("invalid calendar date '" + s + "'");
    }
    return days;
}

std::string format_iso_date(std::int64_t days) {
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

int iso_week_id(std::int64_t days) {
    // ISO weekday, Monday = 1 .. Sunday = 7 (1970-01-01 was a Thursday).
    const int weekday = static_cast<int>(((days % 7) + 7 + 3) % 7) + 1;
    // The week belongs to the year containing its Thursday.
    const std::int64_t thursday = days + (4 - weekday);
    int y, m, d;
    civil_from_days(thursday, y, m, d);
    const std::int64_t jan1 = days_from_civil(y, 1, 1);
    const int week = static_cast<int>((thursday - jan1) / 7) + 1;
    return y * 100 + week;
}

void PriceSeries::validate() const {
    if (dates.size() != closes.size()) {
        throw std::invalid_argument("PriceSeries: dates and closes lengths differ");
    }
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (i > 0 && dates[i] <= dates[i - 1]) {
            throw std::invalid_argument("PriceSeries " + ticker +
                                        ": dates must be strictly increasing (row " +
                                        std::to_string(i + 1) + ")");
        }
        if (!(closes[i] > 0.0) || !std::isfinite(closes[i])) {
            throw std::invalid_argument("PriceSeries " + ticker + ": non-positive close at " +
                                        format_iso_date(dates[i]));
        }
    }
}

LossSeries weekly_losses(const PriceSeries& prices) {
    prices.validate();
    if (prices.dates.size() < 2) {
        throw std::invalid_argument("weekly_losses: need at least two observations");
    }

    // Last close per ISO week, in order.
    std::vector<int> week_ids;
    std::vector<std::int64_t> week_ends;
    std::vector<double> week_closes;
    for (std::size_t i = 0; i < prices.dates.size(); ++i) {
        const int wid = iso_week_id(prices.dates[i]);
        if (!week_ids.empty() && week_ids.back() == wid) {
            week_ends.back() = prices.dates[i];
            week_closes.back() = prices.closes[i];
        } else {
            week_ids.push_back(wid);
            week_ends.push_back(prices.dates[i]);
            week_closes.push_back(prices.closes[i]);
        }
    }
    if (week_ids.size() < 2) {
        throw std::invalid_argument("weekly_losses: need closes from at least two calendar weeks");
    }

    LossSeries out;
    out.ticker = prices.ticker;
    for (std::size_t w = 1; w < week_ids.size(); ++w) {
        const double ret = 100.0 * (week_closes[w] / week_closes[w - 1] - 1.0);
        out.week_ids.push_back(week_ids[w]);
        out.week_end_dates.push_back(week_ends[w]);
        out.losses.push_back(-ret);
        // Consecutive present weeks that are not adjacent on the calendar.
        if (iso_week_id(week_ends[w - 1] + 7) != week_ids[w]) ++out.gap_count;
    }
    return out;
}

SummaryStats summary_stats(const LossSeries& series) {
    if (series.losses.size() < 2) {
        throw std::invalid_argument("summary_stats: need at least two losses");
    }
    return {mean(series.losses), sample_sd(series.losses)};
}

PairedSample align_losses(const LossSeries& individual, const LossSeries& systemic) {
    std::vector<double> x, y;
    std::size_t j = 0;
    for (std::size_t i = 0; i < individual.week_ids.size(); ++i) {
        while (j < systemic.week_ids.size() && systemic.week_ids[j] < individual.week_ids[i]) ++j;
        if (j < systemic.week_ids.size() && systemic.week_ids[j] == individual.week_ids[i]) {
            x.push_back(individual.losses[i]);
            y.push_back(systemic.losses[j]);
        }
    }
    if (x.size() < 2) {
        throw std::invalid_argument("align_losses: fewer than two common weeks between " +
                                    individual.ticker + " and " + systemic.ticker);
    }
    return PairedSample(std::move(x), std::move(y));
}

PriceSeries read_price_csv(const std::filesystem::path& path, const std::string& ticker) {
    const auto rows = read_table(path, "date,close", ',');
    PriceSeries series;
    series.ticker = ticker;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 2) {
            throw io_error(path.string() + ": expected 'date,close' row, found " +
                           std::to_string(rows[i].size()) + " fields at data row " +
                           std::to_string(i + 1));
        }
        series.dates.push_back(parse_iso_date(rows[i][0]));
        series.closes.push_back(parse_double(rows[i][1], path.string()));
    }
    try {
        series.validate();
    } catch (const std::invalid_argument& e) {
        throw io_error(path.string() + ": " + e.what());
    }
    return series;
}

void write_loss_series(const std::filesystem::path& path, const LossSeries& series) {
    std::ostringstream out;
    out << "week_end,loss\n";
    for (std::size_t i = 0; i < series.losses.size(); ++i) {
        out << format_iso_date(series.week_end_dates[i]) << ','
            << format_double(series.losses[i]) << '\n';
    }
    atomic_write(path, out.str());
}

PairedSample read_pair_file(const std::filesystem::path& path) {
    const auto rows = read_table(path, "x,y", ',');
    std::vector<double> x, y;
    x.reserve(rows.size());
    y.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 2) {
            throw io_error(path.string() + ": expected 'x,y' row, found " +
                           std::to_string(rows[i].size()) + " fields at data row " +
                           std::to_string(i + 1));
        }
        x.push_back(parse_double(rows[i][0], path.string()));
        y.push_back(parse_double(rows[i][1], path.string()));
    }
    try {
        return PairedSample(std::move(x), std::move(y));
    } catch (const std::invalid_argument& e) {
        throw io_error(path.string() + ": " + e.what());
    }
}

void write_pair_file(const std::filesystem::path& path, const PairedSample& sample) {
    std::ostringstream out;
    out << "x,y\n";
    for (std::size_t i = 0; i < sample.n(); ++i) {
        out << format_double(sample.x[i]) << ',' << format_double(sample.y[i]) << '\n';
    }
    atomic_write(path, out.str());
}

} // namespace tailgini

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tailgini/errors.hpp"
#include "tailgini/experiments.hpp"
#include "tailgini/normal.hpp"
#include "tailgini/rng.hpp"
#include "tailgini/util.hpp"

using namespace tailgini;

namespace {

const SimModel kModel1a = find_preset("model1a")->model;

ExperimentSpec small_spec(int m, std::uint64_t seed = 111) {
    ExperimentSpec spec;
    spec.model = kModel1a;
    spec.n = 500;
    spec.m = m;
    spec.p_levels = {0.01};
    spec.grid = {{0.09, 0.05, 0.05}};
    spec.seed = seed;
    return spec;
}

// Hand-built result carrying the given adjusted ratios at a single grid
// point and level p = 0.01.
ExperimentResult synthetic_result(const std::vector<double>& ratios) {
    ExperimentResult result;
    result.spec = small_spec(std::max<int>(2, static_cast<int>(ratios.size())));
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        ReplicationRecord rec;
        rec.replication = static_cast<int>(i);
        rec.grid = result.spec.grid.front();
        rec.p = 0.01;
        rec.ok = true;
        rec.ratio_adjusted = ratios[i];
        rec.ratio_baseline = 2.0 * ratios[i];
        result.records.push_back(rec);
    }
    return result;
}

} // namespace

TEST_CASE("run_replications is deterministic") {
    const ExperimentSpec spec = small_spec(2);
    const std::map<double, double> truth = {{0.01, 0.58}};
    const ExperimentResult a = run_replications(spec, truth);
    const ExperimentResult b = run_replications(spec, truth);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].ok == b.records[i].ok);
        CHECK(a.records[i].theta_extreme == b.records[i].theta_extreme);
        CHECK(a.records[i].ratio_adjusted == b.records[i].ratio_adjusted);
        CHECK(a.records[i].gamma1_hat == b.records[i].gamma1_hat);
        CHECK(a.records[i].eta_hat == b.records[i].eta_hat);
    }
}

TEST_CASE("run_replications demands a true value per level") {
    const ExperimentSpec spec = small_spec(2);
    CHECK_THROWS_AS(run_replications(spec, {}), std::invalid_argument);
}

TEST_CASE("run_replications aborts when more than 5% of replications fail") {
    // alpha*n = 251.2 rounds k to 251, so k/n < p = alpha and every fit
    // rejects the extrapolation level.
    ExperimentSpec spec;
    spec.model = kModel1a;
    spec.n = 5000;
    spec.m = 4;
    spec.p_levels = {0.05024};
    spec.grid = {{0.05024, 0.05, 0.05}};
    spec.seed = 9;
    CHECK_THROWS_AS(run_replications(spec, {{0.05024, 1.0}}), estimation_error);
}

TEST_CASE("spec validation") {
    ExperimentSpec spec = small_spec(2);
    spec.m = 1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec(2);
    spec.grid = {{0.01, 0.05, 0.05}}; // alpha*n = 5 < 10
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec(2);
    spec.p_levels = {0.5}; // p > alpha
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("summaries are self-consistent with the stored records") {
    const ExperimentSpec spec = small_spec(40);
    const std::map<double, double> truth = {{0.01, 0.58}};
    const ExperimentResult result = run_replications(spec, truth);

    std::vector<double> adjusted, baseline;
    for (const auto& rec : result.records) {
        REQUIRE(rec.ok);
        adjusted.push_back(rec.ratio_adjusted);
        baseline.push_back(rec.ratio_baseline);
    }

    const auto summaries = ratio_summaries(result);
    REQUIRE(summaries.size() == 2);
    for (const auto& row : summaries) {
        const auto& v = row.method == "adjusted" ? adjusted : baseline;
        CHECK(row.mean_ratio == doctest::Approx(mean(v)).epsilon(1e-12));
        CHECK(row.sd_ratio == doctest::Approx(sample_sd(v)).epsilon(1e-12));
        CHECK(row.used == 40);
    }

    const auto smse = smse_grid(result);
    REQUIRE(smse.size() == 1);
    double acc = 0.0;
    for (double r : adjusted) acc += (r - 1.0) * (r - 1.0);
    CHECK(smse.front().smse == doctest::Approx(acc / 40.0).epsilon(1e-12));
}

TEST_CASE("summaries are invariant under record permutation") {
    const ExperimentSpec spec = small_spec(30);
    const std::map<double, double> truth = {{0.01, 0.58}};
    ExperimentResult result = run_replications(spec, truth);
    const auto before_sum = ratio_summaries(result);
    const auto before_smse = smse_grid(result);

    std::mt19937 shuffler(5);
    std::shuffle(result.records.begin(), result.records.end(), shuffler);
    const auto after_sum = ratio_summaries(result);
    const auto after_smse = smse_grid(result);
    REQUIRE(before_sum.size() == after_sum.size());
    for (std::size_t i = 0; i < before_sum.size(); ++i) {
        CHECK(before_sum[i].mean_ratio == doctest::Approx(after_sum[i].mean_ratio).epsilon(1e-13));
        CHECK(before_sum[i].sd_ratio == doctest::Approx(after_sum[i].sd_ratio).epsilon(1e-13));
    }
    CHECK(before_smse.front().smse == doctest::Approx(after_smse.front().smse).epsilon(1e-13));
}

TEST_CASE("smse of perfect ratios is zero") {
    const auto result = synthetic_result(std::vector<double>(10, 1.0));
    CHECK(smse_grid(result).front().smse == 0.0);
}

TEST_CASE("smse hand arithmetic") {
    const auto result = synthetic_result({0.5, 1.5});
    CHECK(smse_grid(result).front().smse == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("a grid point without successes is an explicit gap") {
    ExperimentResult result = synthetic_result({1.0, 1.0});
    for (auto& rec : result.records) {
        rec.ok = false;
        rec.error = "synthetic failure";
    }
    const auto rows = smse_grid(result);
    REQUIRE(rows.size() == 1);
    CHECK(rows.front().missing);
    CHECK(rows.front().used == 0);

    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "tailgini_test_smse.tsv";
    write_smse(path, rows);
    std::ifstream in(path);
    std::string header, data;
    std::getline(in, header);
    std::getline(in, data);
    CHECK(data.find("NA") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("qq correlation is high for exactly normal input") {
    RngStream rng(77, 0);
    std::vector<double> logs(1000);
    for (auto& v : logs) v = 0.3 * rng.next_normal() - 0.1;
    const QqDiagnostics d = qq_against_normal(logs);
    CHECK(d.correlation > 0.995);
    CHECK(d.pairs.size() == logs.size());
    // Standardization is exact.
    CHECK(d.mean_log == doctest::Approx(mean(logs)).epsilon(1e-12));
}

TEST_CASE("qq of constant input is an error, not a division by zero") {
    const std::vector<double> logs(50, 0.25);
    CHECK_THROWS_AS(qq_against_normal(logs), std::invalid_argument);
}

TEST_CASE("logratio diagnostics exclude non-positive ratios and count them") {
    std::vector<double> ratios(40, 1.1);
    ratios[3] = -0.5;
    ratios[17] = 0.0;
    const auto base = synthetic_result(ratios);
    ExperimentResult result = base;
    // Give the positive ratios some spread so the sd is nonzero.
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        if (result.records[i].ratio_adjusted > 0.0) {
            result.records[i].ratio_adjusted = 0.8 + 0.01 * static_cast<double>(i);
        }
    }
    const auto diagnostics = logratio_diagnostics(result);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics.front().excluded_nonpositive == 2);
    CHECK(diagnostics.front().used == 38);
}

TEST_CASE("logratio diagnostics require 30 usable replications") {
    const auto result = synthetic_result(std::vector<double>(10, 1.1));
    CHECK_THROWS_AS(logratio_diagnostics(result), std::invalid_argument);
}

TEST_CASE("axis sweep grid fixes two fractions at the baseline") {
    const auto grid = axis_sweep_grid(kDefaultSweep);
    // 4 sweep values x 3 axes, minus duplicate all-baseline points: 10.
    CHECK(grid.size() == 10);
    for (const auto& g : grid) {
        int off_baseline = 0;
        for (double a : {g.alpha, g.alpha1, g.alpha2}) off_baseline += a != 0.05 ? 1 : 0;
        CHECK(off_baseline <= 1);
    }
}

TEST_CASE("replication table round-trips through its own reader") {
    const ExperimentSpec spec = small_spec(5);
    const std::map<double, double> truth = {{0.01, 0.58}};
    const ExperimentResult result = run_replications(spec, truth);

    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "tailgini_test_reps.tsv";
    write_replication_records(path, result);
    const auto parsed = read_replication_records(path);
    REQUIRE(parsed.size() == result.records.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].replication == result.records[i].replication);
        CHECK(parsed[i].ok == result.records[i].ok);
        // 17 significant digits round-trip exactly.
        CHECK(parsed[i].theta_extreme == result.records[i].theta_extreme);
        CHECK(parsed[i].ratio_adjusted == result.records[i].ratio_adjusted);
        CHECK(parsed[i].eta_hat == result.records[i].eta_hat);
    }
    std::filesystem::remove(path);
}

TEST_CASE("model 2 ratios are markedly more dispersed than the model 1 rows") {
    const ModelPreset* preset = find_preset("model2");
    ExperimentSpec spec;
    spec.model = preset->model;
    spec.n = 5000;
    spec.m = 500;
    spec.p_levels = {0.01};
    spec.grid = {{0.09, 0.05, 0.05}};
    spec.seed = 31415;
    const ExperimentResult result = run_replications(spec, {{0.01, preset->tg_p01}});
    double sd_model2 = 0.0;
    for (const auto& row : ratio_summaries(result)) {
        if (row.method == "adjusted") sd_model2 = row.sd_ratio;
    }
    // Reference ratio dispersions of the four Model 1 presets at this design.
    const double model1_sds[] = {0.3831, 0.3503, 0.5278, 0.4914};
    for (double sd : model1_sds) CHECK(sd_model2 > 1.5 * sd);
}

TEST_CASE("smse is stable across the alpha1 sweep on Model 1(a)") {
    ExperimentSpec spec;
    spec.model = kModel1a;
    spec.n = 5000;
    spec.m = 100;
    spec.p_levels = {0.01};
    spec.seed = 424242;
    for (double a1 : {0.03, 0.05, 0.08, 0.10}) {
        spec.grid.push_back({0.05, a1, 0.05});
    }
    const std::map<double, double> truth = {{0.01, find_preset("model1a")->tg_p01}};
    const ExperimentResult result = run_replications(spec, truth);
    const auto rows = smse_grid(result);
    double lo = 1e300, hi = 0.0;
    for (const auto& row : rows) {
        REQUIRE_FALSE(row.missing);
        lo = std::min(lo, row.smse);
        hi = std::max(hi, row.smse);
    }
    CHECK(hi / lo < 3.0);
}

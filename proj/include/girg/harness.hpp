#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "girg/model.hpp"
#include "girg/regimes.hpp"

namespace girg {

struct ExperimentConfig {
    ModelParams params;             // n and seed are overridden per graph
    std::vector<double> n_grid;
    std::size_t graphs_per_n = 1;
    std::size_t trials_per_graph = 1;
    double fraction = 0.5;
    std::uint64_t seed_base = 1;
    std::size_t max_rounds = 100000;
    SamplerEngine engine = SamplerEngine::CellGrid;
    unsigned threads = 1;
    std::string csv_path;           // empty: stdout
    std::string fit_path;           // empty: no fit written

    void validate() const;
};

[[nodiscard]] ExperimentConfig experiment_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& cfg);

struct ScalingRow {
    double n;
    std::uint64_t graph_seed;
    std::size_t trial;
    std::size_t rounds;
    std::size_t giant_size;
    std::string stop;  // a StopCause name, or "no_giant" for a skipped graph
};

/// Seed of graph g at grid point i.
[[nodiscard]] std::uint64_t experiment_graph_seed(std::uint64_t seed_base, std::size_t i, std::size_t g);

/// Samples every graph of the grid and runs push-pull to the fraction stop.
/// Rows come back in (n, graph, trial) order whatever the thread count.
[[nodiscard]] std::vector<ScalingRow> run_scaling_experiment(const ExperimentConfig& cfg);

inline constexpr std::string_view kScalingHeader = "n,graph_seed,trial,rounds,giant_size,stop";

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out);
[[nodiscard]] std::vector<ScalingRow> read_scaling_csv(std::istream& in);

enum class GrowthModel { LogLog, PolyLog, Polynomial };

[[nodiscard]] std::string_view to_string(GrowthModel m) noexcept;

struct ModelFit {
    GrowthModel model;
    double a;         // leading coefficient
    double exponent;  // b for polylog, c for polynomial, 1 for loglog
    double rss;       // on log(median)
};

struct FitReport {
    std::vector<double> n;
    std::vector<double> medians;
    std::vector<ModelFit> fits;  // LogLog, PolyLog, Polynomial
    GrowthModel winner = GrowthModel::LogLog;

    [[nodiscard]] const ModelFit& fit(GrowthModel m) const { return fits.at(static_cast<std::size_t>(m)); }
};

/// Median rounds per n (rows flagged no_giant are ignored), then least squares
/// for m = a loglog n, log m = log a + b loglog n and log m = log a + c log n.
/// The winner has the smallest residual sum of squares on log m.
[[nodiscard]] FitReport fit_growth(const std::vector<ScalingRow>& rows);
[[nodiscard]] FitReport fit_growth(const std::vector<double>& n, const std::vector<double>& medians);

/// Regime report for the experiment parameters, with the polynomial exponent
/// attached as fitted_slow_exponent when the label is slow.
[[nodiscard]] RegimeReport regime_with_fit(const ModelParams& params, const FitReport& fit);

[[nodiscard]] double median(std::vector<double> xs);

} // namespace girg

#pragma once

// Orchestration behind the command line: configuration, model construction,
// and the smile / asymptote / compare / termstructure / regvar / legendre
// runs with their CSV and JSON renderings.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smilewing/models.hpp"
#include "smilewing/pricing.hpp"
#include "smilewing/regvar.hpp"
#include "smilewing/wings.hpp"

namespace smilewing {

inline constexpr int kConfigVersion = 1;

/// Flat "section.key" -> value map parsed from INI text. Unknown keys and an
/// unsupported `version` are rejected with ConfigError.
class Config {
public:
    Config() = default;
    static Config parse(std::string_view ini_text);

    /// "section.key=value" or separate key and value.
    void set(std::string_view key, std::string_view value);
    void apply_override(std::string_view assignment);

    bool has(std::string_view key) const;
    std::string get_string(std::string_view key, std::string_view fallback) const;
    double get_double(std::string_view key, double fallback) const;
    std::vector<double> get_list(std::string_view key, const std::vector<double>& fallback) const;

    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

/// Keys accepted in a configuration, with their meaning, for documentation
/// and validation.
const std::vector<std::pair<std::string, std::string>>& config_schema();

ModelSpec build_model(const Config& cfg);

/// Strike magnitudes from grid.k_min / grid.k_max / grid.k_points /
/// grid.spacing. The default k_max is where the Chernoff estimate of the
/// out-of-the-money log price reaches the inversion floor (200 for synthetic
/// models).
std::vector<double> build_grid(const Config& cfg, const ModelSpec& m, Side side);

enum class TailSource { closed_form, legendre, numeric };

std::string_view to_string(TailSource source);
TailSource parse_tail_source(std::string_view text);

enum class Trend { converging, flat, diverging };

std::string_view to_string(Trend trend);

/// Strict monotonicity of |ratio - 1| over the top half of the finite ratios.
Trend classify_trend(const std::vector<double>& ratios);

struct ReportRow {
    double k;
    double log_price;
    double total_vol;
    double slope;
    double asymptote_slope;
    double ratio;
    double epsilon1;
    double quad_err;
    /// psi argument of the asymptote at |k|.
    double argument;
    std::string status;
    std::string reason;
};

struct ComparisonSummary {
    std::optional<ThetaEstimate> theta;
    std::optional<RegVarEstimate> regvar;
    double final_ratio;
    Trend trend;
};

struct ComparisonReport {
    std::string subcommand;
    std::string model;
    Side side;
    WingVariant variant;
    TailSource tail_source;
    std::string tail_label;
    std::vector<ReportRow> rows;
    ComparisonSummary summary;
};

/// Prices and inverts the grid.
ComparisonReport run_smile(const Config& cfg);
/// Asymptotic slope only; no pricing.
ComparisonReport run_asymptote(const Config& cfg);
/// Smile plus asymptote with ratios, theta, tail index and trend. Throws
/// ConditionError when the moment condition of the requested side fails.
ComparisonReport run_compare(const Config& cfg);

struct TermRow {
    double T;
    double log_price;
    double total_variance;
    /// psi(-log c(k,T)/|k|) (price argument of the requested side).
    double psi_price;
};

struct TermStructureReport {
    std::string model;
    double k;
    std::vector<TermRow> rows;
    bool variance_nondecreasing;
    bool psi_nondecreasing;
};

TermStructureReport run_termstructure(const Config& cfg);

struct RegVarRow {
    double k;
    /// -log of the chosen tail at k.
    double g;
    /// -log P[X > k] / -log f(k) where both exist (Bingham's lemma), else NaN.
    double bingham_ratio;
};

struct RegVarReport {
    std::string model;
    Side side;
    TailKind kind;
    TailSource source;
    std::vector<RegVarRow> rows;
    RegVarEstimate estimate;
};

RegVarReport run_regvar(const Config& cfg);

struct LegendreRow {
    double k;
    double z_star;
    double K_at_z;
    double log_tail_bound;
    bool boundary;
    double numeric_log_tail;
    /// numeric / bound (both negative).
    double sharpness;
};

struct LegendreReport {
    std::string model;
    Side side;
    std::vector<LegendreRow> rows;
    bool bound_holds;
};

LegendreReport run_legendre(const Config& cfg);

/// Rendered output of any run: CSV rows and a JSON document (rows included)
/// whose "summary" object is what the CSV sidecar carries.
struct RunOutput {
    std::string csv;
    std::string json;
    std::string summary_json;
};

RunOutput render(const ComparisonReport& r);
RunOutput render(const TermStructureReport& r);
RunOutput render(const RegVarReport& r);
RunOutput render(const LegendreReport& r);

/// Dispatches on the subcommand name (smile, asymptote, compare,
/// termstructure, regvar, legendre).
RunOutput run(std::string_view subcommand, const Config& cfg);

/// The CSV header of the smile-type outputs.
inline constexpr std::string_view kSmileCsvHeader = "k,log_price,total_vol,slope,asymptote_slope,ratio,epsilon1,quad_err";

}  // namespace smilewing

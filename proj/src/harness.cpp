#include "smilewing/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "smilewing/blackscholes.hpp"
#include "smilewing/errors.hpp"
#include "smilewing/legendre.hpp"

namespace smilewing {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return kInf;
    if (t == "-inf") return -kInf;
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last) {
        throw ConfigError("config: " + std::string(key) + " = '" + t + "' is not a number");
    }
    return v;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_schema() {
    static const std::vector<std::pair<std::string, std::string>> schema = {
        {"version", "schema version, must be 1"},
        {"model.name", "bs | nig | fmls | merton | synthetic | nig_twin | symmetric_smile"},
        {"model.drift", "martingale (default) | raw"},
        {"model.T", "maturity (not for synthetic families)"},
        {"model.sigma", "bs, fmls, merton: diffusion scale"},
        {"model.alpha", "nig, nig_twin: tail steepness; fmls: stability index"},
        {"model.beta", "nig, nig_twin: skew"},
        {"model.delta", "nig: scale"},
        {"model.mu", "drift per unit time (location shift for synthetic), used with drift = raw"},
        {"model.lambda", "merton: jump intensity"},
        {"model.alpha_j", "merton: mean jump size"},
        {"model.delta_j", "merton: jump size standard deviation"},
        {"synthetic.right.log_c", "right tail: log f = log_c + a log|x| + b x + c |x|^rho"},
        {"synthetic.right.a", ""},
        {"synthetic.right.b", ""},
        {"synthetic.right.c", ""},
        {"synthetic.right.rho", ""},
        {"synthetic.left.log_c", "left tail, same form"},
        {"synthetic.left.a", ""},
        {"synthetic.left.b", ""},
        {"synthetic.left.c", ""},
        {"synthetic.left.rho", ""},
        {"grid.k_min", "smallest strike magnitude (default 0.5)"},
        {"grid.k_max", "largest strike magnitude (default: reachability limit, 200 for synthetic)"},
        {"grid.k_points", "number of strikes (default 40)"},
        {"grid.spacing", "geometric (default) | linear"},
        {"grid.k", "explicit comma-separated strike magnitudes, overrides the other grid keys"},
        {"run.side", "right (default) | left"},
        {"run.variant", "auto (default) | iv | iv' | iv'' | v"},
        {"run.kind", "auto (default) | density | cdf_tail | price: tail used by variant v, auto and regvar"},
        {"run.tail", "closed_form (default) | legendre | numeric: source of the asymptote tail"},
        {"run.threads", "pricing threads, 0 = hardware concurrency"},
        {"run.rel_tol", "quadrature relative tolerance (default 1e-10)"},
        {"run.log_price_floor", "no vol inversion below this log price (default -700)"},
        {"twin.k_switch", "nig only: strikes beyond this are priced with the synthetic twin"},
        {"term.k", "termstructure strike magnitude (default 1)"},
        {"term.T_grid", "termstructure maturities, comma-separated (default 0.25,0.5,1,2,4)"},
        {"regvar.lambda", "ratio lambda (default (k_max/k_min)^(1/4))"},
        {"regvar.tolerance", "verdict tolerance in units of log lambda (default 0.1)"},
        {"regvar.points", "grid points for the summary index estimate (default 17)"},
    };
    return schema;
}

Config Config::parse(std::string_view ini_text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(ini_text)};
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
    }
    Config cfg;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            cfg.set(name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) {
            if (!leaf.empty()) throw ConfigError("config: nested value under [" + name + "] " + key);
            cfg.set(name + "." + key, leaf.data());
        }
    }
    return cfg;
}

void Config::set(std::string_view key, std::string_view value) {
    const std::string k = trim(key);
    const auto& schema = config_schema();
    const bool known = std::any_of(schema.begin(), schema.end(), [&](const auto& e) { return e.first == k; });
    if (!known) throw ConfigError("config: unknown key '" + k + "'");
    const std::string v = trim(value);
    if (k == "version" && parse_number(k, v) != kConfigVersion) {
        throw ConfigError("config: unsupported version " + v + " (expected " + std::to_string(kConfigVersion) + ")");
    }
    entries_[k] = v;
}

void Config::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("config override '" + std::string(assignment) + "' is not key=value");
    }
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

bool Config::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? std::string(fallback) : it->second;
}

double Config::get_double(std::string_view key, double fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : parse_number(key, it->second);
}

std::vector<double> Config::get_list(std::string_view key, const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::string_view rest = it->second;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_number(key, rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

namespace {

TailShape read_shape(const Config& cfg, const std::string& prefix, const TailShape& def) {
    TailShape s = def;
    s.log_c = cfg.get_double(prefix + "log_c", def.log_c);
    s.a = cfg.get_double(prefix + "a", def.a);
    s.b = cfg.get_double(prefix + "b", def.b);
    s.c = cfg.get_double(prefix + "c", def.c);
    s.rho = cfg.get_double(prefix + "rho", def.rho);
    return s;
}

void reject_keys(const Config& cfg, const std::string& model, std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
        if (cfg.has(key)) throw ConfigError("config: " + std::string(key) + " does not apply to model " + model);
    }
}

}  // namespace

ModelSpec build_model(const Config& cfg) {
    const std::string name = cfg.get_string("model.name", "bs");
    const std::string drift_text = cfg.get_string("model.drift", "martingale");
    DriftMode drift;
    if (drift_text == "martingale") {
        drift = DriftMode::martingale;
    } else if (drift_text == "raw") {
        drift = DriftMode::raw;
    } else {
        throw ConfigError("config: model.drift must be martingale or raw, got '" + drift_text + "'");
    }
    const double T = cfg.get_double("model.T", 1.0);
    const double mu = cfg.get_double("model.mu", 0.0);
    if (name == "bs") {
        reject_keys(cfg, name, {"model.alpha", "model.beta", "model.delta", "model.lambda", "model.alpha_j", "model.delta_j"});
        return ModelSpec(BlackScholesParams{cfg.get_double("model.sigma", 0.2), T, mu}, drift);
    }
    if (name == "nig") {
        reject_keys(cfg, name, {"model.sigma", "model.lambda", "model.alpha_j", "model.delta_j"});
        return ModelSpec(NigParams{cfg.get_double("model.alpha", 2.0), cfg.get_double("model.beta", -0.5),
                                   cfg.get_double("model.delta", 1.0), mu, T},
                         drift);
    }
    if (name == "fmls") {
        reject_keys(cfg, name, {"model.beta", "model.delta", "model.lambda", "model.alpha_j", "model.delta_j"});
        return ModelSpec(FmlsParams{cfg.get_double("model.alpha", 1.5), cfg.get_double("model.sigma", 0.2), mu, T},
                         drift);
    }
    if (name == "merton") {
        reject_keys(cfg, name, {"model.alpha", "model.beta", "model.delta"});
        return ModelSpec(MertonParams{mu, cfg.get_double("model.sigma", 0.2), cfg.get_double("model.lambda", 0.3),
                                      cfg.get_double("model.alpha_j", 0.2), cfg.get_double("model.delta_j", 0.15), T},
                         drift);
    }
    if (name == "synthetic" || name == "nig_twin" || name == "symmetric_smile") {
        reject_keys(cfg, name, {"model.T", "model.sigma", "model.delta", "model.lambda", "model.alpha_j", "model.delta_j"});
        const SyntheticTailParams twin = nig_twin(2.0, -0.5);
        SyntheticTailParams p;
        if (name == "nig_twin") {
            p = nig_twin(cfg.get_double("model.alpha", 2.0), cfg.get_double("model.beta", -0.5),
                         cfg.get_double("synthetic.right.log_c", 0.0), cfg.get_double("synthetic.left.log_c", 0.0));
        } else {
            reject_keys(cfg, name, {"model.alpha", "model.beta"});
            if (name == "synthetic") {
                p.right = read_shape(cfg, "synthetic.right.", twin.right);
                p.left = read_shape(cfg, "synthetic.left.", twin.left);
            } else {
                for (const auto& [key, value] : cfg.entries()) {
                    if (key.rfind("synthetic.left.", 0) == 0) {
                        throw ConfigError("config: " + key + " is implied by the right tail for symmetric_smile");
                    }
                }
                p = symmetric_smile(read_shape(cfg, "synthetic.right.", twin.right));
            }
        }
        p.mu = mu;
        return ModelSpec(p, drift);
    }
    throw ConfigError("config: unknown model '" + name + "'");
}

std::vector<double> build_grid(const Config& cfg, const ModelSpec& m, Side side) {
    if (cfg.has("grid.k")) {
        for (const char* key : {"grid.k_min", "grid.k_max", "grid.k_points", "grid.spacing"}) {
            if (cfg.has(key)) throw ConfigError(std::string("config: grid.k and ") + key + " are exclusive");
        }
        std::vector<double> ks = cfg.get_list("grid.k", {});
        for (double k : ks) {
            if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("config: grid.k entries must be finite and >= 0");
        }
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        return ks;
    }
    const double k_min = cfg.get_double("grid.k_min", 0.5);
    const double points_d = cfg.get_double("grid.k_points", 40.0);
    const std::string spacing = cfg.get_string("grid.spacing", "geometric");
    if (!(points_d >= 1.0) || points_d != std::floor(points_d) || points_d > 100000.0) {
        throw ConfigError("config: grid.k_points must be a positive integer");
    }
    const auto points = static_cast<std::size_t>(points_d);
    double k_max = 0.0;
    if (cfg.has("grid.k_max")) {
        k_max = cfg.get_double("grid.k_max", 0.0);
    } else if (m.name() == "synthetic") {
        k_max = 200.0;
    } else {
        // Chernoff estimate of the log OTM price: log c(k) ~ bound + k on the
        // right, log p(-k) ~ bound - k on the left.
        // the estimate is an upper bound; aim a little above the floor
        const double floor = cfg.get_double("run.log_price_floor", -700.0) + 30.0;
        const double sgn = side == Side::right ? 1.0 : -1.0;
        auto estimate = [&](double k) { return legendre_bound(m, k, side).log_tail_bound + sgn * k; };
        k_max = 10.0;
        try {
            double lo = std::max(k_min, 1e-3);
            double hi = lo;
            while (estimate(hi) > floor && hi < 1e4) hi *= 2.0;
            if (estimate(hi) <= floor) {
                for (int i = 0; i < 60; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (estimate(mid) > floor ? lo : hi) = mid;
                }
                k_max = lo;
            } else {
                k_max = hi;
            }
        } catch (const ConditionError&) {
            // no exponential moments on this side; callers refuse anyway
        }
    }
    if (!(k_min >= 0.0) || !(k_max >= k_min) || !std::isfinite(k_max)) {
        throw ConfigError("config: need 0 <= grid.k_min <= grid.k_max < inf");
    }
    std::vector<double> ks(points);
    if (points == 1) return {k_max};
    if (spacing == "geometric") {
        if (!(k_min > 0.0)) throw ConfigError("config: geometric grid needs grid.k_min > 0");
        const double step = std::log(k_max / k_min) / static_cast<double>(points - 1);
        for (std::size_t i = 0; i < points; ++i) ks[i] = k_min * std::exp(step * static_cast<double>(i));
    } else if (spacing == "linear") {
        const double step = (k_max - k_min) / static_cast<double>(points - 1);
        for (std::size_t i = 0; i < points; ++i) ks[i] = k_min + step * static_cast<double>(i);
    } else {
        throw ConfigError("config: grid.spacing must be geometric or linear");
    }
    ks.back() = k_max;
    return ks;
}

std::string_view to_string(TailSource source) {
    switch (source) {
        case TailSource::closed_form: return "closed_form";
        case TailSource::legendre: return "legendre";
        case TailSource::numeric: return "numeric";
    }
    return "?";
}

TailSource parse_tail_source(std::string_view text) {
    if (text == "closed_form") return TailSource::closed_form;
    if (text == "legendre") return TailSource::legendre;
    if (text == "numeric") return TailSource::numeric;
    throw ConfigError("config: run.tail must be closed_form, legendre or numeric, got '" + std::string(text) + "'");
}

std::string_view to_string(Trend trend) {
    switch (trend) {
        case Trend::converging: return "converging";
        case Trend::flat: return "flat";
        case Trend::diverging: return "diverging";
    }
    return "?";
}

Trend classify_trend(const std::vector<double>& ratios) {
    std::vector<double> d;
    for (double r : ratios) {
        if (std::isfinite(r)) d.push_back(std::abs(r - 1.0));
    }
    if (d.size() < 2) return Trend::flat;
    const std::size_t start = std::min(d.size() / 2, d.size() - 2);
    bool down = true, up = true;
    for (std::size_t i = start + 1; i < d.size(); ++i) {
        down = down && d[i] < d[i - 1];
        up = up && d[i] > d[i - 1];
    }
    if (down) return Trend::converging;
    if (up) return Trend::diverging;
    return Trend::flat;
}

namespace {

struct RunContext {
    ModelSpec model;
    std::optional<ModelSpec> twin;
    double k_switch = kInf;
    Side side;
    PricingOptions pricing;

    const ModelSpec& model_at(double k_mag) const { return twin && k_mag > k_switch ? *twin : model; }
};

PricingOptions read_pricing(const Config& cfg) {
    PricingOptions o;
    o.rel_tol = cfg.get_double("run.rel_tol", o.rel_tol);
    o.log_price_floor = cfg.get_double("run.log_price_floor", o.log_price_floor);
    const double threads = cfg.get_double("run.threads", 0.0);
    if (!(threads >= 0.0) || threads != std::floor(threads) || threads > 1024.0) {
        throw ConfigError("config: run.threads must be a non-negative integer");
    }
    o.threads = static_cast<unsigned>(threads);
    if (!(o.rel_tol > 0.0 && o.rel_tol < 1.0)) throw ConfigError("config: run.rel_tol must lie in (0, 1)");
    return o;
}

RunContext make_context(const Config& cfg) {
    RunContext ctx{build_model(cfg), std::nullopt, kInf, parse_side(cfg.get_string("run.side", "right")),
                   read_pricing(cfg)};
    if (cfg.has("twin.k_switch")) {
        const auto* nig = std::get_if<NigParams>(&ctx.model.params());
        if (nig == nullptr) throw ConfigError("config: twin.k_switch applies to model nig only");
        ctx.k_switch = cfg.get_double("twin.k_switch", kInf);
        if (!(ctx.k_switch > 0.0)) throw ConfigError("config: twin.k_switch must be > 0");
        ctx.twin = ModelSpec(nig_twin(nig->alpha, nig->beta), ctx.model.drift_mode());
    }
    return ctx;
}

TailKind parse_kind(std::string_view text) {
    if (text == "density") return TailKind::density;
    if (text == "cdf_tail") return TailKind::cdf_tail;
    if (text == "price") return TailKind::price;
    throw ConfigError("config: run.kind must be auto, density, cdf_tail or price, got '" + std::string(text) + "'");
}

TailKind kind_of(WingVariant v) {
    switch (v) {
        case WingVariant::iv: return TailKind::price;
        case WingVariant::iv_prime: return TailKind::cdf_tail;
        default: return TailKind::density;
    }
}

TailKind default_kind(const RunContext& ctx, TailSource source) {
    switch (source) {
        case TailSource::closed_form: return ctx.model.known_tail_asymptote(ctx.side).kind;
        case TailSource::legendre: return TailKind::cdf_tail;
        case TailSource::numeric: return ctx.model.has_density() ? TailKind::density : TailKind::cdf_tail;
    }
    return TailKind::cdf_tail;
}

TailFunction make_tail(const RunContext& ctx, TailKind kind, TailSource source) {
    const Side side = ctx.side;
    switch (source) {
        case TailSource::closed_form: {
            TailFunction t = ctx.model.known_tail_asymptote(side);
            if (t.kind != kind) {
                throw ConfigError("config: the closed-form " + std::string(to_string(side)) + " tail of " +
                                  std::string(ctx.model.name()) + " is a " + std::string(to_string(t.kind)) +
                                  " tail, not " + std::string(to_string(kind)) + "; use run.tail = numeric or legendre");
            }
            return t;
        }
        case TailSource::legendre:
            if (kind != TailKind::cdf_tail) throw ConfigError("config: the legendre tail is a cdf_tail tail");
            return legendre_tail(ctx.model, side);
        case TailSource::numeric:
            break;
    }
    const double sgn = side == Side::right ? 1.0 : -1.0;
    TailFunction t{side, kind, {}, 0.0, ""};
    // ctx outlives every tail built from it
    const RunContext* c = &ctx;
    switch (kind) {
        case TailKind::density:
            if (!ctx.model.has_density() && !ctx.twin) {
                throw ConfigError("config: model " + std::string(ctx.model.name()) +
                                  " has no closed-form density; use another run.kind");
            }
            t.eval = [c, sgn](double k) {
                const ModelSpec& m = c->model_at(k);
                if (!m.has_density()) return kNaN;
                return m.exact_log_density(sgn * k);
            };
            t.label = "numeric log density";
            break;
        case TailKind::cdf_tail: {
            const PricingOptions opts = ctx.pricing;
            t.eval = [c, side, opts](double k) { return tail_cdf_estimate(c->model_at(k), k, side, opts).log_value; };
            t.label = "numeric log tail probability";
            break;
        }
        case TailKind::price: {
            const PricingOptions opts = ctx.pricing;
            t.eval = [c, sgn, opts](double k) { return otm_price(c->model_at(k), sgn * k, opts).price.log_price; };
            t.label = "numeric log otm price";
            break;
        }
    }
    // the synthetic bridge region is not a tail
    if (ctx.model.name() == "synthetic" || ctx.twin) t.k_min = 1.0;
    return t;
}

struct WingSetup {
    WingAsymptote wing;
    TailSource source;
};

WingSetup make_wing(const RunContext& ctx, const Config& cfg) {
    require_condition(ctx.model.critical_moments(), ctx.side);
    const TailSource source = parse_tail_source(cfg.get_string("run.tail", "closed_form"));
    const std::string vtext = cfg.get_string("run.variant", "auto");
    const std::string ktext = cfg.get_string("run.kind", "auto");
    std::optional<TailKind> kind;
    if (ktext != "auto") kind = parse_kind(ktext);
    std::optional<WingVariant> variant;
    if (vtext != "auto") variant = parse_variant(vtext);
    if (variant && *variant != WingVariant::v) {
        const TailKind implied = kind_of(*variant);
        if (kind && *kind != implied) {
            throw ConfigError("config: variant " + vtext + " needs a " + std::string(to_string(implied)) +
                              " tail, run.kind says " + ktext);
        }
        kind = implied;
    }
    if (!kind) kind = default_kind(ctx, source);
    TailFunction tail = make_tail(ctx, *kind, source);
    if (variant == WingVariant::v) return {sublinear_wing(std::move(tail)), source};
    const auto cond = ctx.model.critical_moments();
    return {ctx.side == Side::right ? right_wing(std::move(tail), cond) : left_wing(std::move(tail), cond), source};
}

ReportRow blank_row(double k) {
    return {k, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, "ok", ""};
}

std::vector<ReportRow> price_rows(const RunContext& ctx, const std::vector<double>& grid) {
    std::vector<double> near, far;
    for (double k : grid) (ctx.twin && k > ctx.k_switch ? far : near).push_back(k);
    std::vector<SmilePoint> points = smile_curve(ctx.model, near, ctx.side, ctx.pricing).points;
    if (!far.empty()) {
        auto more = smile_curve(*ctx.twin, far, ctx.side, ctx.pricing).points;
        points.insert(points.end(), more.begin(), more.end());
    }
    std::sort(points.begin(), points.end(), [](const SmilePoint& a, const SmilePoint& b) { return a.k < b.k; });
    std::vector<ReportRow> rows;
    rows.reserve(points.size());
    for (const auto& p : points) {
        ReportRow r = blank_row(p.k);
        r.log_price = p.log_price;
        r.total_vol = p.total_vol;
        r.slope = p.slope;
        r.epsilon1 = p.epsilon1;
        r.quad_err = p.quad_err;
        r.status = std::string(to_string(p.status));
        r.reason = p.reason;
        if (ctx.twin && std::abs(p.k) > ctx.k_switch && r.reason.empty()) r.reason = "priced with the synthetic twin";
        rows.push_back(std::move(r));
    }
    return rows;
}

void fill_asymptote(std::vector<ReportRow>& rows, const WingAsymptote& wing) {
    for (auto& r : rows) {
        const double k = std::abs(r.k);
        if (!(k > 0.0) || k < wing.tail().k_min) {
            if (r.reason.empty()) {
                std::ostringstream os;
                os << "asymptote undefined below k = " << wing.tail().k_min;
                r.reason = os.str();
            }
            continue;
        }
        try {
            const WingPoint pt = wing.at(k);
            r.argument = pt.argument;
            r.asymptote_slope = pt.slope;
            if (pt.clamped && r.reason.empty()) r.reason = "asymptote argument outside the asymptotic regime, clamped";
        } catch (const Error& e) {
            if (r.reason.empty()) r.reason = std::string("asymptote: ") + e.what();
        }
        if (std::isfinite(r.slope) && std::isfinite(r.asymptote_slope) && r.asymptote_slope != 0.0) {
            r.ratio = r.slope / r.asymptote_slope;
        }
    }
}

/// Rows by increasing |k|.
std::vector<const ReportRow*> by_magnitude(const std::vector<ReportRow>& rows) {
    std::vector<const ReportRow*> out;
    for (const auto& r : rows) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const ReportRow* a, const ReportRow* b) {
        return std::abs(a->k) < std::abs(b->k);
    });
    return out;
}

void summarize_wing(ComparisonReport& rep, WingAsymptote& wing, const std::vector<double>& grid, const Config& cfg) {
    std::vector<double> usable;
    for (double k : grid) {
        if (k > 0.0 && k >= wing.tail().k_min) usable.push_back(k);
    }
    if (usable.size() >= 2) {
        try {
            rep.summary.theta = wing.estimate_theta(usable[usable.size() - 2], usable.back());
        } catch (const Error&) {
        }
    }
    if (usable.size() >= 2 && usable.back() > usable.front()) {
        const double x0 = usable.front(), x1 = usable.back();
        const double points = cfg.get_double("regvar.points", 17.0);
        if (!(points >= 16.0) || points != std::floor(points)) {
            throw ConfigError("config: regvar.points must be an integer >= 16");
        }
        RegVarOptions opts;
        opts.lambda = cfg.get_double("regvar.lambda", std::pow(x1 / x0, 0.25));
        opts.tolerance = cfg.get_double("regvar.tolerance", opts.tolerance);
        const TailFunction& tail = wing.tail();
        try {
            rep.summary.regvar = estimate_index([&](double k) { return -tail(k); }, x0, x1,
                                                static_cast<std::size_t>(points), opts);
        } catch (const NumericalError&) {
        } catch (const InvalidArgument&) {
        }
    }
}

ComparisonReport base_report(const RunContext& ctx, std::string subcommand) {
    ComparisonReport rep;
    rep.subcommand = std::move(subcommand);
    rep.model = ctx.model.describe();
    if (ctx.twin) {
        std::ostringstream os;
        os << " + twin " << ctx.twin->describe() << " beyond k = " << ctx.k_switch;
        rep.model += os.str();
    }
    rep.side = ctx.side;
    rep.variant = WingVariant::iv;
    rep.tail_source = TailSource::numeric;
    rep.summary.final_ratio = kNaN;
    rep.summary.trend = Trend::flat;
    return rep;
}

}  // namespace

ComparisonReport run_smile(const Config& cfg) {
    const RunContext ctx = make_context(cfg);
    require_condition(ctx.model.critical_moments(), ctx.side);
    ComparisonReport rep = base_report(ctx, "smile");
    rep.tail_label = "none";
    rep.rows = price_rows(ctx, build_grid(cfg, ctx.model, ctx.side));
    return rep;
}

ComparisonReport run_asymptote(const Config& cfg) {
    const RunContext ctx = make_context(cfg);
    WingSetup ws = make_wing(ctx, cfg);
    ComparisonReport rep = base_report(ctx, "asymptote");
    rep.variant = ws.wing.variant();
    rep.tail_source = ws.source;
    rep.tail_label = ws.wing.tail().label;
    const auto grid = build_grid(cfg, ctx.model, ctx.side);
    const double sgn = ctx.side == Side::right ? 1.0 : -1.0;
    for (double k : grid) rep.rows.push_back(blank_row(sgn * k));
    std::sort(rep.rows.begin(), rep.rows.end(), [](const ReportRow& a, const ReportRow& b) { return a.k < b.k; });
    fill_asymptote(rep.rows, ws.wing);
    summarize_wing(rep, ws.wing, grid, cfg);
    return rep;
}

ComparisonReport run_compare(const Config& cfg) {
    const RunContext ctx = make_context(cfg);
    WingSetup ws = make_wing(ctx, cfg);
    ComparisonReport rep = base_report(ctx, "compare");
    rep.variant = ws.wing.variant();
    rep.tail_source = ws.source;
    rep.tail_label = ws.wing.tail().label;
    const auto grid = build_grid(cfg, ctx.model, ctx.side);
    rep.rows = price_rows(ctx, grid);
    fill_asymptote(rep.rows, ws.wing);
    summarize_wing(rep, ws.wing, grid, cfg);
    std::vector<double> ratios;
    for (const ReportRow* r : by_magnitude(rep.rows)) {
        if (std::isfinite(r->ratio)) {
            ratios.push_back(r->ratio);
            rep.summary.final_ratio = r->ratio;
        }
    }
    rep.summary.trend = classify_trend(ratios);
    return rep;
}

TermStructureReport run_termstructure(const Config& cfg) {
    const RunContext ctx = make_context(cfg);
    if (ctx.twin) throw ConfigError("config: twin.k_switch is not used by termstructure");
    require_condition(ctx.model.critical_moments(), ctx.side);
    TermStructureReport rep;
    rep.model = ctx.model.describe();
    rep.k = cfg.get_double("term.k", 1.0);
    if (!(rep.k > 0.0) || !std::isfinite(rep.k)) throw ConfigError("config: term.k must be > 0");
    const auto Ts = cfg.get_list("term.T_grid", {0.25, 0.5, 1.0, 2.0, 4.0});
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        if (!(Ts[i] > 0.0) || !std::isfinite(Ts[i]) || (i > 0 && !(Ts[i] > Ts[i - 1]))) {
            throw ConfigError("config: term.T_grid must be positive and strictly increasing");
        }
    }
    const double sgn = ctx.side == Side::right ? 1.0 : -1.0;
    const double shift = psi_argument_shift(ctx.side, TailKind::price);
    rep.variance_nondecreasing = true;
    rep.psi_nondecreasing = true;
    for (double T : Ts) {
        const ModelSpec m = ctx.model.with_horizon(T);
        const PriceEstimate pe = otm_price(m, sgn * rep.k, ctx.pricing);
        TermRow row{T, pe.price.log_price, kNaN, kNaN};
        if (pe.price.log_price >= ctx.pricing.log_price_floor) {
            const double v = bs::implied_total_vol(pe.price, sgn * rep.k);
            row.total_variance = v * v;
        }
        const double arg = -pe.price.log_price / rep.k + shift;
        row.psi_price = arg >= 0.0 ? psi(arg) : kNaN;
        if (!rep.rows.empty()) {
            const TermRow& prev = rep.rows.back();
            if (!(row.total_variance >= prev.total_variance)) rep.variance_nondecreasing = false;
            if (!(row.psi_price >= prev.psi_price)) rep.psi_nondecreasing = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

RegVarReport run_regvar(const Config& cfg) {
    const RunContext ctx = make_context(cfg);
    require_condition(ctx.model.critical_moments(), ctx.side);
    const TailSource source = parse_tail_source(cfg.get_string("run.tail", "closed_form"));
    const std::string ktext = cfg.get_string("run.kind", "auto");
    const TailKind kind = ktext == "auto" ? default_kind(ctx, source) : parse_kind(ktext);
    const TailFunction tail = make_tail(ctx, kind, source);

    auto grid = build_grid(cfg, ctx.model, ctx.side);
    std::erase_if(grid, [&](double k) { return !(k > 0.0) || k < tail.k_min; });
    if (grid.size() < 16) throw ConfigError("config: regvar needs at least 16 strikes above the tail's k_min");
    RegVarOptions opts;
    opts.lambda = cfg.get_double("regvar.lambda", std::pow(grid.back() / grid.front(), 0.25));
    opts.tolerance = cfg.get_double("regvar.tolerance", opts.tolerance);
    grid = geometric_grid(grid.front(), grid.back(), grid.size(), opts.lambda);

    RegVarReport rep{ctx.model.describe(), ctx.side, kind, source, {}, {}};
    std::vector<double> g;
    const bool bingham = ctx.model.has_density();
    const double sgn = ctx.side == Side::right ? 1.0 : -1.0;
    for (double k : grid) {
        RegVarRow row{k, -tail(k), kNaN};
        if (bingham) {
            try {
                const double lf = ctx.model.exact_log_density(sgn * k);
                const double lF = tail_cdf_estimate(ctx.model, k, ctx.side, ctx.pricing).log_value;
                row.bingham_ratio = lF / lf;
            } catch (const NumericalError&) {
            }
        }
        g.push_back(row.g);
        rep.rows.push_back(row);
    }
    rep.estimate = estimate_index(grid, g, opts);
    return rep;
}

LegendreReport run_legendre(const Config& cfg) {
    const RunContext ctx = make_context(cfg);
    if (ctx.twin) throw ConfigError("config: twin.k_switch is not used by legendre");
    LegendreReport rep{ctx.model.describe(), ctx.side, {}, true};
    for (double k : build_grid(cfg, ctx.model, ctx.side)) {
        const LegendreSolution s = legendre_bound(ctx.model, k, ctx.side);
        LegendreRow row{k, s.z_star, s.K_at_z, s.log_tail_bound, s.boundary, kNaN, kNaN};
        try {
            row.numeric_log_tail = tail_cdf_estimate(ctx.model, k, ctx.side, ctx.pricing).log_value;
            if (s.log_tail_bound < 0.0) row.sharpness = row.numeric_log_tail / s.log_tail_bound;
            if (!(s.log_tail_bound >= row.numeric_log_tail)) rep.bound_holds = false;
        } catch (const NumericalError&) {
        }
        rep.rows.push_back(row);
    }
    return rep;
}

namespace {

std::string fmt(double x) {
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

std::string csv_table(std::string_view header, const std::vector<std::vector<double>>& rows) {
    std::string out(header);
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt(row[i]);
        }
        out += '\n';
    }
    return out;
}

RunOutput finish(json doc, json rows, std::string csv) {
    RunOutput out;
    out.csv = std::move(csv);
    out.summary_json = doc.dump(2) + "\n";
    doc["rows"] = std::move(rows);
    out.json = doc.dump(2) + "\n";
    return out;
}

json header(std::string_view subcommand, const std::string& model) {
    json doc;
    doc["schema_version"] = kConfigVersion;
    doc["subcommand"] = subcommand;
    doc["model"] = model;
    return doc;
}

}  // namespace

RunOutput render(const ComparisonReport& r) {
    json doc = header(r.subcommand, r.model);
    doc["side"] = to_string(r.side);
    if (r.subcommand != "smile") {
        doc["variant"] = to_string(r.variant);
        doc["tail_source"] = to_string(r.tail_source);
        doc["tail"] = r.tail_label;
    }
    json rows = json::array();
    json refusals = json::array();
    std::vector<std::vector<double>> table;
    std::size_t ok = 0;
    for (const auto& row : r.rows) {
        table.push_back({row.k, row.log_price, row.total_vol, row.slope, row.asymptote_slope, row.ratio,
                         row.epsilon1, row.quad_err});
        json j;
        j["k"] = num(row.k);
        j["log_price"] = num(row.log_price);
        j["total_vol"] = num(row.total_vol);
        j["slope"] = num(row.slope);
        j["asymptote_slope"] = num(row.asymptote_slope);
        j["ratio"] = num(row.ratio);
        j["epsilon1"] = num(row.epsilon1);
        j["quad_err"] = num(row.quad_err);
        j["argument"] = num(row.argument);
        j["status"] = row.status;
        j["reason"] = row.reason;
        rows.push_back(std::move(j));
        if (row.status == "ok") {
            ++ok;
        } else {
            refusals.push_back({{"k", num(row.k)}, {"status", row.status}, {"reason", row.reason}});
        }
    }
    json summary;
    summary["points"] = r.rows.size();
    summary["ok"] = ok;
    if (r.subcommand != "smile") {
        if (r.summary.theta) {
            summary["theta"] = {{"raw", num(r.summary.theta->raw)}, {"extrapolated", num(r.summary.theta->extrapolated)}};
        } else {
            summary["theta"] = nullptr;
        }
        if (r.summary.regvar) {
            const auto& e = *r.summary.regvar;
            summary["regvar"] = {{"alpha_hat", num(e.alpha_hat)}, {"lambda", num(e.lambda)},
                                 {"residual", num(e.residual)}, {"verdict", to_string(e.verdict)},
                                 {"pairs", e.pairs}, {"note", e.note}};
        } else {
            summary["regvar"] = nullptr;
        }
    }
    if (r.subcommand == "compare") {
        summary["final_ratio"] = num(r.summary.final_ratio);
        summary["trend"] = to_string(r.summary.trend);
    }
    doc["summary"] = std::move(summary);
    doc["refusals"] = std::move(refusals);
    return finish(std::move(doc), std::move(rows), csv_table(kSmileCsvHeader, table));
}

RunOutput render(const TermStructureReport& r) {
    json doc = header("termstructure", r.model);
    doc["k"] = num(r.k);
    json rows = json::array();
    std::vector<std::vector<double>> table;
    for (const auto& row : r.rows) {
        table.push_back({row.T, row.log_price, row.total_variance, row.psi_price});
        rows.push_back({{"T", num(row.T)}, {"log_price", num(row.log_price)},
                        {"total_variance", num(row.total_variance)}, {"psi_price", num(row.psi_price)}});
    }
    doc["summary"] = {{"total_variance_nondecreasing", r.variance_nondecreasing},
                      {"psi_price_nondecreasing", r.psi_nondecreasing}};
    return finish(std::move(doc), std::move(rows), csv_table("T,log_price,total_variance,psi_price", table));
}

RunOutput render(const RegVarReport& r) {
    json doc = header("regvar", r.model);
    doc["side"] = to_string(r.side);
    doc["kind"] = to_string(r.kind);
    doc["tail_source"] = to_string(r.source);
    json rows = json::array();
    std::vector<std::vector<double>> table;
    for (const auto& row : r.rows) {
        table.push_back({row.k, row.g, row.bingham_ratio});
        rows.push_back({{"k", num(row.k)}, {"g", num(row.g)}, {"bingham_ratio", num(row.bingham_ratio)}});
    }
    const auto& e = r.estimate;
    doc["summary"] = {{"alpha_hat", num(e.alpha_hat)}, {"lambda", num(e.lambda)}, {"residual", num(e.residual)},
                      {"verdict", to_string(e.verdict)}, {"pairs", e.pairs}, {"note", e.note}};
    return finish(std::move(doc), std::move(rows), csv_table("k,g,bingham_ratio", table));
}

RunOutput render(const LegendreReport& r) {
    json doc = header("legendre", r.model);
    doc["side"] = to_string(r.side);
    json rows = json::array();
    std::vector<std::vector<double>> table;
    for (const auto& row : r.rows) {
        table.push_back({row.k, row.z_star, row.K_at_z, row.log_tail_bound, row.boundary ? 1.0 : 0.0,
                         row.numeric_log_tail, row.sharpness});
        rows.push_back({{"k", num(row.k)}, {"z_star", num(row.z_star)}, {"K_at_z", num(row.K_at_z)},
                        {"log_tail_bound", num(row.log_tail_bound)}, {"boundary", row.boundary},
                        {"numeric_log_tail", num(row.numeric_log_tail)}, {"sharpness", num(row.sharpness)}});
    }
    doc["summary"] = {{"bound_holds", r.bound_holds}};
    return finish(std::move(doc), std::move(rows),
                  csv_table("k,z_star,K_at_z,log_tail_bound,boundary,numeric_log_tail,sharpness", table));
}

RunOutput run(std::string_view subcommand, const Config& cfg) {
    if (subcommand == "smile") return render(run_smile(cfg));
    if (subcommand == "asymptote") return render(run_asymptote(cfg));
    if (subcommand == "compare") return render(run_compare(cfg));
    if (subcommand == "termstructure") return render(run_termstructure(cfg));
    if (subcommand == "regvar") return render(run_regvar(cfg));
    if (subcommand == "legendre") return render(run_legendre(cfg));
    throw InvalidArgument("unknown subcommand '" + std::string(subcommand) + "'");
}

}  // namespace smilewing

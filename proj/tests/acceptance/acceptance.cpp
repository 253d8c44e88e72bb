// End-to-end checks. Each check prints one PASS/FAIL line; the process exit
// status is non-zero if any selected check fails.
//
//   acceptance [--check N]... [--cli PATH]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "smilewing/blackscholes.hpp"
#include "smilewing/errors.hpp"
#include "smilewing/harness.hpp"
#include "smilewing/legendre.hpp"
#include "smilewing/models.hpp"
#include "smilewing/pricing.hpp"
#include "smilewing/regvar.hpp"
#include "smilewing/wings.hpp"

using namespace smilewing;

namespace {

std::string cli_path;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // records a sub-check; all must hold
    void expect(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (ok ? "" : "[x] ") << what << "; ";
    }
};

std::string g6(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return out;
}

// nig_twin(2, -0.5): both tails log f = -1.5 log|x| - 0.5 x - 2|x|, so the
// right tail decays like exp(-2.5 k)
ModelSpec nig_shaped() { return ModelSpec(nig_twin(2.0, -0.5)); }

void psi_algebra(Outcome& o) {
    o.expect(psi(0.0) == 2.0, "psi(0) = " + g6(psi(0.0)));
    const double e1 = std::abs(psi(1.0) - (6.0 - 4.0 * std::sqrt(2.0)));
    o.expect(e1 <= 1e-14, "|psi(1) - (6 - 4 sqrt 2)| = " + g6(e1));
    for (double x : {10.0, 1e2, 1e4, 1e6}) {
        const double dev = std::abs(psi(x) * 2.0 * x - 1.0);
        const double bound = 1.1 / (4.0 * x);
        o.expect(dev <= bound, "x=" + g6(x) + ": |2x psi - 1| = " + g6(dev) + " vs " + g6(bound));
    }
    double worst = 0.0;
    for (int i = 1; i < 1980; ++i) {
        const double u = 0.01 + i * 0.001;
        worst = std::max(worst, std::abs(psi(psi_inverse(u)) - u));
    }
    o.expect(worst <= 1e-12, "max |psi(psi_inv(u)) - u| on (0.01, 1.99) = " + g6(worst));
}

void implied_vol_round_trip(Outcome& o) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> kd(-5.0, 5.0), vd(0.01, 3.0);
    double worst = 0.0;
    double wk = 0.0, wv = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double k = kd(rng), v = vd(rng);
        const double got = bs::implied_total_vol(bs::call(k, v), k);
        if (std::abs(got - v) > worst) {
            worst = std::abs(got - v);
            wk = k;
            wv = v;
        }
    }
    o.expect(worst <= 1e-10, "max |v_recovered - v| over 1e4 draws = " + g6(worst) + " at (k, v) = (" + g6(wk) +
                                 ", " + g6(wv) + ")");
}

void black_scholes_flat(Outcome& o) {
    const ModelSpec m(BlackScholesParams{0.2, 1.0, 0.0});
    double worst = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double k = -1.0 + 0.1 * i;
        const PriceEstimate pe = otm_price(m, k);
        worst = std::max(worst, std::abs(bs::implied_total_vol(pe.price, k) - 0.2));
    }
    o.expect(worst <= 1e-8, "max |V - 0.2| on k in [-1, 5] = " + g6(worst));
    const WingAsymptote w = sublinear_wing(m.known_tail_asymptote(Side::right));
    const double limit = w.slope(5.0) * 5.0;
    o.expect(std::abs(limit / 0.04 - 1.0) <= 0.03, "variant v: k * slope at k=5 = " + g6(limit) + " vs 0.04");
}

void bingham_numerics(Outcome& o) {
    struct G {
        const char* name;
        std::function<double(double)> g;
        double x1000;
    };
    const std::vector<G> gs = {
        {"x^2", [](double x) { return x * x; }, std::sqrt(1000.0)},
        {"3x^1.2", [](double x) { return 3.0 * std::pow(x, 1.2); }, std::pow(1000.0 / 3.0, 1.0 / 1.2)},
        {"x^2 log x", [](double x) { return x * x * std::log(x); }, 0.0},
    };
    for (const auto& g : gs) {
        double x0 = g.x1000;
        if (x0 == 0.0) {
            double lo = 2.0, hi = 100.0;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (g.g(mid) < 1000.0 ? lo : hi) = mid;
            }
            x0 = hi;
        }
        double lo = 10.0, hi = 0.0;
        for (double x : geomspace(x0, 1e4 * x0, 25)) {
            const double r = bingham_transform(g.g, x) / g.g(x);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        o.expect(lo >= 1.0 && hi <= 1.02, std::string(g.name) + ": ratio in [" + g6(lo) + ", " + g6(hi) + "]");
    }
}

void synthetic_chain(Outcome& o) {
    const ModelSpec m = nig_shaped();
    auto neg_log_f = [&](double k) { return -m.exact_log_density(k); };
    auto neg_log_F = [&](double k) { return -tail_cdf(m, k, Side::right); };
    auto neg_log_c = [&](double k) { return -call_from_tail(m, k).price.log_price; };
    const std::vector<std::pair<const char*, std::function<double(double)>>> tails = {
        {"-log f", neg_log_f}, {"-log F", neg_log_F}, {"-log c", neg_log_c}};
    for (const auto& [name, g] : tails) {
        const RegVarEstimate e = estimate_index(g, 10.0, 200.0);
        o.expect(std::abs(e.alpha_hat - 1.0) <= 0.05, std::string(name) + " index " + g6(e.alpha_hat));
    }
    const double k = 200.0;
    const double lc = -neg_log_c(k);
    const double lF = -neg_log_F(k);
    const double r = -lc / (-k - lF);
    o.expect(std::abs(r - 1.0) <= 0.02, "-log c / (-k - log F) at 200 = " + g6(r));
    const double price_arg = -lc / k + psi_argument_shift(Side::right, TailKind::price);
    const double density_arg = neg_log_f(k) / k + psi_argument_shift(Side::right, TailKind::density);
    o.expect(std::abs(price_arg - density_arg) <= 0.02,
             "psi argument price - density at 200 = " + g6(price_arg - density_arg));
}

void nig_wing(Outcome& o) {
    Config c;
    for (const char* a : {"model.name=nig", "model.alpha=2", "model.beta=-0.5", "model.T=1", "twin.k_switch=10",
                          "run.variant=iv''", "grid.k_max=200"}) {
        c.apply_override(a);
    }
    const ComparisonReport r = run_compare(c);
    const double theta = r.summary.theta ? r.summary.theta->raw : NAN;
    o.expect(std::abs(theta / 1.5 - 1.0) <= 0.05,
             "theta at k=" + g6(r.rows.back().k) + ": " + g6(theta) +
                 " (extrapolated " + g6(r.summary.theta ? r.summary.theta->extrapolated : NAN) + ")");
    std::vector<double> ratios;
    for (const auto& row : r.rows) ratios.push_back(row.ratio);
    o.expect(classify_trend(ratios) == Trend::converging,
             "|ratio - 1| strictly decreasing on the top half, final ratio " + g6(r.summary.final_ratio));
    const double lim = 8.0 - 4.0 * std::sqrt(3.75);
    o.expect(std::abs(psi(1.5) - lim) <= 1e-15, "psi(1.5) = " + g6(psi(1.5)));
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void fmls(Outcome& o) {
    const ModelSpec m(FmlsParams{1.5, 0.2, 0.0, 1.0});
    const RegVarEstimate e = estimate_index(
        [&](double k) { return -tail_cdf_fourier(m, k, Side::right).log_value; }, 1.0, 6.0);
    o.expect(std::abs(e.alpha_hat - 3.0) <= 0.15, "index of numeric -log F on [1, 6]: " + g6(e.alpha_hat));
    const TailFunction closed = m.known_tail_asymptote(Side::right);
    std::vector<double> dev;
    std::string seq;
    for (double k : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
        const double ratio = tail_cdf_fourier(m, k, Side::right).log_value / closed(k);
        dev.push_back(std::abs(ratio - 1.0));
        seq += g6(ratio) + " ";
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < dev.size(); ++i) decreasing = decreasing && dev[i] < dev[i - 1];
    o.expect(decreasing, "numeric / closed-form log tail at k=1..6: " + seq);
    if (cli_path.empty()) {
        o.expect(false, "no CLI path given for the left-wing refusal");
    } else {
        const int code = run_cli("compare --model fmls --side left");
        o.expect(code == 3, "left-wing CLI exit code " + std::to_string(code));
    }
}

void merton_saddle(Outcome& o) {
    const ModelSpec m(MertonParams{0.0, 0.2, 0.3, 0.2, 0.15, 1.0});
    double worst = -INFINITY;
    for (double k : geomspace(0.05, 60.0, 25)) {
        const double gap = tail_cdf(m, k, Side::right) - legendre_bound(m, k, Side::right).log_tail_bound;
        worst = std::max(worst, gap);
    }
    o.expect(worst <= 0.0, "max (log F - bound) over k in [0.05, 60] = " + g6(worst));
    const double k = 1e6;
    const double z1 = legendre_bound(m, k, Side::right).z_star * 0.15 / std::sqrt(2.0 * std::log(k));
    o.expect(std::abs(z1 - 1.0) <= 0.25, "z* delta / sqrt(2 log k) at 1e6 = " + g6(z1));
    const ModelSpec m0(MertonParams{0.0, 0.2, 0.3, 0.2, 0.0, 1.0});
    const double z0 = legendre_bound(m0, k, Side::right).z_star * 0.2 / std::log(k);
    o.expect(std::abs(z0 - 1.0) <= 0.15, "delta = 0: z* alpha / log k at 1e6 = " + g6(z0));
}

void term_structure(Outcome& o) {
    for (const char* model : {"bs", "merton"}) {
        Config c;
        c.apply_override(std::string("model.name=") + model);
        c.apply_override("term.k=1");
        c.apply_override("term.T_grid=0.25,0.5,1,2,4");
        const TermStructureReport r = run_termstructure(c);
        std::string vars;
        for (const auto& row : r.rows) vars += g6(row.total_variance) + " ";
        o.expect(r.variance_nondecreasing && r.psi_nondecreasing, std::string(model) + ": total variance " + vars);
    }
}

void residual_growth(Outcome& o) {
    const ModelSpec m = nig_shaped();
    const auto grid = geomspace(10.0, 200.0, 40);
    const SmileCurve curve = smile_curve(m, grid, Side::right);
    double best = -1.0, at = 0.0;
    bool all_ok = true;
    for (const auto& p : curve.points) {
        if (p.status != PointStatus::ok) {
            all_ok = false;
            continue;
        }
        const double v = std::abs(p.epsilon1) / std::log(p.k);
        if (v > best) {
            best = v;
            at = p.k;
        }
    }
    o.expect(all_ok, "all strikes priced and inverted");
    o.expect(at < 50.0, "max |eps1| / log k = " + g6(best) + " at k = " + g6(at));
}

void duality(Outcome& o) {
    Config c;
    c.apply_override("model.name=symmetric_smile");
    for (const char* a : {"synthetic.right.a=-1.5", "synthetic.right.b=-0.5", "synthetic.right.c=-2",
                          "synthetic.right.rho=1", "grid.k_max=150", "grid.k_points=30"}) {
        c.apply_override(a);
    }
    const ComparisonReport right = run_compare(c);
    c.apply_override("run.side=left");
    const ComparisonReport left = run_compare(c);
    if (right.rows.size() != left.rows.size()) {
        o.expect(false, "row counts differ");
        return;
    }
    double worst = 0.0;
    std::string where;
    auto cmp = [&](double a, double b, const char* col, double k) {
        if (std::isnan(a) && std::isnan(b)) return;
        const double d = std::isnan(a) || std::isnan(b) ? INFINITY : std::abs(a - b) / std::max(1.0, std::abs(a));
        if (d > worst) {
            worst = d;
            where = std::string(col) + " at k=" + g6(k);
        }
    };
    const std::size_t n = right.rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        const ReportRow& r = right.rows[i];
        const ReportRow& l = left.rows[n - 1 - i];
        const double k = r.k;
        cmp(r.k, -l.k, "k", k);
        // log p(-k) = log c(k) - k: the price arguments differ by the unit shift
        cmp(-r.log_price / k, -l.log_price / k - 1.0, "price argument", k);
        cmp(r.total_vol, l.total_vol, "total_vol", k);
        cmp(r.slope, l.slope, "slope", k);
        cmp(r.asymptote_slope, l.asymptote_slope, "asymptote_slope", k);
        cmp(r.ratio, l.ratio, "ratio", k);
        cmp(r.epsilon1, l.epsilon1, "epsilon1", k);
        cmp(r.argument, l.argument, "psi argument", k);
    }
    o.expect(worst <= 1e-9, "max relative row difference " + g6(worst) + (where.empty() ? "" : " (" + where + ")"));
}

struct Check {
    int id;
    const char* name;
    void (*fn)(Outcome&);
};

const std::vector<Check> checks = {
    {1, "psi algebra", psi_algebra},
    {2, "implied vol round trip", implied_vol_round_trip},
    {3, "black-scholes flat smile", black_scholes_flat},
    {4, "bingham transform numerics", bingham_numerics},
    {5, "synthetic tail chain density -> tail -> price", synthetic_chain},
    {6, "nig wing limit", nig_wing},
    {7, "fmls tail index, closed form and left refusal", fmls},
    {8, "merton saddle point", merton_saddle},
    {9, "term structure monotonicity", term_structure},
    {10, "epsilon1 residual growth", residual_growth},
    {11, "left/right duality", duality},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--check" && i + 1 < argc) {
            selected.push_back(std::atoi(argv[++i]));
        } else if (a == "--cli" && i + 1 < argc) {
            cli_path = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance [--check N]... [--cli PATH]\n");
            return 2;
        }
    }
    int failed = 0;
    for (const auto& c : checks) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Outcome o;
        try {
            c.fn(o);
        } catch (const std::exception& e) {
            o.expect(false, std::string("threw: ") + e.what());
        }
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}

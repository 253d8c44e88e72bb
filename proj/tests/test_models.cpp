#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "smilewing/errors.hpp"
#include "smilewing/models.hpp"
#include "smilewing/quadrature.hpp"
#include "smilewing/special.hpp"

using namespace smilewing;

namespace {

std::vector<ModelSpec> zoo() {
    std::vector<ModelSpec> out;
    out.emplace_back(BlackScholesParams{0.2, 1.0});
    out.emplace_back(NigParams{2.0, -0.5, 1.0, 0.0, 1.0});
    out.emplace_back(NigParams{3.0, 1.2, 0.4, 0.0, 0.5});
    out.emplace_back(FmlsParams{1.5, 0.2, 0.0, 1.0});
    out.emplace_back(FmlsParams{1.8, 0.3, 0.0, 2.0});
    out.emplace_back(MertonParams{0.0, 0.2, 0.3, 0.2, 0.15, 1.0});
    out.emplace_back(MertonParams{0.0, 0.1, 1.0, -0.1, 0.0, 0.5});
    out.emplace_back(nig_twin(2.0, -0.5));
    out.emplace_back(symmetric_smile(TailShape{0.3, 0.5, -2.0, -0.5, 1.3}));
    return out;
}

std::vector<double> interior_points(const MgfDomain& d) {
    std::vector<double> zs;
    const double lo = std::isfinite(d.lower) ? d.lower : -4.0;
    const double hi = std::isfinite(d.upper) ? d.upper : 4.0;
    for (int i = 1; i < 20; ++i) zs.push_back(lo + (hi - lo) * i / 20.0);
    return zs;
}

}  // namespace

TEST_CASE("K(0) = 0 and martingale normalization") {
    for (const auto& m : zoo()) {
        CAPTURE(m.describe());
        CHECK(m.log_mgf(0.0) == 0.0);
        CHECK(std::abs(m.log_mgf(1.0)) < 1e-12);
    }
}

TEST_CASE("K is convex on its domain") {
    for (const auto& m : zoo()) {
        CAPTURE(m.describe());
        for (double z : interior_points(m.mgf_domain())) {
            const double h = 1e-3;
            if (!m.mgf_domain().contains(z - h) || !m.mgf_domain().contains(z + h)) continue;
            const double second = m.log_mgf(z + h) - 2.0 * m.log_mgf(z) + m.log_mgf(z - h);
            CHECK(second >= -1e-9);
        }
    }
}

TEST_CASE("closed-form K' matches finite differences") {
    for (const auto& m : zoo()) {
        if (!m.has_complex_mgf()) continue;
        CAPTURE(m.describe());
        for (double z : interior_points(m.mgf_domain())) {
            const double h = 1e-6;
            if (!m.mgf_domain().contains(z - h) || !m.mgf_domain().contains(z + h)) continue;
            const double fd = (m.log_mgf(z + h) - m.log_mgf(z - h)) / (2.0 * h);
            CHECK(m.log_mgf_derivative(z) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("complex continuation agrees with the real log-mgf") {
    for (const auto& m : zoo()) {
        if (!m.has_complex_mgf()) continue;
        CAPTURE(m.describe());
        for (double z : interior_points(m.mgf_domain())) {
            const auto kz = m.log_mgf(std::complex<double>(z, 0.0));
            CHECK(std::exp(kz.real()) == doctest::Approx(std::exp(m.log_mgf(z))).epsilon(1e-8));
            CHECK(std::abs(kz.imag()) < 1e-12);
        }
    }
}

TEST_CASE("characteristic function basics") {
    for (const auto& m : zoo()) {
        CAPTURE(m.describe());
        CHECK(m.char_fn(0.0) == std::complex<double>(1.0, 0.0));
        for (double u : {0.3, 1.0, 2.5, 7.0}) {
            const auto a = m.char_fn(u), b = m.char_fn(-u);
            CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-10).scale(1e-12));
            CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-10).scale(1e-12));
            CHECK(std::abs(a) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("fmls characteristic function is the boundary value of the mgf continuation") {
    const ModelSpec m(FmlsParams{1.5, 0.2, 0.0, 1.0});
    for (double u : {-3.0, -0.5, 0.5, 3.0}) {
        const auto direct = m.char_fn(u);
        const auto cont = std::exp(m.log_mgf(std::complex<double>(1e-14, u)));
        CHECK(direct.real() == doctest::Approx(cont.real()).epsilon(1e-10));
        CHECK(direct.imag() == doctest::Approx(cont.imag()).epsilon(1e-10));
    }
}

TEST_CASE("fmls at alpha = 2 is Gaussian with variance 2 sigma^2 T") {
    const ModelSpec m(FmlsParams{2.0, 0.2, 0.0, 1.0});
    const double u = 1.7;
    const auto cf = m.char_fn(u);
    const double mu = m.drift();
    CHECK(mu == doctest::Approx(-0.04));
    CHECK(cf.real() == doctest::Approx(std::exp(-u * u * 0.04) * std::cos(u * mu)).epsilon(1e-13));
    CHECK(cf.imag() == doctest::Approx(std::exp(-u * u * 0.04) * std::sin(u * mu)).epsilon(1e-13));
    CHECK(m.critical_moments().q_minus == kInf);
}

TEST_CASE("synthetic characteristic function from quadrature matches the mgf at small u") {
    const ModelSpec m(nig_twin(2.0, -0.5));
    // E[X] = K'(0)
    const double h = 1e-4;
    const double mean = m.char_fn(h).imag() / h;
    CHECK(mean == doctest::Approx(m.log_mgf_derivative(0.0)).epsilon(1e-5));
}

TEST_CASE("mgf domain errors carry the boundary") {
    const ModelSpec nig(NigParams{2.0, -0.5, 1.0, 0.0, 1.0});
    CHECK(nig.log_mgf(2.5) == doctest::Approx(std::sqrt(3.75)).epsilon(1e-14));  // branch point, mu = 0
    CHECK(nig.log_mgf_derivative(2.5) == kInf);
    try {
        nig.log_mgf(2.6);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(e.upper() == 2.5);
        CHECK(e.lower() == -1.5);
    }
    const ModelSpec fmls(FmlsParams{});
    CHECK_THROWS_AS(fmls.log_mgf(-0.1), DomainError);
    CHECK(fmls.log_mgf(3.0) > 0.0);
}

TEST_CASE("critical moments") {
    CHECK(ModelSpec(NigParams{2.0, -0.5}).critical_moments().p_plus == 2.5);
    CHECK(ModelSpec(NigParams{2.0, -0.5}).critical_moments().q_minus == 1.5);
    const auto f = ModelSpec(FmlsParams{}).critical_moments();
    CHECK(f.p_plus == kInf);
    CHECK(f.q_minus == 0.0);
    const auto b = ModelSpec(BlackScholesParams{}).critical_moments();
    CHECK(b.p_plus == kInf);
    CHECK(b.q_minus == kInf);
    const auto t = ModelSpec(nig_twin(2.0, -0.5)).critical_moments();
    CHECK(t.p_plus == 2.5);
    CHECK(t.q_minus == 1.5);
    CHECK(synthetic_critical_moment({0, 0, -3.0, -1.0, 0.5}, Side::right) == 3.0);
    CHECK(synthetic_critical_moment({0, 0, -3.0, -1.0, 2.0}, Side::right) == kInf);
}

TEST_CASE("fmls mgf fails for negative z: E e^{-eps X} grows with truncation") {
    // Left tail of the stable law decays like |x|^{-alpha}, so the truncated
    // integral of e^{eps |x|} |x|^{-1-alpha} over [1, L] grows without bound.
    const double eps = 0.05, alpha = 1.5;
    double prev = 0.0;
    for (double L = 100.0; L <= 1e4; L *= 10.0) {
        const double v = std::exp(
            log_integrate([&](double y) { return eps * y - (1.0 + alpha) * std::log(y); }, 1.0, L).log_value);
        CHECK(v > 2.0 * prev);
        prev = v;
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelSpec(BlackScholesParams{-0.1, 1.0}), ConfigError);
    CHECK_THROWS_AS(ModelSpec(NigParams{1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(ModelSpec(NigParams{1.0, 0.5}), ConfigError);  // alpha - beta < 1
    CHECK_NOTHROW(ModelSpec(NigParams{1.0, 0.5}, DriftMode::raw));
    CHECK_THROWS_AS(ModelSpec(FmlsParams{1.0, 0.2}), ConfigError);
    CHECK_THROWS_AS(ModelSpec(FmlsParams{2.1, 0.2}), ConfigError);
    CHECK_THROWS_AS(ModelSpec(MertonParams{0.0, 0.2, 0.0, 0.1, 0.1, 1.0}), ConfigError);
    SyntheticTailParams bad = nig_twin(2.0, -0.5);
    bad.right.c = 0.5;
    CHECK_THROWS_AS(ModelSpec{bad}, ConfigError);
    bad = nig_twin(0.8, 0.0);  // p_plus = 0.8: no forward
    CHECK_THROWS_AS(ModelSpec{bad}, ConfigError);
    CHECK_NOTHROW(ModelSpec(bad, DriftMode::raw));
}

TEST_CASE("raw drift is kept") {
    const ModelSpec m(BlackScholesParams{0.2, 1.0, 0.05}, DriftMode::raw);
    CHECK(m.drift() == 0.05);
    CHECK(m.log_mgf(1.0) == doctest::Approx(0.07));
}

TEST_CASE("densities integrate to one with unit forward") {
    for (const auto& m : zoo()) {
        if (!m.has_density()) continue;
        CAPTURE(m.describe());
        auto lf = [&](double x) { return m.exact_log_density(x); };
        const double center = m.drift() * m.horizon();
        CHECK(log_integrate_line(lf, center).log_value == doctest::Approx(0.0).scale(1.0).epsilon(1e-11));
        const auto fwd = log_integrate_line([&](double x) { return x + lf(x); }, center);
        CHECK(fwd.log_value == doctest::Approx(0.0).scale(1.0).epsilon(1e-11));
    }
}

TEST_CASE("Black-Scholes density") {
    const ModelSpec m(BlackScholesParams{0.2, 1.0});
    const double x = 0.3, mu = -0.02;
    CHECK(m.exact_log_density(x) ==
          doctest::Approx(-(x - mu) * (x - mu) / 0.08 - 0.5 * std::log(2 * std::numbers::pi * 0.04)).epsilon(1e-15));
}

TEST_CASE("Merton with vanishing intensity is Black-Scholes") {
    const ModelSpec mer(MertonParams{0.0, 0.2, 1e-30, 0.2, 0.15, 1.0});
    const ModelSpec bs(BlackScholesParams{0.2, 1.0});
    for (double x : {-1.0, -0.1, 0.0, 0.4, 1.5}) {
        CHECK(mer.exact_log_density(x) == doctest::Approx(bs.exact_log_density(x)).epsilon(1e-10));
    }
}

TEST_CASE("synthetic density is continuous and C1 across the bridge") {
    const ModelSpec m(SyntheticTailParams{{0.1, -1.5, -0.5, -2.0, 1.0}, {-0.2, 0.7, 0.3, -0.4, 1.5}, 0.0},
                      DriftMode::raw);
    for (double x : {-1.0, 0.0, 1.0}) {
        const double h = 1e-7;
        const double l = m.exact_log_density(x - h), c = m.exact_log_density(x), r = m.exact_log_density(x + h);
        CHECK(std::abs(r - l) < 1e-5);
        const double dl = (c - l) / h, dr = (r - c) / h;
        CHECK(dl == doctest::Approx(dr).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("symmetric-smile family: e^{x/2} f(x) is even and the shift vanishes") {
    const ModelSpec m(symmetric_smile(TailShape{0.3, 0.5, -2.0, -0.5, 1.3}));
    CHECK(std::abs(m.drift()) < 1e-13);
    for (double x : {0.2, 0.9, 1.0, 3.0, 40.0}) {
        CHECK(m.exact_log_density(x) + x / 2 == doctest::Approx(m.exact_log_density(-x) - x / 2).epsilon(1e-13));
    }
}

TEST_CASE("NIG with beta = -1/2 has zero martingale drift") {
    CHECK(ModelSpec(NigParams{2.0, -0.5, 1.0, 0.0, 1.0}).drift() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("NIG density asymptote against the Bessel form") {
    // log f from the Bessel-K1 density (mpmath, 40 digits)
    const ModelSpec m(NigParams{2.0, -0.5, 1.0, 0.0, 1.0});
    const auto tail = m.known_tail_asymptote(Side::right);
    CHECK(tail.kind == TailKind::density);
    const double gap50 = std::abs(tail(50.0) - (-129.52047504876452361));
    const double gap200 = std::abs(tail(200.0) - (-506.58743171916812321));
    CHECK(gap50 < 0.03);
    CHECK(gap200 < gap50 / 3.0);
    // -log f(k)/k -> alpha - beta
    CHECK(-tail(1e8) / 1e8 == doctest::Approx(2.5).epsilon(1e-6));
    const auto left = m.known_tail_asymptote(Side::left);
    CHECK(-left(1e8) / 1e8 == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("FMLS tail asymptote constant") {
    const ModelSpec m(FmlsParams{1.5, 0.2, 0.0, 1.0});
    const auto tail = m.known_tail_asymptote(Side::right);
    CHECK(tail.kind == TailKind::cdf_tail);
    const double constant = std::pow(1.5 * std::pow(0.2, 1.5) * std::sqrt(2.0), -2.0);
    CHECK(constant == doctest::Approx(27.7777777777).epsilon(1e-9));
    CHECK(-tail(2.0) == doctest::Approx(constant * 8.0).epsilon(1e-12));
    CHECK_THROWS_AS(m.known_tail_asymptote(Side::left), ConditionError);
}

TEST_CASE("Merton tail asymptotes") {
    const ModelSpec m(MertonParams{0.0, 0.2, 0.3, 0.2, 0.15, 1.0});
    const double k = 100.0;
    CHECK(m.known_tail_asymptote(Side::right)(k) == doctest::Approx(-(k / 0.15) * std::sqrt(2 * std::log(k))));
    const ModelSpec fixed(MertonParams{0.0, 0.2, 0.3, 0.2, 0.0, 1.0});
    CHECK(fixed.known_tail_asymptote(Side::right)(k) == doctest::Approx(-(k / 0.2) * std::log(k)));
    CHECK(fixed.known_tail_asymptote(Side::left)(k) == doctest::Approx(-k * k / 0.08));
    const ModelSpec pure(MertonParams{0.0, 0.0, 0.3, 0.2, 0.0, 1.0});
    CHECK_THROWS_AS(pure.known_tail_asymptote(Side::left), ConfigError);
}

TEST_CASE("with_horizon rescales and recomputes the drift") {
    const ModelSpec m(MertonParams{0.0, 0.2, 0.3, 0.2, 0.15, 1.0});
    const auto m4 = m.with_horizon(4.0);
    CHECK(m4.horizon() == 4.0);
    CHECK(std::abs(m4.log_mgf(1.0)) < 1e-12);
    CHECK(m4.log_mgf(2.0) == doctest::Approx(4.0 * m.log_mgf(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(ModelSpec(nig_twin(2.0, -0.5)).with_horizon(2.0), ConfigError);
}

TEST_CASE("descriptors") {
    CHECK(ModelSpec(BlackScholesParams{}).name() == "bs");
    CHECK(ModelSpec(nig_twin(2, -0.5)).name() == "synthetic");
    CHECK(ModelSpec(NigParams{}).describe().find("alpha=2") != std::string::npos);
}

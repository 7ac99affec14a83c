#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "oracles.hpp"
#include "oscbound/calibration.hpp"
#include "oscbound/errors.hpp"
#include "oscbound/partition.hpp"
#include "oscbound/quad.hpp"
#include "oscbound/rng.hpp"
#include "oscbound/runner.hpp"
#include "oscbound/sublevel.hpp"

using namespace oscbound;

namespace {

const CalibrationTable& table() {
    static CalibrationTable t = CalibrationTable::compute();
    return t;
}

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return g;
}

// direct integral of min(1, |lambda g|^-eps)
double direct_integral(const std::function<double(double)>& g, double a, double b, double lambda,
                       double eps) {
    QuadOptions opts;
    opts.tol_rel = 1e-10;
    opts.tol_abs = 1e-14;
    opts.initial_panels = 64;
    return integrate_adaptive(
               [&](double x) {
                   double t = std::abs(lambda * g(x));
                   if (t <= 0.0) return 1.0;
                   double v = std::pow(t, -eps);
                   return v < 1.0 ? v : 1.0;
               },
               a, b, opts)
        .value;
}

}  // namespace

TEST_CASE("growth fits for closed-form sublevel measures") {
    // |{x in [0,1] : x < a}| = a
    GrowthFit lin = estimate_growth(Expr::parse("x"), 0.0, 1.0, geometric(1e-4, 0.9, 17));
    CHECK_FALSE(lin.degenerate);
    CHECK(lin.delta == doctest::Approx(1.0).epsilon(0.02));
    CHECK(lin.C == doctest::Approx(1.0).epsilon(0.02));
    CHECK(lin.M == doctest::Approx(1.0).epsilon(1e-6));

    // |{x in [-1,1] : x^2 < a}| = 2 sqrt(a)
    GrowthFit sq = estimate_growth(Expr::parse("x^2"), -1.0, 1.0, geometric(1e-4, 0.9, 17));
    CHECK(sq.delta == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sq.C == doctest::Approx(2.0).epsilon(0.02));

    // the ratio functional of the quadratic phase: g = 2x^2, measure sqrt(2a)
    GrowthFit rq = estimate_growth(Expr::parse("2*x^2"), -1.0, 1.0, geometric(1e-4, 0.9, 17));
    CHECK(rq.delta == doctest::Approx(0.5).epsilon(0.02));
    CHECK(rq.C == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));

    // measures are non-decreasing and within [0, |E|]
    for (std::size_t i = 0; i < sq.measures.size(); ++i) {
        CHECK(sq.measures[i] >= (i ? sq.measures[i - 1] : 0.0));
        CHECK(sq.measures[i] <= 2.0);
        CHECK(sq.measures[i] <= sq.C * std::pow(sq.a_grid[i], sq.delta) + 1e-12);
    }
}

TEST_CASE("degenerate growth fit is flagged") {
    GrowthFit flat = estimate_growth(Expr::parse("2"), -1.0, 1.0, geometric(1e-4, 0.9, 9));
    CHECK(flat.degenerate);
}

TEST_CASE("grid measures track bisection-refined measures") {
    Rng rng(5150);
    const double cell = 2.0 / (1 << 18);
    for (int trial = 0; trial < 200; ++trial) {
        int deg = rng.uniform_int(1, 5);
        std::vector<double> coeffs(deg + 1);
        for (double& c : coeffs) c = rng.uniform(-3.0, 3.0);
        auto g = [&coeffs](double x) {
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
            return acc;
        };
        double a = rng.uniform(0.05, 1.5);
        double grid_measure;
        {
            std::vector<double> agrid{a / 4.0, a / 2.0, a};
            GrowthFit fit = estimate_growth(g, -1.0, 1.0, agrid);
            grid_measure = fit.measures[2];
        }
        double refined = sublevel_measure_refined(g, -1.0, 1.0, a);
        // each crossing of |g| = a can misclassify at most one midpoint cell
        auto crossings = find_zeros([&](double x) { return std::abs(g(x)) - a; }, -1.0, 1.0);
        double tol = cell * (2.0 + static_cast<double>(crossings.size()));
        CHECK(std::abs(grid_measure - refined) <= tol);
    }
}

TEST_CASE("envelope cases against closed-form direct integrals") {
    // delta = 1 > eps = 1/2 for g = x on [0, 1], lambda = 4:
    // direct = 1/4 + int_{1/4}^1 (4x)^(-1/2) dx = 0.75
    double d = direct_integral([](double x) { return x; }, 0.0, 1.0, 4.0, 0.5);
    CHECK(d == doctest::Approx(0.75).epsilon(1e-8));
    double D = table().require(CalibrationTable::envelope_D_key(1.0, 0.5));
    CHECK(D >= 1.0);
    CHECK(sublevel_envelope(1.0, 1.0, 0.5, 1.0, 4.0, D) >= d);

    // delta = eps = 1: direct = (1 + log lambda)/lambda exactly
    const double lam = std::exp(10.0);
    double d2 = direct_integral([](double x) { return x; }, 0.0, 1.0, lam, 1.0);
    CHECK(d2 == doctest::Approx(11.0 / lam).epsilon(1e-7));
    double D11 = table().require(CalibrationTable::envelope_D_key(1.0, 1.0));
    CHECK(sublevel_envelope(1.0, 1.0, 1.0, 1.0, lam, D11) >= d2);

    // constant g = M: growth holds with C = |E| / M^delta and the envelope
    // dominates in the delta < eps case
    const double M = 1.0, len = 2.0;
    for (double lam2 : {10.0, 1e3, 1e6}) {
        double direct = std::min(1.0, std::pow(lam2 * M, -0.5)) * len;
        double env = sublevel_envelope(len / std::pow(M, 0.25), 0.25, 0.5, M, lam2,
                                       table().require(CalibrationTable::envelope_D_key(0.25, 0.5)));
        CHECK(env >= direct);
    }
}

TEST_CASE("envelope dominates the canonical family across all three cases") {
    for (double delta : {0.25, 0.5, 1.0, 2.0}) {
        for (double eps : {0.5, 1.0, 2.0}) {
            double D = table().require(CalibrationTable::envelope_D_key(delta, eps));
            auto g = [delta](double x) { return std::pow(x, 1.0 / delta); };
            std::vector<std::pair<double, double>> pts;
            for (int k = 1; k <= 6; ++k) {
                double lam = std::pow(10.0, k);
                double direct = direct_integral(g, 0.0, 1.0, lam, eps);
                CHECK(direct <= sublevel_envelope(1.0, delta, eps, 1.0, lam, D));
                pts.push_back({lam, direct});
            }
            // exponent recovery
            double slope = 0.0;
            {
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                for (auto& [x, y] : pts) {
                    sx += std::log(x);
                    sy += std::log(y);
                }
                double mx = sx / pts.size(), my = sy / pts.size();
                for (auto& [x, y] : pts) {
                    sxx += (std::log(x) - mx) * (std::log(x) - mx);
                    sxy += (std::log(x) - mx) * (std::log(y) - my);
                }
                slope = sxy / sxx;
            }
            if (std::abs(delta - eps) > 1e-12) {
                CHECK(std::abs(slope - (-std::min(delta, eps))) <= 0.05);
            } else {
                // log-factor case: slope is dragged above -delta, and the
                // compensated values grow like 1 + log(lambda)
                CHECK(slope > -delta + 0.04);
                double z_lo = pts.front().second * std::pow(pts.front().first, delta);
                double z_hi = pts.back().second * std::pow(pts.back().first, delta);
                double expect = (1.0 + std::log(1e6)) / (1.0 + std::log(10.0));
                CHECK(z_hi > z_lo);
                CHECK(z_hi / z_lo == doctest::Approx(expect).epsilon(0.25));
            }
        }
    }
}

TEST_CASE("sublevel derivative-test bound") {
    const double c1 = table().require(CalibrationTable::vdc_c_key(1));
    const double c2 = table().require(CalibrationTable::vdc_c_key(2));
    CHECK(c1 >= 2.0);
    CHECK(c2 >= 2.82);

    // f = x, p = 1, B = 1: measure{|x| < 0.1} on [-1, 1] is 0.2
    CHECK(vdc_sublevel_bound(1.0, 1, 0.1, c1) >= 0.2);
    // f = x^2, p = 2, B = 2: measure{|x^2| < 0.01} is 0.2
    double bound2 = vdc_sublevel_bound(2.0, 2, 0.01, c2);
    CHECK(bound2 >= 0.2);
    CHECK(bound2 == doctest::Approx(c2 * std::sqrt(0.005)).epsilon(1e-12));
    // vacuous regime: formula value returned regardless
    CHECK(vdc_sublevel_bound(1.0, 1, 100.0, c1) == doctest::Approx(c1 * 100.0).epsilon(1e-12));
}

TEST_CASE("derivative-test bound dominates fresh random polynomials") {
    // distinct seed from the calibration family
    auto polys = random_poly_suite(40, 777);
    for (const auto& f : polys) {
        int p = f.degree();
        Poly dp = f.derivative(p);
        double B = std::abs(dp.coeffs[0]);  // constant
        REQUIRE(B > 1.0);
        double c = table().require(CalibrationTable::vdc_c_key(p));
        double fmax = 0.0;
        for (int i = 0; i <= 256; ++i)
            fmax = std::max(fmax, std::abs(f(-1.0 + 2.0 * i / 256.0)));
        for (double eta : {1e-5, 1e-3, 0.1, 1.0}) {
            double eps = eta * fmax;
            double meas = sublevel_measure_refined([&f](double x) { return f(x); }, -1.0, 1.0, eps);
            CHECK(meas <= vdc_sublevel_bound(B, p, eps, c) + 1e-9);
        }
    }
}

TEST_CASE("calibration file round trip") {
    CalibrationTable t = table();
    t.save("calib_roundtrip_tmp.txt");
    CalibrationTable back = CalibrationTable::load("calib_roundtrip_tmp.txt");
    for (const auto& [k, v] : t.entries()) {
        REQUIRE(back.get(k).has_value());
        CHECK(*back.get(k) == v);  // 17 significant digits survive the round trip
    }
    CHECK_FALSE(back.get("no_such_key").has_value());
    CHECK_THROWS_AS(back.require("no_such_key"), EvalError);
    std::remove("calib_roundtrip_tmp.txt");
}

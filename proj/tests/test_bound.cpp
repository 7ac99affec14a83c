#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "oscbound/bound.hpp"
#include "oscbound/fit.hpp"
#include "oscbound/quad.hpp"

using namespace oscbound;

TEST_CASE("polynomial-type certificates") {
    PolyTypeCertificate c1 = check_polytype(Expr::parse("x^2"), -1.0, 1.0);
    CHECK(c1.valid);
    CHECK(c1.k == 2);
    CHECK(c1.A == doctest::Approx(2.0).epsilon(1e-12));

    PolyTypeCertificate c2 = check_polytype(Expr::parse("x^3 - x"), -2.0, 2.0);
    CHECK(c2.valid);
    CHECK(c2.k == 3);
    CHECK(c2.A == doctest::Approx(2.0).epsilon(1e-12));

    PolyTypeCertificate flat = check_polytype(Expr::parse("exp(-1/x)"), 0.01, 0.4, 8);
    CHECK_FALSE(flat.valid);

    // k = 1 certificates carry the monotone piece count
    PolyTypeCertificate lin = check_polytype(Expr::parse("x"), 0.0, 1.0);
    CHECK(lin.valid);
    CHECK(lin.k == 1);
    CHECK(lin.j == 1);
}

TEST_CASE("amplitude norm") {
    CHECK(amplitude_norm(Expr::parse("1"), 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(amplitude_norm(Expr::parse("x"), 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-10));
    // sin(3x) on [0, pi]: sup = 1, L1 of 3cos(3x) = 6 (two arcs per period)
    CHECK(amplitude_norm(Expr::parse("sin(3*x)"), 0.0, std::acos(-1.0)) ==
          doctest::Approx(7.0).epsilon(1e-8));
}

TEST_CASE("uniform bound: linear and quadratic phases") {
    Expr one = Expr::parse("1");

    BoundReport lin = uniform_bound(Expr::parse("x"), one, 0.0, 1.0, 10.0);
    CHECK(lin.integral_term == doctest::Approx(0.0));
    CHECK(lin.endpoint_term == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(lin.total == doctest::Approx(0.1).epsilon(1e-10));

    // f = x^2 on [0, 1], lambda = 100: closed-form split at 1/sqrt(200)
    BoundReport q = uniform_bound(Expr::parse("x^2"), one, 0.0, 1.0, 100.0);
    const double integral = 2.0 / std::sqrt(200.0) - 1.0 / 200.0;
    CHECK(q.integral_term == doctest::Approx(integral).epsilon(1e-8));
    CHECK(q.endpoint_term == doctest::Approx(0.005).epsilon(1e-10));
    CHECK(q.total == doctest::Approx(integral + 0.005).epsilon(1e-8));

    // symmetric interval doubles the integral term
    BoundReport q2 = uniform_bound(Expr::parse("x^2"), one, -1.0, 1.0, 100.0);
    CHECK(q2.integral_term == doctest::Approx(2.0 * integral).epsilon(1e-8));
    CHECK(q2.endpoint_term == doctest::Approx(0.005).epsilon(1e-10));
    CHECK(q2.total == doctest::Approx(0.277843).epsilon(1e-4));

    CHECK_THROWS_AS(uniform_bound(Expr::parse("x"), one, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("special points") {
    // x^3 - x: f'' = 6x vanishes at 0 (f'(0) = -1), f''' = 6 never; endpoints kept
    auto j1 = special_points(Expr::parse("x^3 - x"), -2.0, 2.0);
    REQUIRE(j1.size() == 3);
    CHECK(j1[0] == doctest::Approx(-2.0));
    CHECK(std::abs(j1[1]) <= 1e-10);
    CHECK(j1[2] == doctest::Approx(2.0));

    // x^2: f'' = 2, f''' identically zero; endpoints only
    auto j2 = special_points(Expr::parse("x^2"), -1.0, 1.0);
    REQUIRE(j2.size() == 2);
    CHECK(j2[0] == doctest::Approx(-1.0));
    CHECK(j2[1] == doctest::Approx(1.0));

    // x on [0, 1]
    auto j3 = special_points(Expr::parse("x"), 0.0, 1.0);
    REQUIRE(j3.size() == 2);

    // exp(-1/x) on [0.05, 0.4]: f''' = e^{-1/x} x^{-6} (6x^2 - 6x + 1)
    // vanishes at (3 - sqrt(3))/6; f'' vanishes only at 1/2, outside
    auto j4 = special_points(Expr::parse("exp(-1/x)"), 0.05, 0.4);
    const double root = (3.0 - std::sqrt(3.0)) / 6.0;
    REQUIRE(j4.size() == 3);
    CHECK(j4[0] == doctest::Approx(0.05));
    CHECK(j4[1] == doctest::Approx(root).epsilon(1e-8));
    CHECK(j4[2] == doctest::Approx(0.4));
}

TEST_CASE("special-point bound") {
    Expr one = Expr::parse("1");

    BoundReport lin = special_point_bound(Expr::parse("x"), one, 0.0, 1.0, 10.0);
    CHECK(lin.integral_term == doctest::Approx(0.0));
    CHECK(lin.endpoint_term == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(lin.total == doctest::Approx(0.2).epsilon(1e-10));

    // x^3 - x at lambda = 1000: endpoint sum (1/11 + 1/11 + 1)/1000
    BoundReport cub = special_point_bound(Expr::parse("x^3 - x"), one, -2.0, 2.0, 1000.0);
    const double expect = (2.0 / 11.0 + 1.0) / 1000.0;
    CHECK(cub.endpoint_term == doctest::Approx(expect).epsilon(1e-8));
    CHECK(cub.endpoint_term <= 0.00119);
}

TEST_CASE("flat phase: the endpoint sum depends strongly on the left endpoint") {
    Expr one = Expr::parse("1");
    Expr f = Expr::parse("exp(-1/x)");

    // On [0.05, 0.4] the left endpoint contributes 1/f'(0.05) = e^20 * 0.0025,
    // which dominates: the endpoint term stays capped at b - a until lambda
    // exceeds that scale.
    auto fp = [](double x) { return std::exp(-1.0 / x) / (x * x); };
    const double root = (3.0 - std::sqrt(3.0)) / 6.0;
    const double sum005 = 1.0 / fp(0.05) + 1.0 / fp(root) + 1.0 / fp(0.4);
    BoundReport r1 = special_point_bound(f, one, 0.05, 0.4, 1e6);
    CHECK(r1.endpoint_term == doctest::Approx(std::min(0.35, sum005 / 1e6)).epsilon(1e-6));
    CHECK(r1.endpoint_term == doctest::Approx(0.35));  // still capped at this lambda

    // Starting at (numerically) zero, f' underflows at the left endpoint, so
    // the endpoint sum keeps only the moderate interior and right points --
    // the regime where the bound tracks 1/log(lambda).
    BoundReport r2 = special_point_bound(f, one, 1e-9, 0.4, 1e6);
    const double sum0 = 1.0 / fp(root) + 1.0 / fp(0.4);
    CHECK(r2.endpoint_term == doctest::Approx(sum0 / 1e6).epsilon(1e-6));
    CHECK(r2.endpoint_term < r2.integral_term);  // endpoint terms are the smaller part
    const double scale = 1.0 / std::log(1e6);
    CHECK(r2.total > 0.5 * scale);
    CHECK(r2.total < 2.0 * scale);
}

TEST_CASE("critical point contribution") {
    CHECK(critical_point_contribution(1.0, 1, 1e4) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(critical_point_contribution(8.0, 3, 1.0) ==
          doctest::Approx(std::pow(8.0, -0.25)).epsilon(1e-12));
    CHECK(critical_point_contribution(1.0, 2, 1e6) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK_THROWS_AS(critical_point_contribution(0.0, 1, 1.0), std::invalid_argument);
}

TEST_CASE("bound terms stay within their ranges") {
    Expr one = Expr::parse("1");
    struct Case {
        const char* text;
        double a, b;
    } cases[] = {{"x^2", -1.0, 1.0},
                 {"x^3 - x", -2.0, 2.0},
                 {"sin(x)", 0.0, 3.0},
                 {"exp(-1/x)", 0.05, 0.4}};
    for (const auto& c : cases) {
        Expr f = Expr::parse(c.text);
        for (double lambda : {0.5, 16.0, 4096.0}) {
            for (bool uniform : {true, false}) {
                BoundReport r = uniform ? uniform_bound(f, one, c.a, c.b, lambda)
                                        : special_point_bound(f, one, c.a, c.b, lambda);
                CHECK(r.integral_term >= 0.0);
                CHECK(r.integral_term <= (c.b - c.a) * (1.0 + 1e-12));
                CHECK(r.endpoint_term >= 0.0);
                CHECK(r.endpoint_term <= (c.b - c.a) * (1.0 + 1e-12));
                CHECK(r.amplitude_norm >= 0.0);
                CHECK(r.total >= 0.0);
            }
        }
    }
}

TEST_CASE("bound terms are non-increasing in |lambda|") {
    Expr one = Expr::parse("1");
    Expr f = Expr::parse("x^3 - x");
    double prev_int = 1e300, prev_end = 1e300;
    for (double lambda : {16.0, 64.0, 256.0, 1024.0, 65536.0}) {
        BoundReport r = uniform_bound(f, one, -2.0, 2.0, lambda);
        CHECK(r.integral_term <= prev_int + 1e-12);
        CHECK(r.endpoint_term <= prev_end + 1e-12);
        prev_int = r.integral_term;
        prev_end = r.endpoint_term;
    }
}

TEST_CASE("localization: integral term additive, endpoint sub-additive") {
    Expr one = Expr::parse("1");
    Expr f = Expr::parse("sin(x)");
    const double lambda = 64.0;
    BoundReport whole = uniform_bound(f, one, 0.0, 3.0, lambda);
    BoundReport left = uniform_bound(f, one, 0.0, 1.1, lambda);
    BoundReport right = uniform_bound(f, one, 1.1, 3.0, lambda);
    CHECK(whole.integral_term ==
          doctest::Approx(left.integral_term + right.integral_term).epsilon(1e-7));
    CHECK(whole.endpoint_term <= left.endpoint_term + right.endpoint_term + 1e-9);
}

TEST_CASE("integral-term decay matches the critical-point prediction") {
    Expr one = Expr::parse("1");
    for (int p : {1, 2, 3}) {
        // f = x^(p+1)/(p+1), so f' = x^p with beta = 1
        std::string text = "x^" + std::to_string(p + 1) + "/" + std::to_string(p + 1);
        Expr f = Expr::parse(text);
        std::vector<std::pair<double, double>> pts;
        for (double lambda = 100.0; lambda <= 1.0000001e6; lambda *= std::sqrt(10.0)) {
            BoundReport r = uniform_bound(f, one, -1.0, 1.0, lambda);
            pts.push_back({lambda, r.integral_term});
        }
        DecayFit fit = decay_fit(pts);
        CHECK(std::abs(fit.slope - (-1.0 / (p + 1))) <= 0.03);

        // the predicted contribution has the same order as the measured term
        for (const auto& [lambda, term] : pts) {
            double pred = critical_point_contribution(1.0, p, lambda);
            CHECK(term / pred > 0.3);
            CHECK(term / pred < 30.0);
        }
    }
}

TEST_CASE("validity sweep: flat phase through the certificate-chosen bound") {
    // on [0.05, 0.4] the first derivative still certifies (sup/inf ~ 6.2e5
    // stays under the default cap), so the uniform bound applies; the ratio
    // stays finite with no growth trend across the dyadic sweep
    Expr f = Expr::parse("exp(-1/x)");
    Expr one = Expr::parse("1");
    PolyTypeCertificate cert = check_polytype(f, 0.05, 0.4);
    REQUIRE(cert.valid);
    CHECK(cert.k == 1);
    CHECK(cert.j == 1);  // f' is increasing on this interval
    std::vector<std::pair<double, double>> ratios;
    for (int e = 4; e <= 20; ++e) {
        double lambda = std::pow(2.0, e);
        QuadOptions oo;
        oo.max_panels = osc_panel_budget(lambda, 0.1);
        OscResult i = oscillatory_integral([f](double x) { return f(x); },
                                           [](double) { return 1.0; }, 0.05, 0.4, lambda, oo);
        BoundReport r = uniform_bound(f, one, 0.05, 0.4, lambda);
        double ratio = std::abs(i.value) / r.total;
        CHECK(std::isfinite(ratio));
        ratios.push_back({lambda, ratio});
    }
    CHECK(trend_slope(ratios) <= 0.05);
}

TEST_CASE("validity sweep at unit amplitude: ratios stay trend-free") {
    // light version of the full acceptance sweep
    Expr one = Expr::parse("1");
    struct Case {
        const char* text;
        double a, b;
    } cases[] = {{"x^2", -1.0, 1.0}, {"x^3 - x", -2.0, 2.0}};
    for (const auto& c : cases) {
        Expr f = Expr::parse(c.text);
        std::vector<std::pair<double, double>> ratios;
        for (int e = 4; e <= 12; ++e) {
            double lambda = std::pow(2.0, e);
            QuadOptions oo;
            oo.max_panels = osc_panel_budget(lambda, 20.0);
            OscResult i = oscillatory_integral([f](double x) { return f(x); },
                                               [](double) { return 1.0; }, c.a, c.b, lambda, oo);
            BoundReport r = uniform_bound(f, one, c.a, c.b, lambda);
            CHECK(std::abs(i.value) <= 10.0 * r.total);  // bounded ratio, generous constant
            ratios.push_back({lambda, std::abs(i.value) / r.total});
        }
        CHECK(trend_slope(ratios) <= 0.05);
    }
}

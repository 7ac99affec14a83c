#include "oscbound/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oscbound {

DecayFit decay_fit(std::span<const std::pair<double, double>> samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 3) throw std::invalid_argument("decay_fit requires at least 3 samples");

    double sx = 0.0, sy = 0.0;
    for (const auto& [lam, val] : samples) {
        if (!(lam > 0.0) || !(val > 0.0))
            throw std::invalid_argument("decay_fit requires positive lambda and value");
        sx += std::log(lam);
        sy += std::log(val);
    }
    const double mx = sx / n, my = sy / n;

    double sxx = 0.0, sxy = 0.0;
    for (const auto& [lam, val] : samples) {
        double dx = std::log(lam) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(val) - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("decay_fit requires distinct lambdas");

    DecayFit fit;
    fit.n_points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss_res = 0.0;
    for (const auto& [lam, val] : samples) {
        double r = std::log(val) - (fit.intercept + fit.slope * std::log(lam));
        ss_res += r * r;
    }
    fit.stderr_slope = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return fit;
}

double trend_slope(std::span<const std::pair<double, double>> samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 3) throw std::invalid_argument("trend_slope requires at least 3 samples");
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        if (!(samples[i].first > 0.0) || !(samples[i].second > 0.0))
            throw std::invalid_argument("trend_slope requires positive lambda and value");
        xs[i] = std::log(samples[i].first);
        ys[i] = std::log(samples[i].second);
    }
    std::vector<double> slopes;
    slopes.reserve(n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (xs[j] != xs[i]) slopes.push_back((ys[j] - ys[i]) / (xs[j] - xs[i]));
    if (slopes.empty()) throw std::invalid_argument("trend_slope requires distinct lambdas");
    std::sort(slopes.begin(), slopes.end());
    std::size_t m = slopes.size();
    return m % 2 ? slopes[m / 2] : 0.5 * (slopes[m / 2 - 1] + slopes[m / 2]);
}

}  // namespace oscbound

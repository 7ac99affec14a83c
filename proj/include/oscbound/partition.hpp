#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oscbound/expr.hpp"

namespace oscbound {

struct RootHit {
    double x = 0.0;
    bool tangential = false;  // |g| dips below 1e-10 without a sign change
};

// All sign-change zeros of g on [a, b], bisection-refined to width <= tol,
// plus tangential zeros detected as grid local minima of |g| below 1e-10.
// An identically-vanishing g (all samples below 1e-10) yields no zeros.
std::vector<RootHit> find_zeros(const std::function<double(double)>& g, double a, double b,
                                int grid_n = 4096, double tol = 1e-12);

enum class IntervalTag : int { Untyped = 0, Type1, Type2A, Type2B, Type2Full };

const char* tag_name(IntervalTag t);

// Open interval of the H set with classification tag and diagnostics.
struct HInterval {
    double c = 0.0, d = 0.0;
    IntervalTag tag = IntervalTag::Untyped;
    double c_uncertainty = 0.0;  // widened when the boundary crossing is tangential
    double d_uncertainty = 0.0;
    double sup_fp = 0.0;  // sup of |f'| over [c, d], filled by classify
    double inf_fp = 0.0;
};

// Decomposition of [a, b] driven by the ratio |f''| / f'^2: G is where the
// ratio is >= 1 (or f' vanishes, ratio taken as +inf there), H is the open
// complement.
struct Partition {
    double a = 0.0, b = 0.0;
    std::vector<RootHit> z;                            // endpoints and zeros of f'
    std::vector<std::pair<double, double>> g_set;      // closed pieces, lo == hi for points
    std::vector<HInterval> h_intervals;

    double g_measure() const;
    double h_measure() const;
};

Partition decompose(const JetFn& f, double a, double b, int grid_n = 4096);
Partition decompose(const Expr& f, double a, double b, int grid_n = 4096);

// Tags every H interval: Type1 when |f'| varies by more than a factor of 2,
// Type2Full when the interval is all of (a,b), Type2A when it touches exactly
// one outer endpoint, Type2B otherwise. Fills the sup/inf diagnostics.
void classify(Partition& part, const JetFn& f);
Partition classify(Partition part, const Expr& f);

// 1 + number of sign changes of f'' strictly inside (a, b): the number of
// maximal intervals on which f' is monotonic, at grid resolution.
int monotone_piece_count(const JetFn& f, double a, double b, int grid_n = 4096);
int monotone_piece_count(const Expr& f, double a, double b, int grid_n = 4096);

}  // namespace oscbound

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pressmet/moduli.hpp"

namespace pressmet {

// A first-fundamental-form sampler on an open 2-D domain.
struct TensorField {
    std::function<std::array<double, 3>(double, double)> sample;  // (E, F, G)
    std::function<bool(double, double)> in_domain;
};

// Field of a 2-D entropy chart under the given metric.
TensorField make_chart_field(const EntropyChart& chart, MetricKind kind);

// Gaussian curvature by the Brioschi two-determinant quotient, with first and
// second partials of E, F, G by central differences (one Richardson level).
// The step starts at 1e-3 * max(1, |x|, |y|) (or step_hint if positive) and
// halves until the stencil fits inside the domain; throws InfeasibleError if
// no admissible step remains, Error if EG - F^2 <= 0.
double brioschi_curvature(const TensorField& field, double x, double y,
                          double step_hint = 0.0);

struct AxisSpec {
    double min = 0.0, max = 0.0;
    int count = 0;
};

struct CurvatureGrid {
    AxisSpec ax, ay;
    std::vector<double> values;  // row-major, x outer
    std::vector<char> defined;   // 0 marks infeasible/not computed
    double value(int i, int j) const { return values[i * ay.count + j]; }
    bool ok(int i, int j) const { return defined[i * ay.count + j] != 0; }
    double x_at(int i) const;
    double y_at(int j) const;
};

// Evaluates the curvature at every grid point whose stencil stays feasible;
// per-point failures become markers, never numbers.
CurvatureGrid curvature_grid(const TensorField& field, AxisSpec ax, AxisSpec ay);

// CSV with header "x,y,K", rows in row-major order, `NA` outside the domain,
// 15 significant digits.
void write_grid_csv(const CurvatureGrid& grid, std::ostream& out);

// Which end of [a, b] is a singular limit.
enum class SingularEnd { None, LowerPoint, UpperInfinity };

struct PathClass {
    enum class Kind { Finite, Divergent, Indeterminate } kind = Kind::Indeterminate;
    double length = 0.0;    // set when finite
    double exponent = 0.0;  // fitted power of the speed at the singular end
    std::string note;
};

// Length of a path with speed sampler s(t) on (a, b), classifying the
// improper end: the speed is fitted to C t^alpha near the singular end
// (12 geometric samples per decade across 3 decades); clearly integrable
// tails are integrated with endpoint refinement, clearly divergent ones are
// reported with the fitted exponent, and exponents within 0.05 of the
// borderline are resolved by testing partial-integral growth against
// sqrt(-log eps) -- or reported indeterminate.
PathClass path_length(const std::function<double(double)>& speed, double a, double b,
                      SingularEnd end);

// Plain adaptive quadrature (used by path_length; exposed for oracles).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

}  // namespace pressmet

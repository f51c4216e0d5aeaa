#include "pressmet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace pressmet {

TensorField make_chart_field(const EntropyChart& chart, MetricKind kind) {
    if (chart.dim() != 2) throw Error("make_chart_field: chart must be 2-dimensional");
    TensorField f;
    f.sample = [chart, kind](double x, double y) -> std::array<double, 3> {
        const double free[2] = {x, y};
        const MetricTensorSample s = metric_tensor(chart, free, kind);
        return {s.E, s.F, s.G};
    };
    f.in_domain = [chart](double x, double y) {
        if (!(x > 0.0) || !(y > 0.0)) return false;
        const double free[2] = {x, y};
        return chart.is_feasible_quick(free);
    };
    return f;
}

namespace {

double det3(const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Cached samples on the 5x5 stencil (offsets in units of h/2).
class StencilCache {
public:
    StencilCache(const TensorField& field, double x, double y, double h)
        : field_(field), x_(x), y_(y), half_(h / 2.0) {}

    const std::array<double, 3>& at(int i, int j) {
        auto& slot = cells_[(i + 2) * 5 + (j + 2)];
        if (!slot.second) {
            slot.first = field_.sample(x_ + i * half_, y_ + j * half_);
            slot.second = true;
        }
        return slot.first;
    }

private:
    const TensorField& field_;
    double x_, y_, half_;
    std::array<std::pair<std::array<double, 3>, bool>, 25> cells_{};
};

}  // namespace

double brioschi_curvature(const TensorField& field, double x, double y, double step_hint) {
    const double scale = std::max({1.0, std::abs(x), std::abs(y)});
    double h = step_hint > 0.0 ? step_hint : 1e-3 * scale;
    if (!field.in_domain(x, y))
        throw InfeasibleError("brioschi_curvature: point outside the domain");
    // Shrink the step until the full stencil stays inside the domain.  Only a
    // few halvings are allowed: closer to the boundary the differentiated
    // tensor entries blow up and the quotient turns into noise, so such
    // points are reported rather than evaluated.
    const double h_min = h / 16.0;
    for (;;) {
        bool ok = true;
        for (int i = -2; i <= 2 && ok; ++i)
            for (int j = -2; j <= 2 && ok; ++j)
                if (!field.in_domain(x + i * h / 2.0, y + j * h / 2.0)) ok = false;
        if (ok) break;
        h /= 2.0;
        if (h < h_min)
            throw InfeasibleError("brioschi_curvature: neighborhood leaves the domain");
    }

    StencilCache c(field, x, y, h);
    // component 0 = E, 1 = F, 2 = G; all derivatives Richardson-extrapolated
    // from steps h and h/2 (stencil offsets are in units of h/2).
    const auto dx = [&](int comp) {
        const double d1 = (c.at(2, 0)[comp] - c.at(-2, 0)[comp]) / (2.0 * h);
        const double d2 = (c.at(1, 0)[comp] - c.at(-1, 0)[comp]) / h;
        return (4.0 * d2 - d1) / 3.0;
    };
    const auto dy = [&](int comp) {
        const double d1 = (c.at(0, 2)[comp] - c.at(0, -2)[comp]) / (2.0 * h);
        const double d2 = (c.at(0, 1)[comp] - c.at(0, -1)[comp]) / h;
        return (4.0 * d2 - d1) / 3.0;
    };
    const auto dxx = [&](int comp) {
        const double f0 = c.at(0, 0)[comp];
        const double d1 = (c.at(2, 0)[comp] - 2.0 * f0 + c.at(-2, 0)[comp]) / (h * h);
        const double d2 = (c.at(1, 0)[comp] - 2.0 * f0 + c.at(-1, 0)[comp]) / (h * h / 4.0);
        return (4.0 * d2 - d1) / 3.0;
    };
    const auto dyy = [&](int comp) {
        const double f0 = c.at(0, 0)[comp];
        const double d1 = (c.at(0, 2)[comp] - 2.0 * f0 + c.at(0, -2)[comp]) / (h * h);
        const double d2 = (c.at(0, 1)[comp] - 2.0 * f0 + c.at(0, -1)[comp]) / (h * h / 4.0);
        return (4.0 * d2 - d1) / 3.0;
    };
    const auto dxy = [&](int comp) {
        const double d1 = (c.at(2, 2)[comp] - c.at(2, -2)[comp] - c.at(-2, 2)[comp] +
                           c.at(-2, -2)[comp]) /
                          (4.0 * h * h);
        const double d2 = (c.at(1, 1)[comp] - c.at(1, -1)[comp] - c.at(-1, 1)[comp] +
                           c.at(-1, -1)[comp]) /
                          (h * h);
        return (4.0 * d2 - d1) / 3.0;
    };

    const double E = c.at(0, 0)[0], F = c.at(0, 0)[1], G = c.at(0, 0)[2];
    const double Ex = dx(0), Ey = dy(0), Eyy = dyy(0);
    const double Fx = dx(1), Fy = dy(1), Fxy = dxy(1);
    const double Gx = dx(2), Gy = dy(2), Gxx = dxx(2);

    const double disc = E * G - F * F;
    if (!(disc > 0.0)) throw Error("brioschi_curvature: EG - F^2 <= 0");

    const double m1[3][3] = {
        {-Eyy / 2.0 + Fxy - Gxx / 2.0, Ex / 2.0, Fx - Ey / 2.0},
        {Fy - Gx / 2.0, E, F},
        {Gy / 2.0, F, G},
    };
    const double m2[3][3] = {
        {0.0, Ey / 2.0, Gx / 2.0},
        {Ey / 2.0, E, F},
        {Gx / 2.0, F, G},
    };
    return (det3(m1) - det3(m2)) / (disc * disc);
}

double CurvatureGrid::x_at(int i) const {
    if (ax.count == 1) return ax.min;
    return ax.min + i * (ax.max - ax.min) / (ax.count - 1);
}

double CurvatureGrid::y_at(int j) const {
    if (ay.count == 1) return ay.min;
    return ay.min + j * (ay.max - ay.min) / (ay.count - 1);
}

CurvatureGrid curvature_grid(const TensorField& field, AxisSpec ax, AxisSpec ay) {
    if (ax.count < 1 || ay.count < 1 || !(ax.max >= ax.min) || !(ay.max >= ay.min))
        throw Error("curvature_grid: malformed axes");
    CurvatureGrid g;
    g.ax = ax;
    g.ay = ay;
    g.values.assign(static_cast<std::size_t>(ax.count) * ay.count, 0.0);
    g.defined.assign(g.values.size(), 0);
    for (int i = 0; i < ax.count; ++i)
        for (int j = 0; j < ay.count; ++j) {
            const double x = g.x_at(i), y = g.y_at(j);
            if (!field.in_domain(x, y)) continue;
            try {
                g.values[i * ay.count + j] = brioschi_curvature(field, x, y);
                g.defined[i * ay.count + j] = 1;
            } catch (const Error&) {
                // leave the marker
            }
        }
    return g;
}

void write_grid_csv(const CurvatureGrid& grid, std::ostream& out) {
    out << "x,y,K\n";
    char buf[64];
    const auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        return std::string(buf);
    };
    for (int i = 0; i < grid.ax.count; ++i)
        for (int j = 0; j < grid.ay.count; ++j) {
            out << fmt(grid.x_at(i)) << ',' << fmt(grid.y_at(j)) << ',';
            if (grid.ok(i, j))
                out << fmt(grid.value(i, j));
            else
                out << "NA";
            out << '\n';
        }
}

namespace {

// Budgeted adaptive Simpson.  The budget keeps panels whose error is stuck at
// the sampler's noise floor from subdividing forever; exhausted panels keep
// their current Richardson estimate, and the traversal order is fixed, so
// results stay deterministic.
double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth, long& budget) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    budget -= 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || budget <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, budget) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, budget);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    long budget = 40000;
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole,
                                tol * std::max(1.0, std::abs(whole)), 40, budget);
}

namespace {

struct PowerFit {
    double alpha = 0.0;  // slope in log-log
    double logc = 0.0;   // intercept
};

PowerFit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(xs.size());
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    PowerFit f;
    const double denom = n * sxx - sx * sx;
    f.alpha = (n * sxy - sx * sy) / denom;
    f.logc = (sy - f.alpha * sx) / n;
    return f;
}

// Linear fit of y against x returning slope and the relative RMS residual.
void linear_fit(const std::vector<double>& xs, const std::vector<double>& ys, double& slope,
                double& rel_resid) {
    const int n = static_cast<int>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    slope = (n * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / n;
    double ss = 0.0, ymin = ys[0], ymax = ys[0];
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - (icept + slope * xs[i]);
        ss += r * r;
        ymin = std::min(ymin, ys[i]);
        ymax = std::max(ymax, ys[i]);
    }
    const double spread = std::max(ymax - ymin, 1e-300);
    rel_resid = std::sqrt(ss / n) / spread;
}

constexpr double kAlphaBand = 0.05;
constexpr int kSamplesPerDecade = 12;
constexpr int kDecades = 3;

PathClass classify_lower(const std::function<double(double)>& speed, double a, double b) {
    const double span = b - a;
    const double eps_min = 1e-9 * span;
    std::vector<double> ts, ss;
    for (int j = 0; j <= kSamplesPerDecade * kDecades; ++j) {
        const double t = eps_min * std::pow(10.0, static_cast<double>(j) / kSamplesPerDecade);
        ts.push_back(t);
        ss.push_back(speed(a + t));
    }
    const PowerFit fit = loglog_fit(ts, ss);
    PathClass out;
    out.exponent = fit.alpha;
    // top of the fitting window; below it the sampler noise floor dominates
    const double t_mid = eps_min * 1e3;

    if (fit.alpha > -1.0 + kAlphaBand) {
        // Integrable endpoint: the fitted power covers (a, a + t_mid], the
        // quadrature (on a log grid near the endpoint) covers the rest.
        const double w = std::min(span, 1.0);
        const double inner = integrate(
            [&](double u) { return std::exp(u) * speed(a + std::exp(u)); },
            std::log(t_mid), std::log(w), 1e-10);
        double outer = 0.0;
        if (a + w < b) outer = integrate(speed, a + w, b, 1e-10);
        const double tail =
            std::exp(fit.logc) * std::pow(t_mid, fit.alpha + 1.0) / (fit.alpha + 1.0);
        out.kind = PathClass::Kind::Finite;
        out.length = inner + outer + tail;
        return out;
    }
    if (fit.alpha < -1.0 - kAlphaBand) {
        out.kind = PathClass::Kind::Divergent;
        out.note = "speed exponent below -1";
        return out;
    }
    // Borderline: test partial-integral growth against sqrt(-log eps); only
    // percent-level accuracy is needed for the fit.
    std::vector<double> sqrt_logs, partials;
    double acc = 0.0;
    double prev = t_mid;
    for (int j = 6; j >= 0; --j) {
        const double eps = eps_min * std::pow(10.0, j / 2.0);
        sqrt_logs.push_back(std::sqrt(-std::log(eps / span)));
        if (eps < prev) {
            acc += integrate(
                [&](double u) { return std::exp(u) * speed(a + std::exp(u)); },
                std::log(eps), std::log(prev), 1e-5);
            prev = eps;
        }
        partials.push_back(acc);
    }
    double slope, resid;
    linear_fit(sqrt_logs, partials, slope, resid);
    if (slope > 0.0 && resid < 0.10) {
        out.kind = PathClass::Kind::Divergent;
        out.note = "partial integrals grow like sqrt(-log eps)";
        return out;
    }
    out.kind = PathClass::Kind::Indeterminate;
    out.note = "exponent near -1 and log test inconclusive";
    return out;
}

PathClass classify_upper_infinity(const std::function<double(double)>& speed, double a,
                                  double b) {
    std::vector<double> ts, ss;
    for (int j = 0; j <= kSamplesPerDecade * kDecades; ++j) {
        const double t =
            b * std::pow(10.0, (static_cast<double>(j) / kSamplesPerDecade) - kDecades);
        if (t <= a) continue;
        ts.push_back(t);
        ss.push_back(speed(t));
    }
    if (ts.size() < 8) throw Error("path_length: sampling horizon too close to the start");
    const PowerFit fit = loglog_fit(ts, ss);
    PathClass out;
    out.exponent = fit.alpha;
    if (fit.alpha > -1.0 + kAlphaBand) {
        out.kind = PathClass::Kind::Divergent;
        out.note = "speed exponent at infinity is above -1";
        return out;
    }
    if (fit.alpha < -1.0 - kAlphaBand) {
        const double body = integrate(
            [&](double u) { return std::exp(u) * speed(std::exp(u)); }, std::log(a),
            std::log(b), 1e-10);
        const double tail =
            -std::exp(fit.logc) * std::pow(b, fit.alpha + 1.0) / (fit.alpha + 1.0);
        out.kind = PathClass::Kind::Finite;
        out.length = body + tail;
        return out;
    }
    // Borderline at infinity: test partial-integral growth against
    // sqrt(log T) over the sampling horizon.
    std::vector<double> sqrt_logs, partials;
    const double t0 = b * 1e-3;
    double acc = 0.0, prev = t0;
    for (int j = 0; j <= 6; ++j) {
        const double t = t0 * std::pow(10.0, j / 2.0);
        if (j > 0) {
            acc += integrate([&](double u) { return std::exp(u) * speed(std::exp(u)); },
                             std::log(prev), std::log(t), 1e-9);
            prev = t;
        }
        sqrt_logs.push_back(std::sqrt(std::log(std::max(t / a, 1.5))));
        partials.push_back(acc);
    }
    double slope, resid;
    linear_fit(sqrt_logs, partials, slope, resid);
    if (slope > 0.0 && resid < 0.10) {
        out.kind = PathClass::Kind::Divergent;
        out.note = "partial integrals grow like sqrt(log T)";
        return out;
    }
    out.kind = PathClass::Kind::Indeterminate;
    out.note = "exponent near -1 at infinity and log test inconclusive";
    return out;
}

}  // namespace

PathClass path_length(const std::function<double(double)>& speed, double a, double b,
                      SingularEnd end) {
    if (!(b > a)) throw Error("path_length: empty interval");
    switch (end) {
        case SingularEnd::None: {
            PathClass out;
            out.kind = PathClass::Kind::Finite;
            out.length = integrate(speed, a, b, 1e-10);
            return out;
        }
        case SingularEnd::LowerPoint:
            return classify_lower(speed, a, b);
        case SingularEnd::UpperInfinity:
            return classify_upper_infinity(speed, a, b);
    }
    throw Error("path_length: bad end");
}

}  // namespace pressmet

#include "pressmet/moduli.hpp"

#include <algorithm>
#include <cmath>

namespace pressmet {

namespace {

constexpr double kBoundaryEps = 1e-9;   // dependent lengths below this count as boundary
constexpr double kIllCondMark = 1e-6;   // near-boundary reporting threshold

double scale_of(std::span<const double> x) {
    double m = 1.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

EntropyChart::EntropyChart(DirectedEdgeSystem sys, std::optional<std::size_t> dependent_edge)
    : sys_(std::move(sys)) {
    const std::size_t k = sys_.undirected_count();
    dep_ = dependent_edge.value_or(k - 1);
    if (dep_ >= k) throw Error("EntropyChart: dependent edge out of range");
    for (std::size_t i = 0; i < k; ++i)
        if (i != dep_) free_.push_back(i);
}

EdgeWeighting EntropyChart::assemble(std::span<const double> free, double dependent) const {
    if (free.size() != free_.size()) throw Error("EntropyChart: wrong number of coordinates");
    EdgeWeighting l;
    l.lengths.resize(sys_.undirected_count());
    for (std::size_t i = 0; i < free_.size(); ++i) l.lengths[free_[i]] = free[i];
    l.lengths[dep_] = dependent;
    return l;
}

namespace {

// Pressure of -l(z) and its z-derivative -(p over the two directed copies of
// the dependent edge).
struct DepSolve {
    const EntropyChart& chart;
    std::span<const double> free;

    void eval(double z, double& value, double& deriv, PerronData* out_pd = nullptr) const {
        const EdgeWeighting l = chart.assemble(free, z);
        const Potential f = Potential::neg_length(chart.system(), l);
        PerronData pd = perron(weighted_matrix(chart.system(), f));
        value = std::log(pd.beta);
        const std::size_t dep = chart.dependent_edge();
        deriv = -(pd.p[dep] + pd.p[dep + chart.system().undirected_count()]);
        if (out_pd) *out_pd = std::move(pd);
    }
};

}  // namespace

Feasibility EntropyChart::feasible(std::span<const double> free) const {
    if (free.size() != free_.size()) throw Error("EntropyChart: wrong number of coordinates");
    for (double v : free)
        if (!(v > 0.0)) return {false, 0.0, 0.0};
    DepSolve solver{*this, free};
    double p0, d0;
    solver.eval(kBoundaryEps, p0, d0);
    if (!(p0 > 0.0)) return {false, 0.0, p0};
    // Find an upper bracket with negative pressure; if none exists below a
    // huge length (kept clear of exp underflow), the subsystem without the
    // dependent edge is still supercritical and no solution exists.
    double hi = 1.0, p_hi, d_hi;
    for (;;) {
        solver.eval(hi, p_hi, d_hi);
        if (p_hi < 0.0) break;
        hi *= 2.0;
        if (hi > 512.0) return {false, 0.0, p_hi};
    }
    // Safeguarded Newton on z, driven to the evaluation noise floor (the
    // curvature stencils differentiate this solution twice); keeps the
    // iterate with the smallest residual seen.
    double lo = kBoundaryEps;
    double z = 0.5 * (lo + hi);
    double best_z = z, best_val = std::numeric_limits<double>::infinity();
    int polish = 0;
    for (int iter = 0; iter < 80; ++iter) {
        double val, der;
        solver.eval(z, val, der);
        if (std::abs(val) < std::abs(best_val)) {
            best_val = val;
            best_z = z;
        }
        if (val > 0.0) lo = z; else hi = z;
        if (std::abs(val) <= 1e-14) ++polish;
        if (polish >= 3) break;
        double next = z - val / der;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - z) <= 4e-16 * std::max(1.0, std::abs(z))) break;
        z = next;
    }
    if (best_z <= kBoundaryEps * 2.0) return {false, best_z, 0.0};
    return {true, best_z, 0.0};
}

bool EntropyChart::is_feasible_quick(std::span<const double> free) const {
    if (free.size() != free_.size()) throw Error("EntropyChart: wrong number of coordinates");
    for (double v : free)
        if (!(v > 0.0)) return false;
    DepSolve solver{*this, free};
    double p0, d0;
    // The root exceeds 2*eps exactly when the pressure is still positive
    // there (pressure decreases in the dependent length).
    solver.eval(2.0 * kBoundaryEps, p0, d0);
    return p0 > 0.0;
}

double EntropyChart::solve_dependent(std::span<const double> free) const {
    for (double v : free)
        if (!(v > 0.0)) throw InfeasibleError("free lengths must be positive");
    const Feasibility f = feasible(free);
    if (!f.feasible)
        throw InfeasibleError("no positive dependent length exists (boundary defect " +
                              std::to_string(f.boundary_defect) + ")");
    return f.dependent_length;
}

ChartPoint EntropyChart::point(std::span<const double> free) const {
    ChartPoint pt;
    pt.free.assign(free.begin(), free.end());
    pt.dependent = solve_dependent(free);
    pt.lengths = assemble(free, pt.dependent);
    pt.pd = perron(weighted_matrix(sys_, Potential::neg_length(sys_, pt.lengths)));
    return pt;
}

double EntropyChart::gradient_fd(std::span<const double> free, std::size_t i) const {
    if (i >= free_.size()) throw Error("gradient_fd: coordinate out of range");
    const double h = 1e-5 * scale_of(free);
    const auto central = [&](double step) {
        std::vector<double> fp(free.begin(), free.end()), fm(free.begin(), free.end());
        fp[i] += step;
        fm[i] -= step;
        return (solve_dependent(fp) - solve_dependent(fm)) / (2.0 * step);
    };
    const double d1 = central(h), d2 = central(h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

std::vector<double> EntropyChart::gradient_exact(const ChartPoint& pt) const {
    const std::size_t k = sys_.undirected_count();
    const auto pair_mass = [&](std::size_t e) { return pt.pd.p[e] + pt.pd.p[e + k]; };
    const double pi_dep = pair_mass(dep_);
    std::vector<double> g(free_.size());
    for (std::size_t i = 0; i < free_.size(); ++i) g[i] = -pair_mass(free_[i]) / pi_dep;
    return g;
}

double EntropyChart::second_directional_fd(std::span<const double> free,
                                           std::span<const double> dir,
                                           bool* degraded) const {
    if (dir.size() != free_.size()) throw Error("second_directional_fd: size mismatch");
    const double h = 1e-3 * scale_of(free);
    const auto at = [&](double t) {
        std::vector<double> f(free.begin(), free.end());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += t * dir[i];
        return solve_dependent(f);
    };
    const auto ok = [&](double t) {
        std::vector<double> f(free.begin(), free.end());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += t * dir[i];
        for (double v : f)
            if (!(v > 0.0)) return false;
        return feasible(f).feasible;
    };
    if (degraded) *degraded = false;
    if (ok(h) && ok(-h)) {
        const double s0 = at(0.0);
        const double d2h = (at(h) - 2.0 * s0 + at(-h)) / (h * h);
        const double d2h2 = (at(h / 2) - 2.0 * s0 + at(-h / 2)) / (h * h / 4.0);
        return (4.0 * d2h2 - d2h) / 3.0;
    }
    // One-sided stencil toward whichever side stays feasible.
    const double sgn = ok(h) ? 1.0 : -1.0;
    if (!ok(sgn * h) || !ok(sgn * 2 * h))
        throw InfeasibleError("second_directional_fd: stencil leaves the feasible region");
    if (degraded) *degraded = true;
    return (at(2 * sgn * h) - 2.0 * at(sgn * h) + at(0.0)) / (h * h);
}

TangentVector EntropyChart::tangent(const ChartPoint& pt, std::span<const double> dir) const {
    if (dir.size() != free_.size()) throw Error("tangent: size mismatch");
    const std::vector<double> grad = gradient_exact(pt);
    TangentVector t;
    t.per_edge.assign(sys_.undirected_count(), 0.0);
    double dep_component = 0.0;
    for (std::size_t i = 0; i < free_.size(); ++i) {
        t.per_edge[free_[i]] = dir[i];
        dep_component += grad[i] * dir[i];
    }
    t.per_edge[dep_] = dep_component;
    t.lifted = Potential::lift(sys_, t.per_edge);
    return t;
}

EdgeWeighting normalize_entropy(const DirectedEdgeSystem& sys, const EdgeWeighting& l) {
    const double h = entropy(sys, l);
    EdgeWeighting out = l;
    for (double& v : out.lengths) v *= h;
    return out;
}

std::vector<TangentVector> coordinate_tangents(const EntropyChart& chart,
                                               std::span<const double> free) {
    const ChartPoint pt = chart.point(free);
    std::vector<TangentVector> out;
    for (std::size_t i = 0; i < chart.dim(); ++i) {
        TangentVector t;
        t.per_edge.assign(chart.system().undirected_count(), 0.0);
        t.per_edge[chart.free_edges()[i]] = 1.0;
        t.per_edge[chart.dependent_edge()] = chart.gradient_fd(free, i);
        t.lifted = Potential::lift(chart.system(), t.per_edge);
        const double mean = mean_against_stationary(pt.pd, t.lifted);
        if (std::abs(mean) > 1e-8)
            throw ConvergenceError("coordinate_tangents: tangency check failed");
        out.push_back(std::move(t));
    }
    return out;
}

double volume_term(const PerronData& pd, const DirectedEdgeSystem& sys,
                   const EdgeWeighting& l) {
    double v = 0.0;
    for (std::size_t e = 0; e < sys.edge_count(); ++e)
        v += l.lengths[sys.undirected_index(e)] * pd.p[e];
    return v;
}

Matrix metric_tensor_matrix(const EntropyChart& chart, std::span<const double> free,
                            MetricKind kind) {
    return metric_tensor_matrix(chart, chart.point(free), kind);
}

Matrix metric_tensor_matrix(const EntropyChart& chart, const ChartPoint& pt,
                            MetricKind kind) {
    const std::size_t d = chart.dim();
    const auto var_of = [&](std::span<const double> dir) {
        return variance_poisson(pt.pd, chart.tangent(pt, dir).lifted);
    };
    Matrix g(d, d);
    std::vector<double> diag(d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> e(d, 0.0);
        e[i] = 1.0;
        diag[i] = var_of(e);
        g(i, i) = diag[i];
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            std::vector<double> e(d, 0.0);
            e[i] = 1.0;
            e[j] = 1.0;
            const double mixed = 0.5 * (var_of(e) - diag[i] - diag[j]);
            g(i, j) = mixed;
            g(j, i) = mixed;
        }
    if (kind == MetricKind::WeilPetersson) {
        const double vol = volume_term(pt.pd, chart.system(), pt.lengths);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) g(i, j) /= vol;
    }
    return g;
}

MetricTensorSample metric_tensor(const EntropyChart& chart, std::span<const double> free,
                                 MetricKind kind) {
    MetricTensorSample s;
    s.kind = kind;
    s.dim = chart.dim();
    s.base.assign(free.begin(), free.end());
    const ChartPoint pt = chart.point(free);
    s.near_boundary = pt.dependent < kIllCondMark;
    const Matrix g = metric_tensor_matrix(chart, pt, kind);
    s.E = g(0, 0);
    if (s.dim >= 2) {
        s.F = g(0, 1);
        s.G = g(1, 1);
    }
    return s;
}

}  // namespace pressmet

#include "pressmet/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace pressmet {

namespace {

double relerr(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

// ---------------------------------------------------------------------------
// figure 8: one vertex, two loops; dependent edge e2.

CatalogEntry make_figure8() {
    UndirectedGraph g;
    g.add_edge("e1", "a", "a");
    g.add_edge("e2", "a", "a");
    DirectedEdgeSystem sys = build_directed_system(g);

    Matrix printed(4, 4);
    const int rows[4][4] = {{1, 1, 0, 1}, {1, 1, 1, 0}, {0, 1, 1, 1}, {1, 0, 1, 1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) printed(i, j) = rows[i][j];

    ClosedFormSet f;
    f.dim = 1;
    f.feasibility_margin = [](std::span<const double> q) { return q[0]; };
    f.feasible = [](std::span<const double> q) { return q[0] > 0.0; };
    f.surface = [](std::span<const double> q) {
        const double emx = std::exp(-q[0]);
        return std::log((1.0 + 3.0 * emx) / (1.0 - emx));
    };
    f.stationary = [](std::span<const double> q) {
        const double a = std::exp(q[0]);
        const double den = 6.0 * a + a * a - 3.0;
        return std::vector<double>{2.0 * a / den, (2.0 * a + a * a - 3.0) / (2.0 * den)};
    };
    f.gradient = [](std::span<const double> q) {
        const double a = std::exp(q[0]);
        return std::vector<double>{-4.0 * a / ((a - 1.0) * (a + 3.0))};
    };
    const auto speed2_p = [](double x) {
        const double a = std::exp(x);
        return 4.0 * a * (a * a + 3.0) /
               (-24.0 * a + 6.0 * a * a + 8.0 * a * a * a + a * a * a * a + 9.0);
    };
    const auto speed2_wp = [](double x) {
        const double a = std::exp(x);
        const double den = (a - 1.0) * (a + 3.0) *
                           ((2.0 * a + a * a - 3.0) * std::log((a - 1.0) / (a + 3.0)) -
                            4.0 * a * x);
        return -4.0 * a * (a * a + 3.0) / den;
    };
    f.tensor = [speed2_p, speed2_wp](std::span<const double> q,
                                     MetricKind kind) -> std::array<double, 3> {
        const double e = kind == MetricKind::Pressure ? speed2_p(q[0]) : speed2_wp(q[0]);
        return {e, 0.0, 0.0};
    };
    f.volume = [f](std::span<const double> q) {
        const auto p = f.stationary(q);
        return 2.0 * q[0] * p[0] + 2.0 * f.surface(q) * p[1];
    };

    return CatalogEntry{ExampleId::Figure8, "figure8",  g,
                        sys,                1,          printed,
                        f,                  EntropyChart(sys, 1)};
}

// ---------------------------------------------------------------------------
// belt buckle: two vertices joined by three parallel edges; dependent e3.

CatalogEntry make_belt_buckle() {
    UndirectedGraph g;
    g.add_edge("e1", "u", "w");
    g.add_edge("e2", "u", "w");
    g.add_edge("e3", "u", "w");
    DirectedEdgeSystem sys = build_directed_system(g);

    Matrix printed(6, 6);
    const int rows[6][6] = {{0, 0, 0, 0, 1, 1}, {0, 0, 0, 1, 0, 1}, {0, 0, 0, 1, 1, 0},
                            {0, 1, 1, 0, 0, 0}, {1, 0, 1, 0, 0, 0}, {1, 1, 0, 0, 0, 0}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) printed(i, j) = rows[i][j];

    ClosedFormSet f;
    f.dim = 2;
    f.feasibility_margin = [](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return 1.0 - a * b / (3.0 + a + b);
    };
    f.feasible = [m = f.feasibility_margin](std::span<const double> q) {
        return q[0] > 0.0 && q[1] > 0.0 && m(q) > 0.0;
    };
    f.surface = [](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return std::log((a + b + 2.0) / (a * b - 1.0));
    };
    const auto bigd = [](double a, double b) {
        return 3.0 * a * b + a * a * b + a * b * b - 1.0;
    };
    f.stationary = [bigd](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        const double d4 = 4.0 * bigd(a, b);
        return std::vector<double>{a * (b + 1.0) * (b + 1.0) / d4,
                                   (a + 1.0) * (a + 1.0) * b / d4,
                                   (a + b + 2.0) * (a * b - 1.0) / d4};
    };
    f.gradient = [](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        const double den = (a + b + 2.0) * (a * b - 1.0);
        return std::vector<double>{-a * (b + 1.0) * (b + 1.0) / den,
                                   -(a + 1.0) * (a + 1.0) * b / den};
    };
    const auto fwp = [](double x, double y) {
        const double a = std::exp(x), b = std::exp(y);
        return x * a * b * b + y * a * a * b + 2.0 * a * b * (x + y) +
               (-2.0 * a * b - a * a * b - a * b * b + a + b + 2.0) *
                   std::log((a * b - 1.0) / (a + b + 2.0)) +
               a * x + b * y;
    };
    f.tensor = [bigd, fwp](std::span<const double> q,
                           MetricKind kind) -> std::array<double, 3> {
        const double x = q[0], y = q[1];
        const double a = std::exp(x), b = std::exp(y);
        const double ne = a * (b + 1.0) * (b + 1.0) * (a * a * b + b + 2.0);
        const double nf = (a + 1.0) * (b + 1.0) * a * b * (-a * b + a + b + 3.0);
        const double ng = (a + 1.0) * (a + 1.0) * b * (a * b * b + a + 2.0);
        const double common = (a + b + 2.0) * (a * b - 1.0);
        if (kind == MetricKind::Pressure) {
            const double den = 2.0 * common * bigd(a, b);
            return {ne / den, nf / den, ng / den};
        }
        const double den = common * fwp(x, y);
        return {ne / den, nf / den, ng / den};
    };
    f.volume = [bigd, fwp](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return fwp(q[0], q[1]) / (2.0 * bigd(a, b));
    };
    f.curvature_p = [bigd](double x, double y) {
        const double a = std::exp(x), b = std::exp(y);
        const double a2 = a * a, b2 = b * b;
        const double n =
            5.0 + 6.0 * a + 3.0 * a2 + 6.0 * b + 3.0 * b2 + 3.0 * a * b +
            45.0 * a2 * b2 + 19.0 * a2 * a * b2 * b + 11.0 * a2 * b + 9.0 * a2 * a * b +
            3.0 * a2 * a2 * b + 11.0 * a * b2 + 33.0 * a2 * a * b2 + 8.0 * a2 * a2 * b2 +
            9.0 * a * b2 * b + 33.0 * a2 * b2 * b + 3.0 * a2 * a2 * b2 * b +
            3.0 * a * b2 * b2 + 8.0 * a2 * b2 * b2 + 3.0 * a2 * a * b2 * b2;
        return n / (4.0 * (a + 1.0) * (a + 1.0) * (b + 1.0) * (b + 1.0) * bigd(a, b));
    };
    f.diagonal_speed_sq = [](double x) {
        const double a = std::exp(x);
        return a / (2.0 * a * a - 3.0 * a + 1.0);
    };

    return CatalogEntry{ExampleId::BeltBuckle, "belt-buckle", g,
                        sys,                   2,             printed,
                        f,                     EntropyChart(sys, 2)};
}

// ---------------------------------------------------------------------------
// dumbbell: loops at both ends of a bridge; dependent e3 (the bridge).

CatalogEntry make_dumbbell() {
    UndirectedGraph g;
    g.add_edge("e1", "u", "u");
    g.add_edge("e2", "w", "w");
    g.add_edge("e3", "u", "w");
    DirectedEdgeSystem sys = build_directed_system(g);

    Matrix printed(6, 6);
    const int rows[6][6] = {{1, 0, 1, 0, 0, 0}, {0, 1, 0, 0, 0, 1}, {0, 1, 0, 0, 1, 0},
                            {0, 0, 1, 1, 0, 0}, {0, 0, 0, 0, 1, 1}, {1, 0, 0, 1, 0, 0}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) printed(i, j) = rows[i][j];

    ClosedFormSet f;
    f.dim = 2;
    f.feasibility_margin = [](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return 1.0 - (a - 1.0) * (b - 1.0) / 4.0;
    };
    f.feasible = [m = f.feasibility_margin](std::span<const double> q) {
        return q[0] > 0.0 && q[1] > 0.0 && m(q) > 0.0;
    };
    f.surface = [](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return std::log(2.0) - 0.5 * std::log((a - 1.0) * (b - 1.0));
    };
    const auto den0 = [](double a, double b) {
        return 4.0 * a * b - 3.0 * a - 3.0 * b + 2.0;
    };
    f.stationary = [den0](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        const double d = den0(a, b);
        return std::vector<double>{a * (b - 1.0) / (2.0 * d), b * (a - 1.0) / (2.0 * d),
                                   (a - 1.0) * (b - 1.0) / d};
    };
    f.gradient = [](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return std::vector<double>{-a / (2.0 * (a - 1.0)), -b / (2.0 * (b - 1.0))};
    };
    const auto fwp = [](double x, double y) {
        const double a = std::exp(x), b = std::exp(y);
        const double w = (a - 1.0) * (b - 1.0);
        return x * a * b + y * a * b - std::log(w) +
               2.0 * (-a * b + a + b) * std::log(0.5 * std::sqrt(w)) - a * x - b * y +
               std::log(4.0);
    };
    f.tensor = [den0, fwp](std::span<const double> q,
                           MetricKind kind) -> std::array<double, 3> {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        const double den =
            kind == MetricKind::Pressure ? den0(a, b) : fwp(q[0], q[1]);
        return {a * (b - 1.0) / ((a - 1.0) * den), 0.0, b * (a - 1.0) / ((b - 1.0) * den)};
    };
    f.volume = [den0, fwp](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return fwp(q[0], q[1]) / den0(a, b);
    };
    f.curvature_p = [den0](double x, double y) {
        const double a = std::exp(x), b = std::exp(y);
        return (2.0 * a * b - 1.0) / den0(a, b);
    };
    f.diagonal_speed_sq = [](double x) {
        const double a = std::exp(x);
        return a / (2.0 * a * a - 3.0 * a + 1.0);
    };

    return CatalogEntry{ExampleId::Dumbbell, "dumbbell", g,
                        sys,                 2,          printed,
                        f,                   EntropyChart(sys, 2)};
}

// ---------------------------------------------------------------------------
// three-petal rose: one vertex, three loops; dependent e3.

CatalogEntry make_rose() {
    UndirectedGraph g;
    g.add_edge("e1", "a", "a");
    g.add_edge("e2", "a", "a");
    g.add_edge("e3", "a", "a");
    DirectedEdgeSystem sys = build_directed_system(g);

    Matrix printed(6, 6);
    const int rows[6][6] = {{1, 1, 1, 0, 1, 1}, {1, 1, 1, 1, 0, 1}, {1, 1, 1, 1, 1, 0},
                            {0, 1, 1, 1, 1, 1}, {1, 0, 1, 1, 1, 1}, {1, 1, 0, 1, 1, 1}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) printed(i, j) = rows[i][j];

    ClosedFormSet f;
    f.dim = 2;
    f.feasibility_margin = [](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return a * b / (a + b + 3.0) - 1.0;
    };
    f.feasible = [m = f.feasibility_margin](std::span<const double> q) {
        return q[0] > 0.0 && q[1] > 0.0 && m(q) > 0.0;
    };
    const auto f1 = [](double a, double b) { return -a * b + a + b + 3.0; };  // < 0 inside
    const auto f2 = [](double a, double b) { return a * b + 3.0 * a + 3.0 * b + 5.0; };
    f.surface = [f1, f2](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return std::log(f2(a, b) / (-f1(a, b)));
    };
    const auto bigd = [](double a, double b) {
        return 12.0 * a * b + a * a * b * b + 6.0 * a * a * b + 6.0 * a * b * b -
               10.0 * a - 3.0 * a * a - 10.0 * b - 3.0 * b * b - 15.0;
    };
    f.stationary = [f1, f2, bigd](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        const double d = bigd(a, b);
        return std::vector<double>{2.0 * a * (b + 1.0) * (b + 1.0) / d,
                                   2.0 * (a + 1.0) * (a + 1.0) * b / d,
                                   (-f1(a, b)) * f2(a, b) / (2.0 * d)};
    };
    f.gradient = [f1, f2](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        const double den = f1(a, b) * f2(a, b);
        return std::vector<double>{4.0 * a * (b + 1.0) * (b + 1.0) / den,
                                   4.0 * (a + 1.0) * (a + 1.0) * b / den};
    };
    const auto f3 = [f1, f2](double x, double y) {
        const double a = std::exp(x), b = std::exp(y);
        return -4.0 * (x * a * b * b + y * a * a * b + 2.0 * a * b * (x + y) + a * x +
                       b * y) +
               (-4.0 * a * b + a * a * b * b + 2.0 * a * a * b + 2.0 * a * b * b -
                14.0 * a - 3.0 * a * a - 14.0 * b - 3.0 * b * b - 15.0) *
                   std::log((-f1(a, b)) / f2(a, b));
    };
    f.tensor = [f1, f2, f3, bigd](std::span<const double> q,
                                  MetricKind kind) -> std::array<double, 3> {
        const double x = q[0], y = q[1];
        const double a = std::exp(x), b = std::exp(y);
        const double ne =
            4.0 * a * (b + 1.0) * (b + 1.0) * (b + 3.0) * (a * a * b - a * a + 3.0 * b + 5.0);
        const double nf = 32.0 * (a + 1.0) * (b + 1.0) * a * b * (a + b + 2.0);
        const double ng =
            4.0 * (a + 1.0) * (a + 1.0) * (a + 3.0) * b * (a * b * b + 3.0 * a - b * b + 5.0);
        const double ff = f1(a, b) * f2(a, b);
        if (kind == MetricKind::Pressure) {
            const double den = ff * bigd(a, b);
            return {-ne / den, -nf / den, -ng / den};
        }
        const double den = ff * f3(x, y);
        return {ne / den, nf / den, ng / den};
    };
    f.volume = [f3, bigd](std::span<const double> q) {
        const double a = std::exp(q[0]), b = std::exp(q[1]);
        return -f3(q[0], q[1]) / bigd(a, b);
    };

    return CatalogEntry{ExampleId::Rose, "rose", g,  sys, 2, printed, f,
                        EntropyChart(sys, 2)};
}

}  // namespace

ExampleId example_from_string(const std::string& name) {
    if (name == "figure8") return ExampleId::Figure8;
    if (name == "belt-buckle" || name == "beltbuckle") return ExampleId::BeltBuckle;
    if (name == "dumbbell") return ExampleId::Dumbbell;
    if (name == "rose") return ExampleId::Rose;
    throw Error("unknown example '" + name +
                "' (expected figure8, belt-buckle, dumbbell, rose)");
}

std::string to_string(ExampleId id) {
    switch (id) {
        case ExampleId::Figure8: return "figure8";
        case ExampleId::BeltBuckle: return "belt-buckle";
        case ExampleId::Dumbbell: return "dumbbell";
        case ExampleId::Rose: return "rose";
    }
    throw Error("bad example id");
}

std::vector<ExampleId> all_examples() {
    return {ExampleId::Figure8, ExampleId::BeltBuckle, ExampleId::Dumbbell, ExampleId::Rose};
}

const CatalogEntry& catalog_graph(ExampleId id) {
    static const CatalogEntry fig8 = make_figure8();
    static const CatalogEntry belt = make_belt_buckle();
    static const CatalogEntry dumb = make_dumbbell();
    static const CatalogEntry rose = make_rose();
    switch (id) {
        case ExampleId::Figure8: return fig8;
        case ExampleId::BeltBuckle: return belt;
        case ExampleId::Dumbbell: return dumb;
        case ExampleId::Rose: return rose;
    }
    throw Error("bad example id");
}

double closed_form_eval(ExampleId id, const std::string& quantity,
                        std::span<const double> point) {
    const CatalogEntry& ent = catalog_graph(id);
    const ClosedFormSet& f = ent.forms;
    if (point.size() != f.dim) throw Error("closed_form_eval: wrong point dimension");
    if (!f.feasible(point)) throw InfeasibleError("closed_form_eval: infeasible point");

    if (quantity == "surface") return f.surface(point);
    if (quantity == "V") return f.volume(point);
    if (quantity == "p1" || quantity == "p2" || quantity == "p3") {
        const auto p = f.stationary(point);
        const std::size_t i = quantity[1] - '1';
        if (i >= p.size()) throw Error("closed_form_eval: unknown quantity " + quantity);
        return p[i];
    }
    if (quantity == "grad1" || quantity == "grad2") {
        const auto g = f.gradient(point);
        const std::size_t i = quantity[4] - '1';
        if (i >= g.size()) throw Error("closed_form_eval: unknown quantity " + quantity);
        return g[i];
    }
    const auto tensor_comp = [&](MetricKind k, int c) { return f.tensor(point, k)[c]; };
    if (quantity == "E_P") return tensor_comp(MetricKind::Pressure, 0);
    if (quantity == "F_P") return tensor_comp(MetricKind::Pressure, 1);
    if (quantity == "G_P") return tensor_comp(MetricKind::Pressure, 2);
    if (quantity == "E_WP") return tensor_comp(MetricKind::WeilPetersson, 0);
    if (quantity == "F_WP") return tensor_comp(MetricKind::WeilPetersson, 1);
    if (quantity == "G_WP") return tensor_comp(MetricKind::WeilPetersson, 2);
    if (quantity == "speed2_P" && f.dim == 1) return tensor_comp(MetricKind::Pressure, 0);
    if (quantity == "speed2_WP" && f.dim == 1)
        return tensor_comp(MetricKind::WeilPetersson, 0);
    if (quantity == "K_P") {
        if (!f.curvature_p) throw Error("closed_form_eval: no K_P closed form for " +
                                        ent.name);
        return f.curvature_p(point[0], point[1]);
    }
    if (quantity == "diag_speed2_P") {
        if (!f.diagonal_speed_sq)
            throw Error("closed_form_eval: no diagonal speed for " + ent.name);
        return f.diagonal_speed_sq(point[0]);
    }
    throw Error("closed_form_eval: unknown quantity '" + quantity + "' for " + ent.name);
}

std::vector<std::vector<double>> sample_feasible_points(ExampleId id, int count,
                                                        unsigned seed) {
    const CatalogEntry& ent = catalog_graph(id);
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts;
    int guard = 0;
    while (static_cast<int>(pts.size()) < count) {
        if (++guard > 100000) throw Error("sample_feasible_points: rejection stalled");
        std::vector<double> q;
        switch (id) {
            case ExampleId::Figure8: q = {uniform(rng, 0.05, 6.0)}; break;
            case ExampleId::BeltBuckle:
                q = {uniform(rng, 0.05, 3.0), uniform(rng, 0.05, 3.0)};
                break;
            case ExampleId::Dumbbell:
                q = {uniform(rng, 0.05, 1.55), uniform(rng, 0.05, 1.55)};
                break;
            case ExampleId::Rose:
                q = {uniform(rng, 0.6, 4.0), uniform(rng, 0.6, 4.0)};
                break;
        }
        // Keep a mild distance from the boundary so reference denominators
        // stay well scaled.
        if (ent.forms.feasibility_margin(q) > 0.02) pts.push_back(std::move(q));
    }
    return pts;
}

bool VerifyReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

struct Harness {
    VerifyReport rep;

    void add(const std::string& id, double expected, double got, double tol, bool pass,
             std::string detail = "") {
        rep.checks.push_back({id, expected, got, tol, pass, std::move(detail)});
    }
    void add_dev(const std::string& id, double dev, double tol, std::string detail = "") {
        add(id, 0.0, dev, tol, dev <= tol, std::move(detail));
    }
};

const char* kind_name(PathClass::Kind k) {
    switch (k) {
        case PathClass::Kind::Finite: return "finite";
        case PathClass::Kind::Divergent: return "divergent";
        case PathClass::Kind::Indeterminate: return "indeterminate";
    }
    return "?";
}

}  // namespace

VerifyReport verify(ExampleId id, const VerifyOptions& opts) {
    const CatalogEntry& ent = catalog_graph(id);
    const EntropyChart& chart = ent.chart;
    const std::size_t k = ent.system.undirected_count();
    Harness h;
    h.rep.example = ent.name;

    const double cf_tol = opts.rel_tol > 0.0 ? opts.rel_tol : 1e-9;
    const double tensor_tol = opts.rel_tol > 0.0 ? opts.rel_tol : 1e-6;

    // printed adjacency, entrywise
    int mismatches = 0;
    for (std::size_t i = 0; i < 2 * k; ++i)
        for (std::size_t j = 0; j < 2 * k; ++j)
            if (ent.system.adjacency()(i, j) != ent.printed_adjacency(i, j)) ++mismatches;
    h.add("adjacency-entrywise", 0.0, mismatches, 0.0, mismatches == 0);

    // dependent-length solve against the reference expression
    {
        const auto pts = sample_feasible_points(id, opts.surface_samples, 1001);
        double dev = 0.0;
        for (const auto& q : pts)
            dev = std::max(dev, relerr(chart.solve_dependent(q), ent.forms.surface(q)));
        h.add_dev("surface-closed-form", dev, cf_tol);
    }

    // feasibility indicator against the closed inequality
    {
        int bad = 0, tested = 0;
        const auto pts = sample_feasible_points(id, 40, 1002);
        std::mt19937_64 rng(4050);
        for (int t = 0; t < 120; ++t) {
            std::vector<double> q(ent.forms.dim);
            for (auto& v : q) v = uniform(rng, 0.05, id == ExampleId::Dumbbell ? 2.5 : 4.0);
            const double margin = ent.forms.feasibility_margin(q);
            if (std::abs(margin) < 1e-6) continue;  // boundary-degenerate, skip
            ++tested;
            if (chart.feasible(q).feasible != (margin > 0.0)) ++bad;
        }
        h.add("feasibility-closed-form", 0.0, bad, 0.0, bad == 0,
              std::to_string(tested) + " box points");
    }

    // pointwise spectral data, tangents, tensors, volume
    {
        const auto pts = sample_feasible_points(id, opts.tensor_samples, 1003);
        double p_dev = 0, rev_dev = 0, grad_dev = 0, tp_dev = 0, twp_dev = 0, v_dev = 0,
               conf_dev = 0;
        for (const auto& q : pts) {
            const ChartPoint cp = chart.point(q);
            const auto pref = ent.forms.stationary(q);
            for (std::size_t i = 0; i < k; ++i) {
                p_dev = std::max(p_dev, relerr(cp.pd.p[i], pref[i]));
                p_dev = std::max(p_dev, relerr(cp.pd.p[i + k], pref[i]));
            }
            for (std::size_t e = 0; e < k; ++e)
                rev_dev = std::max(rev_dev, std::abs(cp.pd.p[e] - cp.pd.p[e + k]));
            const auto gref = ent.forms.gradient(q);
            const auto tans = coordinate_tangents(chart, q);
            for (std::size_t i = 0; i < chart.dim(); ++i)
                grad_dev = std::max(
                    grad_dev, std::abs(tans[i].per_edge[chart.dependent_edge()] - gref[i]));
            for (const MetricKind kind : {MetricKind::Pressure, MetricKind::WeilPetersson}) {
                const MetricTensorSample s = metric_tensor(chart, q, kind);
                const auto ref = ent.forms.tensor(q, kind);
                double d = relerr(s.E, ref[0]);
                if (chart.dim() == 2) {
                    if (ref[1] != 0.0) d = std::max(d, relerr(s.F, ref[1]));
                    else d = std::max(d, std::abs(s.F));
                    d = std::max(d, relerr(s.G, ref[2]));
                }
                (kind == MetricKind::Pressure ? tp_dev : twp_dev) =
                    std::max(kind == MetricKind::Pressure ? tp_dev : twp_dev, d);
            }
            const double vol = volume_term(cp.pd, ent.system, cp.lengths);
            v_dev = std::max(v_dev, relerr(vol, ent.forms.volume(q)));
            const MetricTensorSample sp = metric_tensor(chart, q, MetricKind::Pressure);
            const MetricTensorSample sw = metric_tensor(chart, q, MetricKind::WeilPetersson);
            conf_dev = std::max({conf_dev, std::abs(sw.E * vol - sp.E),
                                 std::abs(sw.F * vol - sp.F), std::abs(sw.G * vol - sp.G)});
        }
        h.add_dev("stationary-closed-form", p_dev, cf_tol);
        h.add_dev("stationary-reversal-symmetry", rev_dev, 1e-10);
        h.add_dev("tangent-closed-form", grad_dev, 1e-8);
        h.add_dev("tensor-P-closed-form", tp_dev, tensor_tol);
        h.add_dev("tensor-WP-closed-form", twp_dev, tensor_tol);
        h.add_dev("volume-closed-form", v_dev, cf_tol);
        h.add_dev("conformality", conf_dev, 1e-10);
    }

    const auto engine_speed_sq = [&](double x, MetricKind kind) {
        if (chart.dim() == 1) {
            const double q[1] = {x};
            return metric_tensor_matrix(chart, q, kind)(0, 0);
        }
        const double q[2] = {x, x};
        const Matrix g = metric_tensor_matrix(chart, q, kind);
        return g(0, 0) + 2.0 * g(0, 1) + g(1, 1);
    };

    switch (id) {
        case ExampleId::Figure8: {
            double devp = 0, devw = 0;
            for (int i = 0; i < 60; ++i) {
                const double x = 0.05 + (6.0 - 0.05) * i / 59.0;
                const double q[1] = {x};
                devp = std::max(devp, relerr(engine_speed_sq(x, MetricKind::Pressure),
                                             ent.forms.tensor(q, MetricKind::Pressure)[0]));
                devw = std::max(devw,
                                relerr(engine_speed_sq(x, MetricKind::WeilPetersson),
                                       ent.forms.tensor(q, MetricKind::WeilPetersson)[0]));
            }
            h.add_dev("speed2-P-closed-form", devp, tensor_tol);
            h.add_dev("speed2-WP-closed-form", devw, tensor_tol);

            const double x0 = 1e-4;
            const double s2 = engine_speed_sq(x0, MetricKind::Pressure);
            h.add("small-x-leading-term", 1.0, x0 * s2, 0.01, std::abs(x0 * s2 - 1.0) <= 0.01);
            h.add("small-x-constant-term", -1.25, s2 - 1.0 / x0, 0.0125,
                  std::abs((s2 - 1.0 / x0) + 1.25) <= 0.0125);

            const auto speed = [&](MetricKind kind) {
                return [&, kind](double x) {
                    return std::sqrt(engine_speed_sq(x, kind));
                };
            };
            const PathClass c1 = path_length(speed(MetricKind::Pressure), 0.0, 1.0,
                                             SingularEnd::LowerPoint);
            h.add("probe-P-to-zero-finite", 1.0,
                  c1.kind == PathClass::Kind::Finite ? 1.0 : 0.0, 0.0,
                  c1.kind == PathClass::Kind::Finite, kind_name(c1.kind));
            const PathClass c2 = path_length(speed(MetricKind::WeilPetersson), 0.0, 1.0,
                                             SingularEnd::LowerPoint);
            h.add("probe-WP-to-zero-divergent", 1.0,
                  c2.kind == PathClass::Kind::Divergent ? 1.0 : 0.0, 0.0,
                  c2.kind == PathClass::Kind::Divergent, kind_name(c2.kind));
            const PathClass c3 = path_length(speed(MetricKind::WeilPetersson), 0.5, 20.0,
                                             SingularEnd::UpperInfinity);
            h.add("probe-WP-to-infinity-divergent", 1.0,
                  c3.kind == PathClass::Kind::Divergent ? 1.0 : 0.0, 0.0,
                  c3.kind == PathClass::Kind::Divergent, kind_name(c3.kind));
            break;
        }
        case ExampleId::BeltBuckle: {
            double diag_dev = 0;
            for (int i = 0; i < 40; ++i) {
                const double x = 0.05 + i * (1.05 - 0.05) / 39.0;
                diag_dev = std::max(diag_dev, relerr(engine_speed_sq(x, MetricKind::Pressure),
                                                     ent.forms.diagonal_speed_sq(x)));
            }
            h.add_dev("diagonal-speed2-closed-form", diag_dev, 1e-8);

            const TensorField fp = make_chart_field(chart, MetricKind::Pressure);
            const CurvatureGrid gp =
                curvature_grid(fp, {0.05, 5.0, opts.grid_resolution},
                               {0.05, 5.0, opts.grid_resolution});
            double kmin = 1e300, kmax = -1e300;
            int defined = 0;
            for (int i = 0; i < gp.ax.count; ++i)
                for (int j = 0; j < gp.ay.count; ++j)
                    if (gp.ok(i, j)) {
                        ++defined;
                        kmin = std::min(kmin, gp.value(i, j));
                        kmax = std::max(kmax, gp.value(i, j));
                    }
            h.add("K-P-positive-bounded", 1.0, kmin, 0.0, defined > 20 && kmin > 0.0,
                  "min " + std::to_string(kmin) + ", max " + std::to_string(kmax));

            double kp_dev = 0.0;
            for (const auto& q : sample_feasible_points(id, 6, 1004)) {
                const double kp = brioschi_curvature(fp, q[0], q[1]);
                kp_dev = std::max(kp_dev, relerr(kp, ent.forms.curvature_p(q[0], q[1])));
            }
            h.add_dev("K-P-closed-form", kp_dev, 1e-5);

            const TensorField fw = make_chart_field(chart, MetricKind::WeilPetersson);
            const double corner = std::log(3.0) - 1e-3;
            const double kc = brioschi_curvature(fw, corner, corner);
            h.add("K-WP-corner-limit", -0.485, kc, 0.010, std::abs(kc + 0.485) <= 0.010);

            const CurvatureGrid gw = curvature_grid(fw, {0.05, 5.0, opts.grid_resolution},
                                                    {0.05, 5.0, opts.grid_resolution});
            double wmin = 1e300;
            for (int i = 0; i < gw.ax.count; ++i)
                for (int j = 0; j < gw.ay.count; ++j)
                    if (gw.ok(i, j)) wmin = std::min(wmin, gw.value(i, j));
            h.add("K-WP-grid-min", -0.564958, wmin, 0.010,
                  wmin >= -0.575 && wmin <= -0.555);
            break;
        }
        case ExampleId::Dumbbell: {
            double fdev = 0;
            for (const auto& q : sample_feasible_points(id, opts.tensor_samples, 1005))
                fdev = std::max(fdev,
                                std::abs(metric_tensor(chart, q, MetricKind::Pressure).F));
            h.add_dev("F-P-identically-zero", fdev, 1e-10);

            const TensorField fp = make_chart_field(chart, MetricKind::Pressure);
            double kp_dev = 0, kp_min = 1e300;
            int used = 0;
            for (int i = 0; i < 10; ++i)
                for (int j = 0; j < 10; ++j) {
                    const double x = 0.15 + i * (1.30 - 0.15) / 9.0;
                    const double y = 0.15 + j * (1.30 - 0.15) / 9.0;
                    const double q[2] = {x, y};
                    if (ent.forms.feasibility_margin(q) < 0.05) continue;
                    const double kp = brioschi_curvature(fp, x, y);
                    kp_dev = std::max(kp_dev, relerr(kp, ent.forms.curvature_p(x, y)));
                    kp_min = std::min(kp_min, kp);
                    ++used;
                }
            h.add_dev("K-P-closed-form", kp_dev, 1e-5, std::to_string(used) + " grid points");
            h.add("K-P-positive", 1.0, kp_min, 0.0, kp_min > 0.0);

            double diag_dev = 0;
            for (int i = 0; i < 40; ++i) {
                const double x = 0.05 + i * (1.05 - 0.05) / 39.0;
                diag_dev = std::max(diag_dev, relerr(engine_speed_sq(x, MetricKind::Pressure),
                                                     ent.forms.diagonal_speed_sq(x)));
            }
            h.add_dev("diagonal-speed2-closed-form", diag_dev, 1e-8);

            const auto engine_speed = [&](double x) {
                return std::sqrt(engine_speed_sq(x, MetricKind::Pressure));
            };
            const auto closed_speed = [&](double x) {
                return std::sqrt(ent.forms.diagonal_speed_sq(x));
            };
            const PathClass pe = path_length(engine_speed, 0.0, 1.0, SingularEnd::LowerPoint);
            const PathClass pc = path_length(closed_speed, 0.0, 1.0, SingularEnd::LowerPoint);
            h.add("diagonal-path-finite", 1.0,
                  pe.kind == PathClass::Kind::Finite ? 1.0 : 0.0, 0.0,
                  pe.kind == PathClass::Kind::Finite, kind_name(pe.kind));
            const double ldev = std::abs(pe.length - pc.length);
            h.add("diagonal-length-agreement", pc.length, pe.length, 1e-6, ldev <= 1e-6);
            break;
        }
        case ExampleId::Rose: {
            const TensorField fw = make_chart_field(chart, MetricKind::WeilPetersson);
            const double k1 = brioschi_curvature(fw, 5.0, 15.0);
            h.add("K-WP-sign-at-5-15", 1.0, k1, 0.0, k1 > 0.0);
            const double k2 = brioschi_curvature(fw, 19.0, 19.0);
            h.add("K-WP-sign-at-19-19", -1.0, k2, 0.0, k2 < 0.0);

            const TensorField fp = make_chart_field(chart, MetricKind::Pressure);
            const CurvatureGrid gp =
                curvature_grid(fp, {0.5, 20.0, 16}, {0.5, 20.0, 16});
            double kmin = 1e300, kmax = -1e300;
            int defined = 0;
            for (int i = 0; i < gp.ax.count; ++i)
                for (int j = 0; j < gp.ay.count; ++j)
                    if (gp.ok(i, j)) {
                        ++defined;
                        kmin = std::min(kmin, gp.value(i, j));
                        kmax = std::max(kmax, gp.value(i, j));
                    }
            h.add("K-P-bracket-low", 0.15, kmin, 0.0, defined > 40 && kmin > 0.15,
                  "reference bracket fails near the feasibility boundary");
            h.add("K-P-bracket-high", 1.05, kmax, 0.0, defined > 40 && kmax < 1.05);
            break;
        }
    }

    return h.rep;
}

void print_report(const VerifyReport& report, std::ostream& out) {
    char buf[256];
    out << "verify " << report.example << "\n";
    std::snprintf(buf, sizeof buf, "%-34s %14s %14s %10s  %s\n", "check", "expected", "got",
                  "tol", "status");
    out << buf;
    int passed = 0;
    for (const auto& c : report.checks) {
        std::snprintf(buf, sizeof buf, "%-34s %14.6g %14.6g %10.3g  %s\n", c.id.c_str(),
                      c.expected, c.got, c.tolerance, c.pass ? "PASS" : "FAIL");
        out << buf;
        if (!c.detail.empty()) out << "    (" << c.detail << ")\n";
        if (c.pass) ++passed;
    }
    out << "overall: " << (report.all_pass() ? "PASS" : "FAIL") << " (" << passed << "/"
        << report.checks.size() << ")\n";
}

void write_report_csv(const VerifyReport& report, std::ostream& out) {
    out << "check,expected,got,tolerance,status\n";
    char buf[128];
    for (const auto& c : report.checks) {
        std::snprintf(buf, sizeof buf, "%s,%.15g,%.15g,%.15g,%s\n", c.id.c_str(), c.expected,
                      c.got, c.tolerance, c.pass ? "PASS" : "FAIL");
        out << buf;
    }
}

}  // namespace pressmet

#include <doctest.h>

#include <cmath>

#include "pressmet/catalog.hpp"
#include "pressmet/moduli.hpp"

using namespace pressmet;
using doctest::Approx;

namespace {

EdgeWeighting weights(std::initializer_list<double> ls) {
    EdgeWeighting w;
    w.lengths = ls;
    return w;
}

}  // namespace

TEST_CASE("normalize_entropy scales onto the surface") {
    const auto& sys = catalog_graph(ExampleId::Figure8).system;
    const EdgeWeighting n = normalize_entropy(sys, weights({1.0, 1.0}));
    CHECK(n.lengths[0] == Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(n.lengths[1] == Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(entropy(sys, n) == Approx(1.0).epsilon(1e-10));

    // idempotence / fixed point
    const EdgeWeighting nn = normalize_entropy(sys, n);
    CHECK(nn.lengths[0] == Approx(n.lengths[0]).epsilon(1e-10));
    CHECK(nn.lengths[1] == Approx(n.lengths[1]).epsilon(1e-10));
}

TEST_CASE("dependent-edge solves match hand values") {
    const double log2 = std::log(2.0), log3 = std::log(3.0);
    {
        const auto& chart = catalog_graph(ExampleId::Figure8).chart;
        const double q[1] = {log3};
        CHECK(chart.solve_dependent(q) == Approx(log3).epsilon(1e-10));
    }
    {
        const auto& chart = catalog_graph(ExampleId::Dumbbell).chart;
        const double q[2] = {log2, log2};
        CHECK(chart.solve_dependent(q) == Approx(log2).epsilon(1e-10));
    }
    {
        const auto& chart = catalog_graph(ExampleId::BeltBuckle).chart;
        const double q[2] = {log2, log2};
        CHECK(chart.solve_dependent(q) == Approx(log2).epsilon(1e-10));
    }
}

TEST_CASE("solved points sit on the entropy-one surface") {
    for (ExampleId id : all_examples()) {
        const auto& ent = catalog_graph(id);
        for (const auto& q : sample_feasible_points(id, 5, 2024)) {
            const double dep = ent.chart.solve_dependent(q);
            EdgeWeighting l;
            l.lengths = q;
            l.lengths.push_back(dep);
            CHECK(entropy(ent.system, l) == Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("feasibility matches the closed inequalities") {
    const double log2 = std::log(2.0);
    {
        const auto& chart = catalog_graph(ExampleId::BeltBuckle).chart;
        const double in[2] = {log2, log2};
        CHECK(chart.feasible(in).feasible);
        const double out[2] = {2.0, 2.0};
        const Feasibility f = chart.feasible(out);
        CHECK(!f.feasible);
        CHECK(f.boundary_defect < 0.0);
        CHECK_THROWS_AS(chart.solve_dependent(out), InfeasibleError);
    }
    {
        // the rose needs the reverse inequality
        const auto& chart = catalog_graph(ExampleId::Rose).chart;
        const double out[2] = {log2, log2};
        CHECK(!chart.feasible(out).feasible);
        const double in[2] = {2.0, 2.0};
        CHECK(chart.feasible(in).feasible);
    }
}

TEST_CASE("feasibility margin is the dependent length") {
    const auto& chart = catalog_graph(ExampleId::BeltBuckle).chart;
    const double q[2] = {0.9, 0.9};
    const Feasibility f = chart.feasible(q);
    CHECK(f.feasible);
    CHECK(f.dependent_length == Approx(chart.solve_dependent(q)).epsilon(1e-12));
}

TEST_CASE("coordinate tangents match reference derivatives") {
    {
        const auto& ent = catalog_graph(ExampleId::Figure8);
        const double x = 1.1;
        const double q[1] = {x};
        const auto tans = coordinate_tangents(ent.chart, q);
        const double a = std::exp(x);
        CHECK(tans[0].per_edge[1] ==
              Approx(-4.0 * a / ((a - 1.0) * (a + 3.0))).epsilon(1e-8));
    }
    {
        const auto& ent = catalog_graph(ExampleId::Dumbbell);
        const double x = 0.6, y = 0.8;
        const double q[2] = {x, y};
        const auto tans = coordinate_tangents(ent.chart, q);
        const double a = std::exp(x), b = std::exp(y);
        CHECK(tans[0].per_edge[2] == Approx(a / (2.0 - 2.0 * a)).epsilon(1e-8));
        CHECK(tans[1].per_edge[2] == Approx(b / (2.0 - 2.0 * b)).epsilon(1e-8));
        CHECK(tans[0].per_edge[0] == 1.0);
        CHECK(tans[0].per_edge[1] == 0.0);
    }
}

TEST_CASE("tangency holds at random feasible points") {
    for (ExampleId id : all_examples()) {
        const auto& ent = catalog_graph(id);
        for (const auto& q : sample_feasible_points(id, 20, 555)) {
            const ChartPoint pt = ent.chart.point(q);
            for (const TangentVector& t : coordinate_tangents(ent.chart, q))
                CHECK(std::abs(mean_against_stationary(pt.pd, t.lifted)) <= 1e-8);
        }
    }
}

TEST_CASE("exact chart gradient agrees with finite differences") {
    const auto& ent = catalog_graph(ExampleId::BeltBuckle);
    const double q[2] = {0.8, 1.2};
    const ChartPoint pt = ent.chart.point(q);
    const auto grad = ent.chart.gradient_exact(pt);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(grad[i] == Approx(ent.chart.gradient_fd(q, i)).epsilon(1e-8));
}

TEST_CASE("metric tensor samples against frozen values") {
    const double log2 = std::log(2.0), log3 = std::log(3.0);
    {
        // belt buckle at (log 2, log 2): E_P = 2/9
        const auto& chart = catalog_graph(ExampleId::BeltBuckle).chart;
        const double q[2] = {log2, log2};
        const MetricTensorSample s = metric_tensor(chart, q, MetricKind::Pressure);
        CHECK(s.E == Approx(2.0 / 9.0).epsilon(1e-10));
        CHECK(s.G == Approx(2.0 / 9.0).epsilon(1e-10));
    }
    {
        // figure 8 at log 3: E_P = 1/2, E_WP = 1/(2 log 3)
        const auto& chart = catalog_graph(ExampleId::Figure8).chart;
        const double q[1] = {log3};
        CHECK(metric_tensor(chart, q, MetricKind::Pressure).E ==
              Approx(0.5).epsilon(1e-10));
        CHECK(metric_tensor(chart, q, MetricKind::WeilPetersson).E ==
              Approx(1.0 / (2.0 * log3)).epsilon(1e-10));
    }
    {
        // dumbbell: F_P vanishes identically
        const auto& chart = catalog_graph(ExampleId::Dumbbell).chart;
        const double q[2] = {0.4, 1.0};
        const MetricTensorSample s = metric_tensor(chart, q, MetricKind::Pressure);
        CHECK(std::abs(s.F) <= 1e-10);
    }
}

TEST_CASE("tensor positive definiteness at sampled interior points") {
    for (ExampleId id : {ExampleId::BeltBuckle, ExampleId::Dumbbell, ExampleId::Rose}) {
        const auto& ent = catalog_graph(id);
        for (const auto& q : sample_feasible_points(id, 10, 808)) {
            for (MetricKind kind : {MetricKind::Pressure, MetricKind::WeilPetersson}) {
                const MetricTensorSample s = metric_tensor(ent.chart, q, kind);
                CHECK(s.E > 0.0);
                CHECK(s.G > 0.0);
                CHECK(s.E * s.G - s.F * s.F > 0.0);
            }
        }
    }
}

TEST_CASE("volume term: figure 8 at the symmetric point") {
    const auto& ent = catalog_graph(ExampleId::Figure8);
    const double log3 = std::log(3.0);
    const double q[1] = {log3};
    const ChartPoint pt = ent.chart.point(q);
    CHECK(volume_term(pt.pd, ent.system, pt.lengths) == Approx(log3).epsilon(1e-12));
}

TEST_CASE("volume exceeds the minimum edge length") {
    const auto& ent = catalog_graph(ExampleId::Rose);
    for (const auto& q : sample_feasible_points(ExampleId::Rose, 5, 99)) {
        const ChartPoint pt = ent.chart.point(q);
        const double v = volume_term(pt.pd, ent.system, pt.lengths);
        double lmin = pt.lengths.lengths[0];
        for (double x : pt.lengths.lengths) lmin = std::min(lmin, x);
        CHECK(v > lmin);
    }
}

TEST_CASE("conformality: WP tensor is the P tensor over the volume") {
    for (ExampleId id : all_examples()) {
        const auto& ent = catalog_graph(id);
        for (const auto& q : sample_feasible_points(id, 5, 1234)) {
            const ChartPoint pt = ent.chart.point(q);
            const double v = volume_term(pt.pd, ent.system, pt.lengths);
            const MetricTensorSample p = metric_tensor(ent.chart, q, MetricKind::Pressure);
            const MetricTensorSample w =
                metric_tensor(ent.chart, q, MetricKind::WeilPetersson);
            CHECK(std::abs(w.E * v - p.E) <= 1e-10);
            CHECK(std::abs(w.F * v - p.F) <= 1e-10);
            CHECK(std::abs(w.G * v - p.G) <= 1e-10);
        }
    }
}

TEST_CASE("stationary vector is reversal symmetric on the surface") {
    for (ExampleId id : all_examples()) {
        const auto& ent = catalog_graph(id);
        const std::size_t k = ent.system.undirected_count();
        for (const auto& q : sample_feasible_points(id, 10, 777)) {
            const ChartPoint pt = ent.chart.point(q);
            for (std::size_t e = 0; e < k; ++e)
                CHECK(std::abs(pt.pd.p[e] - pt.pd.p[e + k]) <= 1e-10);
        }
    }
}

TEST_CASE("chart second derivatives are stable under step halving") {
    const auto& ent = catalog_graph(ExampleId::BeltBuckle);
    const double q[2] = {0.7, 0.9};
    const double dir[2] = {1.0, 0.0};
    bool degraded = false;
    const double sxx = ent.chart.second_directional_fd(q, dir, &degraded);
    CHECK(!degraded);
    // compare against the reference S_xx
    const double a = std::exp(q[0]), b = std::exp(q[1]);
    const double ref = a * (b + 1.0) * (b + 1.0) * (a * a * b + b + 2.0) /
                       std::pow((a + b + 2.0) * (a * b - 1.0), 2.0);
    CHECK(sxx == Approx(ref).epsilon(1e-6));
}

TEST_CASE("near-boundary second derivatives fall back to one-sided stencils") {
    const auto& ent = catalog_graph(ExampleId::BeltBuckle);
    // just inside the corner of the feasible region
    const double c = std::log(3.0) - 5e-4;
    const double q[2] = {c, c};
    const double dir[2] = {1.0, 1.0};
    bool degraded = false;
    ent.chart.second_directional_fd(q, dir, &degraded);
    CHECK(degraded);
}

TEST_CASE("near-boundary tensor samples carry the report flag") {
    const auto& ent = catalog_graph(ExampleId::Rose);
    const double q[2] = {19.0, 19.0};  // dependent length ~ 5e-8
    const MetricTensorSample s = metric_tensor(ent.chart, q, MetricKind::Pressure);
    CHECK(s.near_boundary);
    const double q2[2] = {2.0, 2.0};
    CHECK(!metric_tensor(ent.chart, q2, MetricKind::Pressure).near_boundary);
}

TEST_CASE("metric tensor matrix is symmetric for higher-dimensional charts") {
    // four-petal rose: a 3-dimensional chart, componentwise polarization
    UndirectedGraph g;
    g.add_edge("e1", "a", "a");
    g.add_edge("e2", "a", "a");
    g.add_edge("e3", "a", "a");
    g.add_edge("e4", "a", "a");
    const EntropyChart chart(build_directed_system(g));
    const double q[3] = {1.9, 2.0, 2.1};
    const Matrix m = metric_tensor_matrix(chart, q, MetricKind::Pressure);
    REQUIRE(m.rows() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m(i, i) > 0.0);
        for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == m(j, i));
    }
}

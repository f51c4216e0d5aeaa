#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pressmet/thermo.hpp"

namespace pressmet {

enum class MetricKind { Pressure, WeilPetersson };

struct Feasibility {
    bool feasible = false;
    double dependent_length = 0.0;  // the margin; -> 0 at the boundary
    double boundary_defect = 0.0;   // pressure excess at the boundary when infeasible
};

// A tangent direction at a point of the entropy-one surface: one value per
// undirected edge, lifted to directed edges with equal values on e and its
// reversal.  sum phi(e) p(e) = 0 at the base point.
struct TangentVector {
    std::vector<double> per_edge;  // undirected, file order
    Potential lifted;
};

// Data of a point on the entropy-one surface.
struct ChartPoint {
    std::vector<double> free;     // free edge lengths (chart coordinates)
    double dependent = 0.0;       // solved dependent length
    EdgeWeighting lengths;        // full weighting in file order
    PerronData pd;                // Perron data of -l
};

struct MetricTensorSample {
    MetricKind kind = MetricKind::Pressure;
    std::size_t dim = 0;         // chart dimension (1 or 2 get E/F/G semantics)
    double E = 0.0, F = 0.0, G = 0.0;
    std::vector<double> base;    // chart coordinates of the sample
    bool near_boundary = false;  // dependent length below the ill-conditioning mark
};

// Parametrization of the entropy-one surface of a graph by all but one edge
// length: the remaining (dependent) edge length is solved from h(l) = 1.
class EntropyChart {
public:
    // dependent defaults to the last edge in file order.
    explicit EntropyChart(DirectedEdgeSystem sys,
                          std::optional<std::size_t> dependent_edge = std::nullopt);

    const DirectedEdgeSystem& system() const { return sys_; }
    std::size_t dependent_edge() const { return dep_; }
    const std::vector<std::size_t>& free_edges() const { return free_; }
    std::size_t dim() const { return free_.size(); }

    // Solves the dependent length S(free) > 0 with residual |P(-l)| <= 1e-12.
    // Throws InfeasibleError when no positive solution exists.
    double solve_dependent(std::span<const double> free) const;

    Feasibility feasible(std::span<const double> free) const;

    // Boolean-only feasibility from a single pressure evaluation at the
    // boundary margin (no root solve); used for domain probing on grids.
    bool is_feasible_quick(std::span<const double> free) const;

    // Full weighting in file order from chart coordinates.
    EdgeWeighting assemble(std::span<const double> free, double dependent) const;

    // Solves the point and its Perron data in one go.
    ChartPoint point(std::span<const double> free) const;

    // dS/dx_i by central differences (step 1e-5 * scale).
    double gradient_fd(std::span<const double> free, std::size_t i) const;

    // Exact gradient from the stationary vector: dS/dx_i = -pi_i / pi_dep
    // where pi_j sums p over the two directed copies of edge j.
    std::vector<double> gradient_exact(const ChartPoint& pt) const;

    // Second directional derivative of S along a free-coordinate direction,
    // by central differences with one Richardson level.  Falls back to a
    // one-sided stencil near the feasibility boundary and reports it.
    double second_directional_fd(std::span<const double> free, std::span<const double> dir,
                                 bool* degraded = nullptr) const;

    // The tangent vector whose free components are dir (dependent component
    // filled in from the exact gradient).
    TangentVector tangent(const ChartPoint& pt, std::span<const double> dir) const;

private:
    DirectedEdgeSystem sys_;
    std::size_t dep_ = 0;
    std::vector<std::size_t> free_;
};

// Scales a weighting onto the entropy-one surface: returns h(l) * l.
EdgeWeighting normalize_entropy(const DirectedEdgeSystem& sys, const EdgeWeighting& l);

// Coordinate tangent vectors d/dx_i (finite-difference gradient, tangency
// checked to 1e-8).
std::vector<TangentVector> coordinate_tangents(const EntropyChart& chart,
                                               std::span<const double> free);

// V(l) = sum_e l(e) p(e) over directed edges.
double volume_term(const PerronData& pd, const DirectedEdgeSystem& sys,
                   const EdgeWeighting& l);

// First fundamental form at a chart point: E = Var(d/dx), G = Var(d/dy),
// F by the polarization identity, evaluated with the exact Poisson-equation
// variance; the Weil-Petersson tensor divides by V(l).  1-D charts fill E
// only.
MetricTensorSample metric_tensor(const EntropyChart& chart, std::span<const double> free,
                                 MetricKind kind);

// Full symmetric tensor for charts of any dimension (componentwise
// polarization); catalog charts only exercise dim <= 2.
Matrix metric_tensor_matrix(const EntropyChart& chart, std::span<const double> free,
                            MetricKind kind);
Matrix metric_tensor_matrix(const EntropyChart& chart, const ChartPoint& pt,
                            MetricKind kind);

}  // namespace pressmet

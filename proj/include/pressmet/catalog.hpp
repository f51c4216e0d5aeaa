#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pressmet/geometry.hpp"
#include "pressmet/moduli.hpp"

namespace pressmet {

enum class ExampleId { Figure8, BeltBuckle, Dumbbell, Rose };

// Accepts "figure8", "belt-buckle", "dumbbell", "rose".
ExampleId example_from_string(const std::string& name);
std::string to_string(ExampleId id);
std::vector<ExampleId> all_examples();

// Reference closed forms for one example graph, evaluated at chart
// coordinates (1 value for the figure 8, 2 for the others).
struct ClosedFormSet {
    std::size_t dim = 0;
    // Signed margin: positive inside the feasible region, zero on the
    // boundary (e.g. the belt buckle uses 1 - e^{x+y}/(3 + e^x + e^y)).
    std::function<double(std::span<const double>)> feasibility_margin;
    std::function<bool(std::span<const double>)> feasible;
    std::function<double(std::span<const double>)> surface;  // dependent length
    // Stationary components p_1..p_k (second half mirrors by reversal).
    std::function<std::vector<double>(std::span<const double>)> stationary;
    std::function<std::vector<double>(std::span<const double>)> gradient;  // dS/dx_i
    std::function<std::array<double, 3>(std::span<const double>, MetricKind)> tensor;
    std::function<double(std::span<const double>)> volume;  // V(l)
    // Gaussian curvature of the pressure metric where a closed form exists.
    std::function<double(double, double)> curvature_p;  // may be empty
    // Squared speed of the diagonal path (x,...,x) under the pressure metric.
    std::function<double(double)> diagonal_speed_sq;  // may be empty
};

struct CatalogEntry {
    ExampleId id;
    std::string name;
    UndirectedGraph graph;
    DirectedEdgeSystem system;
    std::size_t dependent_edge = 0;
    Matrix printed_adjacency;
    ClosedFormSet forms;
    EntropyChart chart;
};

const CatalogEntry& catalog_graph(ExampleId id);

// Evaluates a named reference quantity at a chart point.  Quantities:
// surface, p1, p2, p3, grad1, grad2, E_P, F_P, G_P, E_WP, F_WP, G_WP, V,
// K_P, diag_speed2_P, speed2_P, speed2_WP (the last two for the figure 8).
double closed_form_eval(ExampleId id, const std::string& quantity,
                        std::span<const double> point);

struct VerifyCheck {
    std::string id;
    double expected = 0.0;
    double got = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::string example;
    std::vector<VerifyCheck> checks;
    bool all_pass() const;
};

struct VerifyOptions {
    // Overrides the closed-form comparison tolerance when positive.
    double rel_tol = 0.0;
    int surface_samples = 200;
    int tensor_samples = 20;
    int grid_resolution = 48;
};

// Compares engine output against the reference closed forms and spot values.
VerifyReport verify(ExampleId id, const VerifyOptions& opts = {});

void print_report(const VerifyReport& report, std::ostream& out);
void write_report_csv(const VerifyReport& report, std::ostream& out);

// Deterministic feasible chart points for an example (used by verify and the
// test suites).
std::vector<std::vector<double>> sample_feasible_points(ExampleId id, int count,
                                                        unsigned seed);

}  // namespace pressmet

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pressmet/graph.hpp"
#include "pressmet/linalg.hpp"

namespace pressmet {

// Edge lengths indexed by undirected edge (file order).  Strictly positive.
struct EdgeWeighting {
    std::vector<double> lengths;
};

// A potential depending on the first coordinate only: f(x) = f(x0).  Values
// are indexed by directed edge.
struct Potential {
    std::vector<double> values;

    // Lifts a per-undirected-edge vector to directed edges, equal on e and
    // its reversal.
    static Potential lift(const DirectedEdgeSystem& sys, std::span<const double> per_edge);
    // The potential -l of an edge weighting (strictly negative, reversal
    // symmetric).
    static Potential neg_length(const DirectedEdgeSystem& sys, const EdgeWeighting& l);
};

// Perron eigendata of a weighted adjacency matrix A_f:
//   beta  spectral radius,
//   v     positive left eigenvector (max component 1),
//   P     column-stochastic matrix P(i,j) = A(i,j) v(i) e^{f(i,j)} / (beta v(j)),
//   p     stationary vector, P p = p, sum 1.
struct PerronData {
    double beta = 0.0;
    std::vector<double> v;
    Matrix P;
    std::vector<double> p;
};

// Entry (i,j) of A_f: A(i,j) e^{f(i)}.
Matrix weighted_matrix(const DirectedEdgeSystem& sys, const Potential& f);

// Perron data of a nonnegative irreducible matrix.  Deterministic: shifted
// power iteration from the all-ones vector, with a dense eigensolver fallback
// when the spectral gap makes iteration stall; the stationary vector comes
// from GTH elimination.
PerronData perron(const Matrix& m);

// P(f) = log beta of the weighted matrix.
double pressure(const DirectedEdgeSystem& sys, const Potential& f);

// Convenience: pressure of -l.
double pressure_neg_length(const DirectedEdgeSystem& sys, const EdgeWeighting& l);

// (1/n) log trace(A_f^n); exact periodic-point characterization for
// first-coordinate potentials.  Log-scaled internally so large n cannot
// overflow.
double pressure_trace_oracle(const DirectedEdgeSystem& sys, const Potential& f, int n);

// The unique s with P(-s l) = 0 (safeguarded Newton with the analytic
// derivative -sum l(i) p(i), bisection fallback).  Residual |P| <= 1e-12.
double entropy(const DirectedEdgeSystem& sys, const EdgeWeighting& l);

struct CountingResult {
    std::uint64_t count = 0;   // periodic words of total length < T
    double fitted_rate = 0.0;  // least-squares slope of log count against T
};

// Counts periodic non-backtracking edge words of length sum < T by
// depth-first enumeration and fits the growth rate.  Throws BudgetError if
// the search tree exceeds max_nodes.
CountingResult entropy_counting_oracle(const DirectedEdgeSystem& sys, const EdgeWeighting& l,
                                       double T, std::uint64_t max_nodes = 80'000'000);

// m[i0,...,in] = P(i0,i1) ... P(i_{n-1},i_n) p(i_n); zero on inadmissible
// words.
double cylinder_measure(const PerronData& pd, std::span<const std::size_t> word);

// --- variance routes ------------------------------------------------------
//
// All four routes below estimate Var(phi, m_{-l}) for a mean-zero
// first-coordinate potential phi; they are kept independent so that they can
// cross-check each other.  variance_poisson is the exact linear-algebra
// evaluation used by the metric tensors.

// Second derivative of t -> P(-l + t phi) at 0 (central difference with one
// Richardson level).  Requires |sum phi p| below tolerance.
double variance_hessian(const DirectedEdgeSystem& sys, const EdgeWeighting& l,
                        const Potential& phi);

// sum_i lddot(i) p(i) for the second derivative lddot of a surface path
// (per directed edge).
double variance_surface_route(const PerronData& pd, std::span<const double> lddot);

// Differentiates the normalized cocycle g_t(i,j) = log v_t(i) - log v_t(j)
// - log beta_t + f_t(i) along a surface path t -> l_t (central difference)
// and returns sum (gdot)^2 P(i,j) p(j).  Checks that the pressure stays zero
// at the sampled t.
double variance_cocycle_route(const DirectedEdgeSystem& sys,
                              const std::function<EdgeWeighting(double)>& path);

// (1/n) sum over admissible words of length n of (phi^n)^2 m[word], by full
// enumeration with cylinder measures.
double variance_word_oracle(const DirectedEdgeSystem& sys, const PerronData& pd,
                            const Potential& phi, int n,
                            std::uint64_t max_words = 60'000'000);

// Aitken extrapolation of the word oracle over n-4, n-2, n.
double variance_word_oracle_aitken(const DirectedEdgeSystem& sys, const PerronData& pd,
                                   const Potential& phi, int n,
                                   std::uint64_t max_words = 60'000'000);

// Exact asymptotic variance of the stationary chain of pd: solves the
// Poisson equation (I - Q) u = phi for the forward kernel
// Q(i,j) = P(i,j) p(j) / p(i) and returns sum p (2 u phi - phi^2).
double variance_poisson(const PerronData& pd, const Potential& phi);

// sum_e phi(e) p(e); zero (within tolerance) characterizes tangent
// directions.
double mean_against_stationary(const PerronData& pd, const Potential& phi);

}  // namespace pressmet

#include "pressmet/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace pressmet {

namespace {

void check_weighting(const DirectedEdgeSystem& sys, const EdgeWeighting& l) {
    if (l.lengths.size() != sys.undirected_count())
        throw Error("edge weighting size mismatch");
    for (double v : l.lengths)
        if (!(v > 0.0) || !std::isfinite(v)) throw Error("edge lengths must be positive");
}

double max_row_sum(const Matrix& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j);
        r = std::max(r, s);
    }
    return r;
}

// Left-eigenpair residual ||v^T M - beta v^T||_inf.
double left_residual(const Matrix& m, const std::vector<double>& v, double beta) {
    std::vector<double> w = vecmat(v, m);
    double r = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) r = std::max(r, std::abs(w[j] - beta * v[j]));
    return r;
}

// Collatz-Wielandt bounds of beta from a positive vector: ratios of
// (v^T M) / v bracket the Perron root.
void collatz_bounds(const Matrix& m, const std::vector<double>& v, double& lo, double& hi) {
    std::vector<double> w = vecmat(v, m);
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double r = w[j] / v[j];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
}

// Full dense eigensolve of m^T; returns the eigenpair of maximal real part
// (the Perron pair for a nonnegative irreducible matrix).
bool dense_perron_eig(const Matrix& m, double& beta, std::vector<double>& v) {
    const std::size_t n = m.rows();
    Eigen::MatrixXd mt(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mt(i, j) = m(j, i);
    Eigen::EigenSolver<Eigen::MatrixXd> es(mt);
    if (es.info() != Eigen::Success) return false;
    const auto& vals = es.eigenvalues();
    int best = -1;
    double best_re = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(n); ++i)
        if (vals[i].real() > best_re) {
            best_re = vals[i].real();
            best = i;
        }
    if (best < 0) return false;
    beta = vals[best].real();
    const auto col = es.eigenvectors().col(best);
    std::complex<double> pivot = 0.0;
    double pm = -1.0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(col[i]) > pm) {
            pm = std::abs(col[i]);
            pivot = col[i];
        }
    v.assign(n, 0.0);
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = (col[i] / pivot).real();
        vmax = std::max(vmax, std::abs(v[i]));
    }
    for (double& x : v) {
        if (x < -1e-7 * vmax) return false;  // not the positive eigenvector
        x = std::max(x, 1e-300);
    }
    return true;
}

}  // namespace

Potential Potential::lift(const DirectedEdgeSystem& sys, std::span<const double> per_edge) {
    if (per_edge.size() != sys.undirected_count())
        throw Error("potential lift: size mismatch");
    Potential f;
    f.values.resize(sys.edge_count());
    for (std::size_t e = 0; e < sys.edge_count(); ++e)
        f.values[e] = per_edge[sys.undirected_index(e)];
    return f;
}

Potential Potential::neg_length(const DirectedEdgeSystem& sys, const EdgeWeighting& l) {
    check_weighting(sys, l);
    std::vector<double> neg(l.lengths.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -l.lengths[i];
    return lift(sys, neg);
}

Matrix weighted_matrix(const DirectedEdgeSystem& sys, const Potential& f) {
    const std::size_t n = sys.edge_count();
    if (f.values.size() != n) throw Error("weighted_matrix: potential size mismatch");
    const Matrix& a = sys.adjacency();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::exp(f.values[i]);
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j) * w;
    }
    return m;
}

PerronData perron(const Matrix& m) {
    const std::size_t n = m.rows();
    if (n == 0 || m.cols() != n) throw Error("perron: matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m(i, j) < 0.0) throw Error("perron: matrix must be nonnegative");
    const double rowmax = max_row_sum(m);
    if (rowmax <= 0.0) throw Error("perron: zero matrix");

    // Shifted power iteration (the shift kills period-2 oscillation on
    // bipartite systems).  Deterministic all-ones start.
    const double shift = 0.5 * rowmax;
    std::vector<double> v(n, 1.0);
    double lo = 0.0, hi = rowmax + shift;
    constexpr int kPowerCap = 2000;
    double width_checkpoint = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kPowerCap; ++iter) {
        std::vector<double> w = vecmat(v, m);
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            w[j] += shift * v[j];
            const double r = w[j] / v[j];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        const double wmax = max_abs(w);
        for (std::size_t j = 0; j < n; ++j) w[j] /= wmax;
        v = std::move(w);
        if (hi - lo <= 1e-15 * hi) break;
        // Bail out early when the bracket stagnates (tiny spectral gap or the
        // rounding floor); the fallback and polish handle those cases.
        if (iter % 50 == 49) {
            if (hi - lo > 0.25 * width_checkpoint) break;
            width_checkpoint = hi - lo;
        }
    }
    double beta = 0.5 * (hi + lo) - shift;

    double resid = left_residual(m, v, beta);
    const double target = 1e-13 * std::max(beta, 1e-6 * rowmax);
    if (resid > target) {
        // Gap-limited (or periodic in a way the shift did not cure): fall
        // back to a dense eigensolve.
        double beta_qr;
        std::vector<double> v_qr;
        if (dense_perron_eig(m, beta_qr, v_qr)) {
            const double r_qr = left_residual(m, v_qr, beta_qr);
            if (r_qr < resid) {
                beta = beta_qr;
                v = v_qr;
                resid = r_qr;
            }
        }
    }
    // Inverse-iteration polish with a shift just above beta.  The shifted
    // inverse of a nonnegative matrix is entrywise positive, so iterates stay
    // in the Perron cone.
    for (int step = 0; step < 3; ++step) {
        const double s = beta * (1.0 + 1e-12) + 1e-15 * rowmax;
        Matrix b(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                b(i, j) = (i == j ? s : 0.0) - m(j, i);  // s I - M^T
        std::vector<double> w;
        try {
            w = lu_solve(b, v);
        } catch (const ConvergenceError&) {
            break;
        }
        bool positive = true;
        for (double x : w)
            if (!(x > 0.0)) positive = false;
        if (!positive) break;
        const double wmax = *std::max_element(w.begin(), w.end());
        for (double& x : w) x /= wmax;
        double plo, phi_;
        collatz_bounds(m, w, plo, phi_);
        const double pbeta = 0.5 * (plo + phi_);
        const double presid = left_residual(m, w, pbeta);
        if (presid < resid) {
            v = std::move(w);
            beta = pbeta;
            resid = presid;
        } else {
            break;
        }
    }
    if (!(resid <= 1e-9 * std::max(beta, rowmax)))
        throw ConvergenceError("perron: eigenpair did not converge (residual " +
                               std::to_string(resid) + ")");

    const double vmax = *std::max_element(v.begin(), v.end());
    PerronData pd;
    pd.beta = beta;
    pd.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) pd.v[i] = v[i] / vmax;

    pd.P = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m(i, j) != 0.0) pd.P(i, j) = m(i, j) * pd.v[i] / (beta * pd.v[j]);
    // Column stochasticity is the per-component form of the eigen residual;
    // a violation here means v carries no usable relative accuracy.
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += pd.P(i, j);
        if (!(std::abs(col - 1.0) <= 1e-9))
            throw ConvergenceError("perron: column-stochastic normalization failed");
    }

    // Stationary vector of the column-stochastic P = stationary distribution
    // of the row-stochastic P^T; GTH keeps small components accurate.
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = pd.P(j, i);
    pd.p = gth_stationary(r);
    for (double x : pd.p)
        if (!(x > 0.0)) throw ConvergenceError("perron: stationary component not positive");
    return pd;
}

double pressure(const DirectedEdgeSystem& sys, const Potential& f) {
    return std::log(perron(weighted_matrix(sys, f)).beta);
}

double pressure_neg_length(const DirectedEdgeSystem& sys, const EdgeWeighting& l) {
    return pressure(sys, Potential::neg_length(sys, l));
}

double pressure_trace_oracle(const DirectedEdgeSystem& sys, const Potential& f, int n) {
    if (n < 1) throw Error("pressure_trace_oracle: n must be >= 1");
    Matrix af = weighted_matrix(sys, f);
    const double s = max_row_sum(af);
    if (s <= 0.0) throw Error("pressure_trace_oracle: zero matrix");
    const std::size_t dim = af.rows();
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) af(i, j) /= s;
    Matrix pw = af;
    for (int t = 1; t < n; ++t) pw = matmul(pw, af);
    double trace = 0.0;
    for (std::size_t i = 0; i < dim; ++i) trace += pw(i, i);
    if (trace <= 0.0) return -std::numeric_limits<double>::infinity();
    return (std::log(trace) + n * std::log(s)) / n;
}

namespace {

// Pressure of -s*l together with its s-derivative -sum l p.
void pressure_at_scale(const DirectedEdgeSystem& sys, const std::vector<double>& lengths,
                       double s, double& value, double& deriv) {
    std::vector<double> scaled(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) scaled[i] = -s * lengths[i];
    const Potential f = Potential::lift(sys, scaled);
    const PerronData pd = perron(weighted_matrix(sys, f));
    value = std::log(pd.beta);
    double d = 0.0;
    for (std::size_t e = 0; e < sys.edge_count(); ++e)
        d -= lengths[sys.undirected_index(e)] * pd.p[e];
    deriv = d;
}

}  // namespace

double entropy(const DirectedEdgeSystem& sys, const EdgeWeighting& l) {
    check_weighting(sys, l);
    const double max_l = *std::max_element(l.lengths.begin(), l.lengths.end());
    double lo = 1e-12;
    double p_lo, p_hi, d;
    pressure_at_scale(sys, l.lengths, lo, p_lo, d);
    if (!(p_lo > 0.0)) throw ConvergenceError("entropy: bracket failure");
    // Expand the upper end by doubling; this keeps evaluations close to the
    // root, where the weighted matrix is well scaled.
    double hi = 1.0;
    for (;;) {
        pressure_at_scale(sys, l.lengths, hi, p_hi, d);
        if (p_hi < 0.0) break;
        hi *= 2.0;
        if (hi * max_l > 600.0) throw ConvergenceError("entropy: bracket failure");
    }

    double s = 0.5 * (lo + hi);
    int polish = 0;
    for (int iter = 0; iter < 200; ++iter) {
        double val, der;
        pressure_at_scale(sys, l.lengths, s, val, der);
        if (val > 0.0) lo = s; else hi = s;
        if (std::abs(val) <= 1e-13) ++polish;
        if (polish >= 3) return s;
        double next = s - val / der;  // der < 0 always
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-16 * std::abs(s) && polish > 0) return next;
        s = next;
    }
    throw ConvergenceError("entropy: Newton did not converge");
}

namespace {

bool is_primitive(const std::vector<std::size_t>& word, std::size_t len) {
    for (std::size_t d = 1; d <= len / 2; ++d) {
        if (len % d != 0) continue;
        bool periodic = true;
        for (std::size_t i = d; i < len && periodic; ++i)
            if (word[i] != word[i - d]) periodic = false;
        if (periodic) return false;
    }
    return true;
}

struct CycleCounter {
    const DirectedEdgeSystem& sys;
    const std::vector<double>& ldir;
    std::vector<double> thresholds;   // window points, ascending
    std::vector<std::uint64_t> counts;  // counts of cycles with length < threshold
    std::uint64_t nodes = 0, max_nodes;
    std::vector<std::size_t> word;
    std::size_t start = 0;

    void dfs(std::size_t last, double len, std::size_t depth) {
        if (++nodes > max_nodes) throw BudgetError("entropy_counting_oracle: budget exceeded");
        if (sys.adjacency()(last, start) != 0.0 && is_primitive(word, depth)) {
            for (std::size_t j = 0; j < thresholds.size(); ++j)
                if (len < thresholds[j]) ++counts[j];
        }
        for (std::size_t nxt : sys.successors()[last]) {
            const double nl = len + ldir[nxt];
            if (nl >= thresholds.back()) continue;
            word[depth] = nxt;
            dfs(nxt, nl, depth + 1);
        }
    }
};

}  // namespace

CountingResult entropy_counting_oracle(const DirectedEdgeSystem& sys, const EdgeWeighting& l,
                                       double T, std::uint64_t max_nodes) {
    check_weighting(sys, l);
    if (!(T > 0.0)) throw Error("entropy_counting_oracle: T must be positive");
    const double min_l = *std::min_element(l.lengths.begin(), l.lengths.end());
    if (T / min_l > 1e5) throw BudgetError("entropy_counting_oracle: word depth too large");

    std::vector<double> ldir(sys.edge_count());
    for (std::size_t e = 0; e < sys.edge_count(); ++e)
        ldir[e] = l.lengths[sys.undirected_index(e)];

    constexpr int kWindow = 8;
    CycleCounter cc{sys, ldir, {}, {}, 0, max_nodes, {}, 0};
    for (int j = 0; j < kWindow; ++j)
        cc.thresholds.push_back(T * (0.5 + 0.5 * j / (kWindow - 1)));
    cc.counts.assign(kWindow, 0);
    cc.word.resize(static_cast<std::size_t>(T / min_l) + 2);
    for (std::size_t e = 0; e < sys.edge_count(); ++e) {
        cc.start = e;
        cc.word[0] = e;
        cc.dfs(e, ldir[e], 1);
    }

    CountingResult res;
    res.count = cc.counts.back();
    // Least-squares slope of log N against the window thresholds.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    for (int j = 0; j < kWindow; ++j) {
        if (cc.counts[j] == 0) continue;
        const double x = cc.thresholds[j], y = std::log(static_cast<double>(cc.counts[j]));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++npts;
    }
    if (npts >= 2) {
        const double denom = npts * sxx - sx * sx;
        if (denom > 0.0) res.fitted_rate = (npts * sxy - sx * sy) / denom;
    }
    return res;
}

double cylinder_measure(const PerronData& pd, std::span<const std::size_t> word) {
    if (word.empty()) throw Error("cylinder_measure: empty word");
    const std::size_t n = pd.p.size();
    for (std::size_t i : word)
        if (i >= n) throw Error("cylinder_measure: index out of range");
    double m = 1.0;
    for (std::size_t t = 0; t + 1 < word.size(); ++t) {
        const double step = pd.P(word[t], word[t + 1]);
        if (step == 0.0) return 0.0;
        m *= step;
    }
    return m * pd.p[word.back()];
}

double mean_against_stationary(const PerronData& pd, const Potential& phi) {
    if (phi.values.size() != pd.p.size()) throw Error("mean: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pd.p.size(); ++i) s += phi.values[i] * pd.p[i];
    return s;
}

namespace {

void require_tangent(const PerronData& pd, const Potential& phi) {
    const double scale = std::max(1.0, max_abs(phi.values));
    if (std::abs(mean_against_stationary(pd, phi)) > 1e-7 * scale)
        throw Error("variance: direction is not tangent (nonzero mean)");
}

}  // namespace

double variance_hessian(const DirectedEdgeSystem& sys, const EdgeWeighting& l,
                        const Potential& phi) {
    check_weighting(sys, l);
    const PerronData pd = perron(weighted_matrix(sys, Potential::neg_length(sys, l)));
    require_tangent(pd, phi);

    const auto pressure_at = [&](double t) {
        Potential f = Potential::neg_length(sys, l);
        for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += t * phi.values[i];
        return std::log(perron(weighted_matrix(sys, f)).beta);
    };
    double lmax = 0.0;
    for (double x : l.lengths) lmax = std::max(lmax, x);
    const double h = 1e-3 * std::max(1.0, lmax);
    const double p0 = pressure_at(0.0);
    const double d2h = (pressure_at(h) - 2.0 * p0 + pressure_at(-h)) / (h * h);
    const double d2h2 =
        (pressure_at(h / 2) - 2.0 * p0 + pressure_at(-h / 2)) / (h * h / 4.0);
    return (4.0 * d2h2 - d2h) / 3.0;
}

double variance_surface_route(const PerronData& pd, std::span<const double> lddot) {
    if (lddot.size() != pd.p.size()) throw Error("variance_surface_route: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pd.p.size(); ++i) s += lddot[i] * pd.p[i];
    return s;
}

double variance_cocycle_route(const DirectedEdgeSystem& sys,
                              const std::function<EdgeWeighting(double)>& path) {
    const EdgeWeighting l0 = path(0.0);
    check_weighting(sys, l0);
    const std::size_t n = sys.edge_count();
    const PerronData pd0 = perron(weighted_matrix(sys, Potential::neg_length(sys, l0)));
    if (std::abs(std::log(pd0.beta)) > 1e-7)
        throw Error("variance_cocycle_route: base point is off the surface");

    double lmax = 0.0;
    for (double x : l0.lengths) lmax = std::max(lmax, x);
    const double h = 1e-5 * std::max(1.0, lmax);

    // g(i,j) = log v(i) - log v(j) - log beta + f(i) on admissible pairs.
    const auto cocycle = [&](double t, Matrix& g) {
        const EdgeWeighting lt = path(t);
        const Potential f = Potential::neg_length(sys, lt);
        const PerronData pd = perron(weighted_matrix(sys, f));
        if (std::abs(std::log(pd.beta)) > 1e-7)
            throw Error("variance_cocycle_route: pressure drift along the path");
        g = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (sys.adjacency()(i, j) != 0.0)
                    g(i, j) = std::log(pd.v[i]) - std::log(pd.v[j]) - std::log(pd.beta) +
                              f.values[i];
    };
    Matrix gp, gm;
    cocycle(h, gp);
    cocycle(-h, gm);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sys.adjacency()(i, j) != 0.0) {
                const double gdot = (gp(i, j) - gm(i, j)) / (2.0 * h);
                var += gdot * gdot * pd0.P(i, j) * pd0.p[j];
            }
    return var;
}

namespace {

struct WordSummer {
    const DirectedEdgeSystem& sys;
    const PerronData& pd;
    const Potential& phi;
    int n;
    std::uint64_t nodes = 0, max_words;
    double total = 0.0;

    // Accumulates cylinder measures incrementally: prefix carries the product
    // of P entries along the word so far.
    void dfs(std::size_t last, double phisum, double prefix, int depth) {
        if (++nodes > max_words) throw BudgetError("variance_word_oracle: budget exceeded");
        if (depth == n) {
            total += phisum * phisum * prefix * pd.p[last];
            return;
        }
        for (std::size_t nxt : sys.successors()[last])
            dfs(nxt, phisum + phi.values[nxt], prefix * pd.P(last, nxt), depth + 1);
    }
};

}  // namespace

double variance_word_oracle(const DirectedEdgeSystem& sys, const PerronData& pd,
                            const Potential& phi, int n, std::uint64_t max_words) {
    if (n < 1) throw Error("variance_word_oracle: n must be >= 1");
    if (phi.values.size() != sys.edge_count()) throw Error("variance_word_oracle: size mismatch");
    WordSummer ws{sys, pd, phi, n, 0, max_words, 0.0};
    for (std::size_t e = 0; e < sys.edge_count(); ++e) ws.dfs(e, phi.values[e], 1.0, 1);
    return ws.total / n;
}

double variance_word_oracle_aitken(const DirectedEdgeSystem& sys, const PerronData& pd,
                                   const Potential& phi, int n, std::uint64_t max_words) {
    if (n < 5) throw Error("variance_word_oracle_aitken: n must be >= 5");
    const double a1 = variance_word_oracle(sys, pd, phi, n - 4, max_words);
    const double a2 = variance_word_oracle(sys, pd, phi, n - 2, max_words);
    const double a3 = variance_word_oracle(sys, pd, phi, n, max_words);
    const double denom = (a3 - a2) - (a2 - a1);
    if (std::abs(denom) < 1e-14 * std::max(1.0, std::abs(a3))) return a3;
    return a3 - (a3 - a2) * (a3 - a2) / denom;
}

double variance_poisson(const PerronData& pd, const Potential& phi) {
    const std::size_t n = pd.p.size();
    if (phi.values.size() != n) throw Error("variance_poisson: size mismatch");
    require_tangent(pd, phi);
    const double mean = mean_against_stationary(pd, phi);
    std::vector<double> phi0(n);
    for (std::size_t i = 0; i < n; ++i) phi0[i] = phi.values[i] - mean;

    // B = I - Q + 1 p^T with Q(i,j) = P(i,j) p(j) / p(i).
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = (i == j ? 1.0 : 0.0) - pd.P(i, j) * pd.p[j] / pd.p[i] + pd.p[j];
    const std::vector<double> u = lu_solve(b, phi0);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += pd.p[i] * phi0[i] * (2.0 * u[i] - phi0[i]);
    return var;
}

}  // namespace pressmet

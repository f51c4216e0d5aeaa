#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pressmet/catalog.hpp"
#include "pressmet/geometry.hpp"
#include "pressmet/moduli.hpp"
#include "pressmet/thermo.hpp"

namespace {

using namespace pressmet;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

// Parses "id=value,id=value,..." against the graph's edge ids.  Formatting
// problems are usage errors.
std::vector<std::pair<std::string, double>> parse_assignments(const std::string& text) {
    std::vector<std::pair<std::string, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("bad assignment '" + item + "' (expected id=value)");
        const std::string id = item.substr(0, eq);
        const std::string num = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != num.size() || num.empty())
            throw CLI::ValidationError("bad numeric value in '" + item + "'");
        out.emplace_back(id, v);
    }
    if (out.empty()) throw CLI::ValidationError("no assignments given");
    return out;
}

AxisSpec parse_axis(const std::string& text) {
    AxisSpec ax;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &ax.min, &ax.max, &ax.count) != 3 ||
        ax.count < 1)
        throw CLI::ValidationError("bad axis '" + text + "' (expected min:max:count)");
    return ax;
}

ExampleId parse_example(const std::string& name) {
    try {
        return example_from_string(name);
    } catch (const Error& e) {
        throw CLI::ValidationError(e.what());
    }
}

struct GraphSource {
    std::string example;
    std::string file;

    bool is_example() const { return !example.empty(); }

    DirectedEdgeSystem system() const {
        if (is_example()) return catalog_graph(parse_example(example)).system;
        return build_directed_system(UndirectedGraph::parse_file(file));
    }
};

std::size_t edge_index_checked(const DirectedEdgeSystem& sys, const std::string& id) {
    try {
        return sys.graph().edge_index(id);
    } catch (const Error& e) {
        throw CLI::ValidationError(e.what());
    }
}

EdgeWeighting weighting_from(const DirectedEdgeSystem& sys, const std::string& lengths) {
    EdgeWeighting w;
    w.lengths.assign(sys.undirected_count(), 0.0);
    std::vector<char> seen(sys.undirected_count(), 0);
    for (const auto& [id, v] : parse_assignments(lengths)) {
        const std::size_t i = edge_index_checked(sys, id);
        w.lengths[i] = v;
        seen[i] = 1;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw CLI::ValidationError("missing length for edge '" + sys.undirected_id(i) +
                                       "'");
    return w;
}

EntropyChart chart_from(const GraphSource& src, const std::string& dep_id) {
    DirectedEdgeSystem sys = src.system();
    std::optional<std::size_t> dep;
    if (!dep_id.empty()) dep = edge_index_checked(sys, dep_id);
    else if (src.is_example())
        dep = catalog_graph(parse_example(src.example)).dependent_edge;
    return EntropyChart(std::move(sys), dep);
}

std::vector<double> free_coords_from(const EntropyChart& chart, const std::string& text) {
    const auto assigns = parse_assignments(text);
    std::vector<double> free(chart.dim(), 0.0);
    std::vector<char> seen(chart.dim(), 0);
    for (const auto& [id, v] : assigns) {
        const std::size_t e = edge_index_checked(chart.system(), id);
        bool found = false;
        for (std::size_t i = 0; i < chart.dim(); ++i)
            if (chart.free_edges()[i] == e) {
                free[i] = v;
                seen[i] = 1;
                found = true;
            }
        if (!found)
            throw CLI::ValidationError("edge '" + id +
                                       "' is not a free coordinate of the chart");
    }
    for (std::size_t i = 0; i < chart.dim(); ++i)
        if (!seen[i])
            throw CLI::ValidationError("missing free coordinate for edge '" +
                                       chart.system().undirected_id(chart.free_edges()[i]) +
                                       "'");
    return free;
}

MetricKind metric_from(const std::string& name) {
    if (name == "P") return MetricKind::Pressure;
    if (name == "WP") return MetricKind::WeilPetersson;
    throw CLI::ValidationError("--metric must be P or WP");
}

int run(int argc, char** argv) {
    CLI::App app{"thermodynamic geometry of metric graphs"};
    app.require_subcommand(1);

    std::string example, graph_file, lengths, free_text, dep_id, metric = "P", out_path,
                grid_text, toward = "zero";
    double rel_tol = 0.0;

    const auto add_source = [&](CLI::App* cmd) {
        auto* ex = cmd->add_option("--example", example, "built-in example graph");
        auto* gf = cmd->add_option("--graph", graph_file, "graph file");
        ex->excludes(gf);
    };
    const auto source = [&]() -> GraphSource {
        if (example.empty() && graph_file.empty())
            throw CLI::ValidationError("one of --example/--graph is required");
        return GraphSource{example, graph_file};
    };

    auto* c_entropy = app.add_subcommand("entropy", "entropy of a metric graph");
    add_source(c_entropy);
    c_entropy->add_option("--lengths", lengths, "edge lengths id=value,...")->required();

    auto* c_norm = app.add_subcommand("normalize", "scale lengths to entropy one");
    add_source(c_norm);
    c_norm->add_option("--lengths", lengths, "edge lengths id=value,...")->required();

    auto* c_surface = app.add_subcommand("surface", "solve the dependent edge length");
    add_source(c_surface);
    c_surface->add_option("--free", free_text, "free lengths id=value,...")->required();
    c_surface->add_option("--dep", dep_id, "dependent edge id (default: last edge)");

    auto* c_tensor = app.add_subcommand("tensor", "first fundamental form at a point");
    add_source(c_tensor);
    c_tensor->add_option("--free", free_text, "free lengths id=value,...")->required();
    c_tensor->add_option("--dep", dep_id, "dependent edge id");
    c_tensor->add_option("--metric", metric, "P or WP");

    auto* c_curv = app.add_subcommand("curvature", "Gaussian curvature grid to CSV");
    add_source(c_curv);
    c_curv->add_option("--metric", metric, "P or WP");
    c_curv->add_option("--grid", grid_text, "x0:x1:nx,y0:y1:ny")->required();
    c_curv->add_option("--out", out_path, "output CSV path")->required();
    c_curv->add_option("--dep", dep_id, "dependent edge id");

    auto* c_probe = app.add_subcommand("probe", "completeness probe along the diagonal");
    add_source(c_probe);
    c_probe->add_option("--metric", metric, "P or WP");
    c_probe->add_option("--toward", toward, "zero or infinity");
    c_probe->add_option("--dep", dep_id, "dependent edge id");

    auto* c_verify = app.add_subcommand("verify", "check an example against references");
    c_verify->add_option("--example", example, "built-in example graph")->required();
    c_verify->add_option("--out", out_path, "also write the report CSV here");
    c_verify->add_option("--rel-tol", rel_tol, "override the closed-form tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (c_entropy->parsed()) {
            const DirectedEdgeSystem sys = source().system();
            std::cout << fmt(entropy(sys, weighting_from(sys, lengths))) << "\n";
        } else if (c_norm->parsed()) {
            const DirectedEdgeSystem sys = source().system();
            const EdgeWeighting n = normalize_entropy(sys, weighting_from(sys, lengths));
            for (std::size_t i = 0; i < n.lengths.size(); ++i)
                std::cout << (i ? "," : "") << sys.undirected_id(i) << "=" << fmt(n.lengths[i]);
            std::cout << "\n";
        } else if (c_surface->parsed()) {
            const EntropyChart chart = chart_from(source(), dep_id);
            std::cout << fmt(chart.solve_dependent(free_coords_from(chart, free_text)))
                      << "\n";
        } else if (c_tensor->parsed()) {
            const EntropyChart chart = chart_from(source(), dep_id);
            const auto free = free_coords_from(chart, free_text);
            if (chart.dim() <= 2) {
                const MetricTensorSample s = metric_tensor(chart, free, metric_from(metric));
                if (chart.dim() == 1)
                    std::cout << "E=" << fmt(s.E) << "\n";
                else
                    std::cout << "E=" << fmt(s.E) << " F=" << fmt(s.F) << " G=" << fmt(s.G)
                              << "\n";
            } else {
                // higher-dimensional charts: print the full tensor matrix
                const Matrix g = metric_tensor_matrix(chart, free, metric_from(metric));
                for (std::size_t i = 0; i < g.rows(); ++i) {
                    for (std::size_t j = 0; j < g.cols(); ++j)
                        std::cout << (j ? " " : "") << fmt(g(i, j));
                    std::cout << "\n";
                }
            }
        } else if (c_curv->parsed()) {
            const EntropyChart chart = chart_from(source(), dep_id);
            if (chart.dim() != 2)
                throw Error("curvature needs a 2-dimensional chart");
            const auto comma = grid_text.find(',');
            if (comma == std::string::npos) throw Error("--grid needs two axes");
            const AxisSpec ax = parse_axis(grid_text.substr(0, comma));
            const AxisSpec ay = parse_axis(grid_text.substr(comma + 1));
            const TensorField field = make_chart_field(chart, metric_from(metric));
            const CurvatureGrid grid = curvature_grid(field, ax, ay);
            std::ofstream out(out_path);
            if (!out) throw Error("cannot open output file '" + out_path + "'");
            write_grid_csv(grid, out);
        } else if (c_probe->parsed()) {
            const EntropyChart chart = chart_from(source(), dep_id);
            const MetricKind kind = metric_from(metric);
            const auto speed = [&](double x) {
                const std::vector<double> q(chart.dim(), x);
                const Matrix g = metric_tensor_matrix(chart, q, kind);
                double s = 0.0;
                for (std::size_t i = 0; i < chart.dim(); ++i)
                    for (std::size_t j = 0; j < chart.dim(); ++j) s += g(i, j);
                return std::sqrt(s);
            };
            PathClass pc;
            if (toward == "zero")
                pc = path_length(speed, 0.0, 1.0, SingularEnd::LowerPoint);
            else if (toward == "infinity")
                pc = path_length(speed, 0.5, 20.0, SingularEnd::UpperInfinity);
            else
                throw CLI::ValidationError("--toward must be zero or infinity");
            switch (pc.kind) {
                case PathClass::Kind::Finite:
                    std::cout << "finite length=" << fmt(pc.length) << "\n";
                    break;
                case PathClass::Kind::Divergent:
                    std::cout << "divergent exponent=" << fmt(pc.exponent) << "\n";
                    break;
                case PathClass::Kind::Indeterminate:
                    std::cout << "indeterminate (" << pc.note << ")\n";
                    return 1;
            }
        } else if (c_verify->parsed()) {
            VerifyOptions opts;
            opts.rel_tol = rel_tol;
            const VerifyReport rep = verify(parse_example(example), opts);
            print_report(rep, std::cout);
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                if (!out) throw Error("cannot open output file '" + out_path + "'");
                write_report_csv(rep, out);
            }
            if (!rep.all_pass()) return 1;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }

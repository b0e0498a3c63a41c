#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "liepnm/cli.hpp"
#include "liepnm/error.hpp"
#include "liepnm/lie.hpp"
#include "liepnm/rng.hpp"
#include "liepnm/tmg.hpp"

namespace liepnm::cli {

namespace {

std::string sample_name(const char* prefix, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_sample_%03zu", prefix, k);
    return buf;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index k) {
    return std::vector<double>(m.col(k).data(), m.col(k).data() + m.rows());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

Plot xy_plot(const pipeline::PosteriorEnsemble& e) {
    Plot p;
    double y_lo = e.y.minCoeff(), y_hi = e.y.maxCoeff();
    for (Eigen::Index k = 0; k < e.y.cols(); ++k) p.samples.push_back({column(e.x, k), column(e.y, k)});
    for (double xb : {e.chart.x0(), e.chart.x_T()}) p.envelope.push_back({{xb, xb}, {y_lo, y_hi}});
    return p;
}

}  // namespace

int cmd_solve(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    try {
        rc = load_config(config_path);
        std::filesystem::create_directories(rc.out_dir);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "config error: output directory: " << e.what() << '\n';
        return kUsage;
    }

    try {
        const pipeline::PosteriorEnsemble e = pipeline::solve(rc.solve);
        const auto S = static_cast<Eigen::Index>(e.sample_count());

        Table rs{{"r"}, {e.r_grid}};
        for (Eigen::Index k = 0; k < S; ++k) {
            rs.header.push_back(sample_name("s", static_cast<std::size_t>(k)));
            rs.columns.push_back(column(e.s, k));
        }
        write_csv(rc.out_dir / "ensemble_rs.csv", rs);

        Table xy{{"x"}, {e.x_grid}};
        for (Eigen::Index k = 0; k < S; ++k) {
            xy.header.push_back(sample_name("y", static_cast<std::size_t>(k)));
            xy.columns.push_back(column(e.y_on_x, k));
        }
        write_csv(rc.out_dir / "ensemble_xy.csv", xy);

        write_csv(rc.out_dir / "summary.csv",
                  Table{{"x", "mean", "q05", "q95"}, {e.x_grid, e.mean_y(), e.quantile_y(0.05), e.quantile_y(0.95)}});

        if (rc.plot) write_text(rc.out_dir / "posterior.svg", render_svg(xy_plot(e)));

        out << "wrote " << S << " posterior samples (rho = " << e.rho << ") to " << rc.out_dir.string() << '\n';
        return kOk;
    } catch (const StageError& e) {
        err << "error in stage '" << e.stage() << "': " << e.what() << '\n';
        return kRuntime;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

int cmd_verify_symmetry(std::string_view family, std::string_view F_text, std::ostream& out, std::ostream& err) {
    charts::OdeFamily fam;
    try {
        if (family == "first_order") {
            fam = charts::OdeFamily::first_order(expr::parse(F_text.empty() ? "1/r + r" : F_text), 1.0, 5.0);
        } else if (family == "second_order") {
            if (!F_text.empty()) throw ConfigError("--F is only used by the first_order family");
            fam = charts::OdeFamily::second_order(5.0, 10.0, -10.0, 1.0);
        } else {
            throw ConfigError("unknown family '" + std::string(family) + "' (expected first_order or second_order)");
        }
    } catch (const Error& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        const auto gens = fam.generators();
        for (std::size_t i = 0; i < gens.size(); ++i) out << "X" << i + 1 << " = " << gens[i].to_string() << '\n';

        if (gens.size() > 1) {
            out << "commutators:\n";
            for (std::size_t i = 0; i < gens.size(); ++i)
                for (std::size_t j = i + 1; j < gens.size(); ++j) {
                    const auto c = lie::span_coefficients(lie::commutator(gens[i], gens[j]), gens);
                    out << "  [X" << i + 1 << ",X" << j + 1 << "] = "
                        << (c ? lie::format_combination(*c) : std::string("(outside the algebra)")) << '\n';
                }
            out << "solvable orderings:\n";
            for (std::size_t i = 0; i < gens.size(); ++i)
                for (std::size_t j = i + 1; j < gens.size(); ++j) {
                    const auto br = lie::span_coefficients(lie::commutator(gens[i], gens[j]), gens[i], gens[j]);
                    if (!br) continue;
                    const auto pair = lie::solvable_2d_order(gens[i], gens[j]);
                    const auto nc = lie::span_coefficients(pair.normal, gens);
                    const auto cc = lie::span_coefficients(pair.complement, gens);
                    out << "  span{X" << i + 1 << ",X" << j + 1 << "}: normal " << lie::format_combination(*nc)
                        << ", complement " << lie::format_combination(*cc) << ", lambda = " << pair.lambda << '\n';
                }
        } else {
            out << "one-dimensional algebra (abelian)\n";
        }

        // On-surface jets with the top derivative left to the ODE.
        CounterRng rng(20240601);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<lie::Jet> jets;
        const lie::OdeSurface surface = fam.surface();
        while (jets.size() < 100) {
            lie::Jet j;
            if (fam.kind == charts::FamilyKind::FirstOrderHomogeneous) {
                j.x = 1.0 + 4.0 * unit(rng);
                j.y = j.x * (0.5 + 2.0 * unit(rng));
            } else {
                j.x = 1.0 + 9.0 * unit(rng);
                j.y = -1.0 - 9.0 * unit(rng);
                j.derivs = {0.1 + 1.9 * unit(rng)};
            }
            try {
                (void)surface.solve_top(j);
            } catch (const DomainError&) {
                continue;
            }
            jets.push_back(std::move(j));
        }

        double worst = 0.0;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            const double r = lie::symmetry_residual(surface, gens[i], jets);
            worst = std::max(worst, r);
            out << "residual X" << i + 1 << ": " << r << '\n';
        }
        const bool ok = worst < 1e-6;
        out << (ok ? "admitted" : "NOT admitted") << " (max residual " << worst << ", threshold 1e-6)\n";
        return ok ? kOk : kRuntime;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

namespace {

tmg::TruncatedGaussianProblem read_constraints(const std::filesystem::path& path, std::size_t dims) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read constraint file '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream cells(line);
        std::vector<double> row;
        std::string tok;
        bool numeric = true;
        while (cells >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (row.empty() && numeric) continue;
        if (!numeric) {
            if (rows.empty()) continue;  // header
            throw ConfigError("constraint file line " + std::to_string(line_no) + ": not numeric");
        }
        if (row.size() != dims + 1)
            throw ConfigError("constraint file line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dims + 1) + " values (f_1..f_dims, g), got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("constraint file has no rows");
    Eigen::MatrixXd F(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dims));
    Eigen::VectorXd g(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < dims; ++k) F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        g(static_cast<Eigen::Index>(i)) = rows[i][dims];
    }
    return tmg::TruncatedGaussianProblem(F, g);
}

}  // namespace

int cmd_sample_tmg(const SampleTmgOptions& options, std::ostream& out, std::ostream& err) {
    std::optional<tmg::TruncatedGaussianProblem> problem;
    try {
        if (options.dims < 1) throw ConfigError("dims must be at least 1");
        if (options.count < 1) throw ConfigError("count must be at least 1");
        problem.emplace(read_constraints(options.constraints, options.dims));
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }

    try {
        tmg::SampleOptions so;
        so.burn_in = options.burn_in;
        so.travel_time = options.travel_time;
        const tmg::Chain chain = tmg::sample(*problem, options.count, options.seed, so);

        Table t;
        const auto d = static_cast<Eigen::Index>(options.dims);
        for (Eigen::Index k = 0; k < d; ++k) {
            t.header.push_back("z_" + std::to_string(k + 1));
            std::vector<double> col;
            col.reserve(chain.samples.size());
            for (const auto& s : chain.samples) col.push_back(s(k));
            t.columns.push_back(std::move(col));
        }
        write_csv(options.output, t);

        out << "samples: " << chain.samples.size() << " (seed " << options.seed << ", burn-in " << options.burn_in
            << ")\n";
        for (Eigen::Index k = 0; k < d; ++k) {
            const auto& col = t.columns[static_cast<std::size_t>(k)];
            double mean = 0.0;
            for (double v : col) mean += v;
            mean /= static_cast<double>(col.size());
            double var = 0.0;
            for (double v : col) var += (v - mean) * (v - mean);
            var /= static_cast<double>(col.size() > 1 ? col.size() - 1 : 1);
            out << "z_" << k + 1 << ": mean = " << format_double(mean) << ", variance = " << format_double(var)
                << '\n';
        }
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

int cmd_export_plot(const std::filesystem::path& ensemble_csv, const std::filesystem::path& svg_path,
                    const std::optional<std::filesystem::path>& config_path, std::ostream& out, std::ostream& err) {
    Plot plot;
    try {
        const Table t = read_csv(ensemble_csv);
        if (t.header.empty() || (t.header[0] != "x" && t.header[0] != "r"))
            throw ConfigError("first column must be 'x' or 'r'");
        const bool xy = t.header[0] == "x";
        const std::string prefix = xy ? "y_sample_" : "s_sample_";
        const std::string ref_name = xy ? "y_reference" : "s_reference";
        plot.x_label = xy ? "x" : "r";
        plot.y_label = xy ? "y" : "s";
        for (std::size_t j = 1; j < t.header.size(); ++j) {
            if (t.header[j].rfind(prefix, 0) == 0)
                plot.samples.push_back({t.columns[0], t.columns[j]});
            else if (t.header[j] == ref_name)
                plot.reference = Curve{t.columns[0], t.columns[j]};
        }
        if (plot.samples.empty() || t.rows() == 0) throw ConfigError("ensemble has no sample curves");

        if (config_path) {
            const RunConfig rc = load_config(*config_path);
            const charts::CanonicalChart chart = rc.solve.family.chart();
            if (xy) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (const auto& c : plot.samples)
                    for (double v : c.y) {
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                for (double xb : {chart.x0(), chart.x_T()}) plot.envelope.push_back({{xb, xb}, {lo, hi}});
            } else {
                Curve lower{t.columns[0], {}}, upper{t.columns[0], {}};
                for (double r : t.columns[0]) {
                    lower.y.push_back(chart.s_lower(r));
                    upper.y.push_back(chart.s_upper(r));
                }
                plot.envelope = {lower, upper};
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "input error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        write_text(svg_path, render_svg(plot));
        out << "wrote " << svg_path.string() << " (" << plot.samples.size() << " curves)\n";
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

}  // namespace liepnm::cli

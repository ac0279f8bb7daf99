// Command-line surface for the canonical-system library: generators emit
// Hamiltonian JSON on stdout, analysis commands read one from stdin (or
// --in FILE) and print JSON results; grids go to CSV files.
#include <complex>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chs/io.hpp"
#include "chs/krein.hpp"
#include "chs/models.hpp"
#include "chs/szego.hpp"

using nlohmann::json;
using namespace chs;

namespace {

json cjson(cdouble z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

// parses "re", "rei", "re+imi" forms such as "1.5", "2i", "1-0.5i", "i"
cdouble parse_complex(std::string s) {
    if (s.empty()) throw ParseError("empty complex literal");
    if (s == "i") return {0, 1};
    if (s == "-i") return {0, -1};
    if (s.back() == 'i') {
        s.pop_back();
        // split at the last +/- that is not an exponent sign or leading sign
        for (std::size_t k = s.size(); k-- > 1;) {
            if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                const std::string re = s.substr(0, k);
                std::string im = s.substr(k);
                if (im == "+") im = "1";
                if (im == "-") im = "-1";
                return {std::stod(re), std::stod(im)};
            }
        }
        return {0.0, s.empty() || s == "+" ? 1.0 : s == "-" ? -1.0 : std::stod(s)};
    }
    return {std::stod(s), 0.0};
}

PiecewiseHamiltonian read_hamiltonian(const std::string& path) {
    return hamiltonian_from_json(read_file(path));
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) return {a};
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = a + (b - a) * i / (n - 1.0);
    return xs;
}

void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
    if (path.empty()) return;
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    write_csv(os, header, rows);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical Hamiltonian systems: Weyl functions, entropies, factorizations"};
    app.require_subcommand(1);

    std::string in_path = "-";
    std::string csv_path;
    std::string z_str = "0+1i";

    auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("--in", in_path, "Hamiltonian JSON file ('-' = stdin)");
    };

    // --- generators ---
    auto* c_ex1 = app.add_subcommand("example1", "rank-1 plateau example");
    double L = 1;
    c_ex1->add_option("--L", L, "plateau length")->required();

    auto* c_ex2 = app.add_subcommand("example2", "off-diagonal Dirac example");
    double eps = 0.1;
    int T = 100;
    c_ex2->add_option("--eps", eps)->required();
    c_ex2->add_option("--T", T)->required();

    auto* c_ex3 = app.add_subcommand("example3", "diagonal Dirac (cosh/sinh) example");
    std::vector<double> v_len, v_val;
    c_ex3->add_option("--len", v_len, "cell lengths")->required();
    c_ex3->add_option("--val", v_val, "cell potential values")->required();

    auto* c_dirac = app.add_subcommand("dirac", "Hamiltonian of a Dirac potential JSON");
    add_input(c_dirac);

    // --- analysis ---
    auto* c_validate = app.add_subcommand("validate", "classify a Hamiltonian");
    add_input(c_validate);

    auto* c_transfer = app.add_subcommand("transfer", "transfer matrix M(t,z)");
    double t_arg = 1.0;
    add_input(c_transfer);
    c_transfer->add_option("--t", t_arg)->required();
    c_transfer->add_option("--z", z_str)->required();

    auto* c_weyl = app.add_subcommand("weyl", "Titchmarsh-Weyl value m_r(z)");
    double r_arg = 0.0;
    add_input(c_weyl);
    c_weyl->add_option("--z", z_str)->required();
    c_weyl->add_option("--r", r_arg);

    auto* c_density = app.add_subcommand("density", "spectral density on a grid");
    double xmin = -5, xmax = 5;
    int npts = 200;
    add_input(c_density);
    c_density->add_option("--xmin", xmin);
    c_density->add_option("--xmax", xmax);
    c_density->add_option("--n", npts);
    c_density->add_option("--csv", csv_path, "grid CSV (x, w)");

    auto* c_entropy = app.add_subcommand("entropy", "entropy K_H(0)");
    std::string method = "closed";
    add_input(c_entropy);
    c_entropy->add_option("--method", method)->check(CLI::IsMember({"closed", "quad"}));
    c_entropy->add_option("--csv", csv_path, "diagnostic grid (theta, log w(tan theta))");

    auto* c_ktilde = app.add_subcommand("ktilde", "oscillation functional");
    add_input(c_ktilde);
    c_ktilde->add_option("--csv", csv_path, "window terms CSV (n, term)");

    auto* c_profile = app.add_subcommand("profile", "entropy profile at cell boundaries");
    add_input(c_profile);
    c_profile->add_option("--csv", csv_path, "profile CSV (r, K)");

    auto* c_fact = app.add_subcommand("factorize", "(q,v1,v2)-factorization");
    std::string fmethod = "oscillation";
    double grid_step = 1.0 / 64, fd_step = 1e-5;
    add_input(c_fact);
    c_fact->add_option("--method", fmethod)->check(CLI::IsMember({"oscillation", "spectral"}));
    c_fact->add_option("--grid-step", grid_step);
    c_fact->add_option("--fd-step", fd_step);

    auto* c_verify = app.add_subcommand("verify-fact", "check a factorization against H");
    std::string fact_path;
    add_input(c_verify);
    c_verify->add_option("--fact", fact_path, "factorization JSON file")->required();

    auto* c_krein = app.add_subcommand("krein-density", "density via the Krein system");
    double ell_opt = -1;
    add_input(c_krein);
    c_krein->add_option("--ell", ell_opt, "truncation point (default: factorization extent)");
    c_krein->add_option("--xmin", xmin);
    c_krein->add_option("--xmax", xmax);
    c_krein->add_option("--n", npts);
    c_krein->add_option("--csv", csv_path, "density CSV (x, w, pstar_sq)");

    auto* c_audit = app.add_subcommand("audit-theorem1", "entropy vs oscillation audit");
    add_input(c_audit);

    auto* c_kaudit = app.add_subcommand("krein-audit", "|P*(i)| path and Lemma 7.4 suprema");
    add_input(c_kaudit);
    c_kaudit->add_option("--csv", csv_path, "path CSV (r, |P*(i)|, |P*_d(i)|)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*c_ex1) {
            std::cout << hamiltonian_to_json(example1(L).h) << "\n";
        } else if (*c_ex2) {
            const Example2 e = example2(eps, T);
            if (e.regime_warning)
                std::cerr << "warning: outside the eps^2*T -> infinity regime\n";
            std::cout << hamiltonian_to_json(e.h) << "\n";
        } else if (*c_ex3) {
            if (v_len.size() != v_val.size()) throw ParseError("--len/--val size mismatch");
            std::vector<std::pair<double, double>> cells;
            for (std::size_t i = 0; i < v_len.size(); ++i) cells.push_back({v_len[i], v_val[i]});
            std::cout << hamiltonian_to_json(example3(cells).h) << "\n";
        } else if (*c_dirac) {
            const json j = json::parse(read_file(in_path));
            DiracPotential v;
            for (const auto& jc : j.at("cells")) {
                const auto m = jc.at("v");
                v.cells.push_back({jc.at("len").get<double>(),
                                   Mat2R{m[0][0], m[0][1], m[1][0], m[1][1]}});
            }
            std::cout << hamiltonian_to_json(dirac_to_hamiltonian(v)) << "\n";
        } else if (*c_validate) {
            const auto res = validate(read_hamiltonian(in_path));
            json out;
            out["class"] = res.cls == HamiltonianClass::ValidNontrivialSingular
                               ? "valid-nontrivial-singular"
                               : res.cls == HamiltonianClass::Trivial ? "trivial" : "invalid";
            if (!res.reason.empty()) out["reason"] = res.reason;
            std::cout << out.dump() << "\n";
            if (res.cls == HamiltonianClass::Invalid) {
                std::cerr << "precondition violated: " << res.reason << "\n";
                return 2;
            }
        } else if (*c_transfer) {
            const auto tm = transfer(read_hamiltonian(in_path), t_arg, parse_complex(z_str));
            json out;
            out["t"] = tm.t;
            out["z"] = cjson(tm.z);
            out["M"] = {{cjson(tm.m.a11), cjson(tm.m.a12)}, {cjson(tm.m.a21), cjson(tm.m.a22)}};
            out["det"] = cjson(tm.m.det());
            std::cout << out.dump() << "\n";
        } else if (*c_weyl) {
            const auto h = read_hamiltonian(in_path);
            const cdouble m = weyl_at_r(h, r_arg, parse_complex(z_str));
            std::cout << json{{"m", cjson(m)}}.dump() << "\n";
        } else if (*c_density) {
            const auto h = read_hamiltonian(in_path);
            const auto xs = linspace(xmin, xmax, npts);
            const auto w = spectral_density(h, xs);
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < npts; ++i) rows.push_back({xs[i], w[i]});
            emit_csv(csv_path, {"x", "w"}, rows);
            if (csv_path.empty()) {
                json out = json::array();
                for (int i = 0; i < npts; ++i) out.push_back({{"x", xs[i]}, {"w", w[i]}});
                std::cout << out.dump() << "\n";
            } else {
                std::cout << json{{"points", npts}, {"csv", csv_path}}.dump() << "\n";
            }
        } else if (*c_entropy) {
            const auto h = read_hamiltonian(in_path);
            const EntropyReport rep =
                method == "closed" ? entropy_closed_report(h) : entropy_quadrature(h);
            json out{{"K", rep.K}, {"logI", rep.logI}, {"J", rep.J}, {"method", method}};
            if (method == "quad") out["error_estimate"] = rep.quadrature_error_estimate;
            if (!csv_path.empty()) {
                const double half = std::asin(1.0);
                std::vector<std::vector<double>> rows;
                for (int i = 1; i < 2000; ++i) {
                    const double theta = -half + 2.0 * half * i / 2000.0;
                    rows.push_back({theta, log_spectral_density_at(h, std::tan(theta))});
                }
                emit_csv(csv_path, {"theta", "log_w"}, rows);
                out["csv"] = csv_path;
            }
            std::cout << out.dump() << "\n";
        } else if (*c_ktilde) {
            const auto rep = ktilde(read_hamiltonian(in_path));
            std::vector<std::vector<double>> rows;
            for (const auto& t : rep.terms) rows.push_back({double(t.n), t.value});
            emit_csv(csv_path, {"n", "term"}, rows);
            std::cout << json{{"ktilde", rep.total}, {"n_cutoff", rep.n_cutoff}}.dump() << "\n";
        } else if (*c_profile) {
            const auto h = read_hamiltonian(in_path);
            const auto prof = entropy_profile(h, h.boundaries());
            json out = json::array();
            std::vector<std::vector<double>> rows;
            for (const auto& [r, k] : prof) {
                out.push_back({{"r", r}, {"K", k}});
                rows.push_back({r, k});
            }
            emit_csv(csv_path, {"r", "K"}, rows);
            std::cout << out.dump() << "\n";
        } else if (*c_fact) {
            const auto h = read_hamiltonian(in_path);
            const FactorizationTriple f = fmethod == "oscillation"
                                              ? factorize_oscillation(h, grid_step)
                                              : factorize_spectral(h, fd_step, grid_step);
            std::cout << factorization_to_json(f) << "\n";
        } else if (*c_verify) {
            const auto h = read_hamiltonian(in_path);
            const auto f = factorization_from_json(read_file(fact_path));
            const auto rep = verify_factorization(h, f);
            json out{{"residual_h", rep.residual_h},
                     {"residual_det_g", rep.residual_det_g},
                     {"residual_det_q", rep.residual_det_q},
                     {"min_eig_q", rep.min_eig_q},
                     {"residual_sym_v", rep.residual_sym_v},
                     {"residual_ode", rep.residual_ode},
                     {"norms", {{"q", rep.norms.q}, {"v1", rep.norms.v1}, {"v2", rep.norms.v2}}}};
            std::cout << out.dump() << "\n";
        } else if (*c_krein) {
            const auto h = read_hamiltonian(in_path);
            const FactorizationTriple f = factorize_oscillation(h);
            const double ell = ell_opt > 0 ? ell_opt : f.extent;
            const auto xs = linspace(xmin, xmax, npts);
            const auto w = density_via_pstar(h, f, ell, xs);
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < npts; ++i) rows.push_back({xs[i], w[i], 1.0 / w[i]});
            emit_csv(csv_path, {"x", "w", "pstar_sq"}, rows);
            std::cout << json{{"points", npts}, {"ell", ell}}.dump() << "\n";
        } else if (*c_kaudit) {
            const auto h = read_hamiltonian(in_path);
            const auto f = factorize_oscillation(h);
            const auto n = normalize_l18(h, f);
            const auto audit = l44_bounds_audit(n.h, n.f);
            if (!csv_path.empty()) {
                const auto c = krein_coefficients(n.f);
                const auto cd = dual_coefficients(c);
                std::vector<double> rec;
                for (double t = 0; t <= n.f.extent; t += 0.125) rec.push_back(t);
                const auto pa = propagate_krein(c, cdouble(0, 1), n.f.extent, krein_init(c),
                                                1.0 / 4096, rec);
                const auto pb = propagate_krein(cd, cdouble(0, 1), n.f.extent, krein_init(cd),
                                                1.0 / 4096, rec);
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < pa.states.size() && i < pb.states.size(); ++i)
                    rows.push_back({pa.states[i].r, std::abs(pa.states[i].pstar),
                                    std::abs(pb.states[i].pstar)});
                emit_csv(csv_path, {"r", "abs_pstar_i", "abs_pstar_dual_i"}, rows);
            }
            std::cout << json{{"sup_pstar_i", audit.sup_pstar_i},
                              {"sup_product", audit.sup_product},
                              {"a", audit.a_diag},
                              {"gronwall_ok", audit.gronwall_ok},
                              {"norms",
                               {{"q", audit.norms.q},
                                {"v1", audit.norms.v1},
                                {"v2", audit.norms.v2}}}}
                             .dump()
                      << "\n";
        } else if (*c_audit) {
            const auto a = theorem1_audit(read_hamiltonian(in_path));
            std::cout << json{{"K_m", a.K_m},
                              {"ktilde", a.ktilde},
                              {"ratio", a.ratio},
                              {"exp_ratio", a.exp_ratio},
                              {"finiteness_violated", a.finiteness_violated}}
                             .dump()
                      << "\n";
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const QuadratureNotConverged& e) {
        std::cerr << "did not converge: " << e.what() << "\n";
        return 3;
    } catch (const StepUnderflow& e) {
        std::cerr << "did not converge: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

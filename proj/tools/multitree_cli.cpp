// Command-line front end: constructions, capacity certificates, the
// verification suites and the counterexample reproductions.
//
// Reports go to --out (JSON) and/or --csv; without --out the JSON lands on
// stdout. Timings and a verdict summary go to stderr so that report files
// stay byte-identical across runs with the same parameters and seed. Exit
// code 0 iff every verdict in the run passed.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multitree/capacity.hpp"
#include "multitree/config.hpp"
#include "multitree/constructions.hpp"
#include "multitree/experiments.hpp"
#include "multitree/measure.hpp"
#include "multitree/report.hpp"

namespace {

using namespace multitree;

struct CommonFlags {
    std::string out_path;
    std::string csv_path;
    std::string config_path;
    double tol = 2.5e-7;
    int budget = 100000;
    int matrix_free = -1;
};

SolverOptions solver_options(const CommonFlags& flags) {
    SolverOptions opts;
    opts.kkt_tol = flags.tol;
    opts.max_sweeps = flags.budget;
    opts.matrix_free = flags.matrix_free;
    return opts;
}

void emit_reports(const CommonFlags& flags, const std::vector<ExperimentReport>& reports) {
    const auto json = reports_json(reports);
    if (!flags.out_path.empty()) {
        std::ofstream out(flags.out_path);
        if (!out) throw std::runtime_error("cannot write " + flags.out_path);
        out << json.dump(2) << '\n';
    } else {
        std::cout << json.dump(2) << '\n';
    }
    if (!flags.csv_path.empty()) {
        std::ofstream csv(flags.csv_path);
        if (!csv) throw std::runtime_error("cannot write " + flags.csv_path);
        write_csv_header(csv);
        for (const auto& r : reports) write_csv(csv, r);
    }
    for (const auto& r : reports) {
        std::cerr << r.id << ": " << r.runtime_ms << " ms";
        for (const auto& [k, v] : r.verdicts)
            std::cerr << "  " << k << '=' << (v ? "pass" : "FAIL");
        std::cerr << '\n';
    }
}

int verdict_exit_code(const std::vector<ExperimentReport>& reports) {
    for (const auto& r : reports)
        if (!r.all_pass()) return 1;
    return 0;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

nlohmann::ordered_json certificate_json(const CapacityCertificate& cert) {
    nlohmann::ordered_json j;
    j["cap"] = cert.cap_value;
    j["duality_gap"] = cert.duality_gap;
    j["primal_energy"] = cert.primal_energy;
    j["support_size"] = cert.equilibrium.atom_count();
    j["constraint_count"] = cert.constraint_count;
    j["min_potential_on_E"] = cert.min_potential_on_E;
    j["max_potential_on_support"] = cert.max_potential_on_support;
    j["lower_bound_only"] = cert.lower_bound_only;
    j["converged"] = cert.converged;
    j["sweeps"] = cert.sweeps;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete potential theory engine on dyadic trees and bi-trees"};
    app.require_subcommand(1);

    CommonFlags flags;
    app.add_option("--out", flags.out_path, "write the JSON report here (default: stdout)");
    app.add_option("--csv", flags.csv_path, "also write the CSV report here");
    app.add_option("--config", flags.config_path, "verdict threshold config (JSON)");
    app.add_option("--tol", flags.tol, "solver KKT tolerance");
    app.add_option("--budget", flags.budget, "solver sweep budget");
    app.add_flag_function(
        "--matrix-free", [&flags](std::int64_t) { flags.matrix_free = 1; },
        "never cache the kernel matrix");

    // construct ------------------------------------------------------------
    auto* construct = app.add_subcommand("construct", "dump a construction to text formats");
    construct->require_subcommand(1);

    int nu_s = 2;
    auto* c_nu = construct->add_subcommand("nu", "the corner measure nu");
    c_nu->add_option("--s", nu_s, "scale: log n = 2^s")->required();

    int f_s = 2;
    auto* c_f = construct->add_subcommand("f", "the rectangle family F");
    c_f->add_option("--s", f_s, "scale: log n = 2^s")->required();

    std::uint64_t naz_n = 64, naz_m = 4;
    bool dump_atoms = false, dump_families = false;
    auto* c_naz = construct->add_subcommand("nazarov", "the Nazarov measure and families");
    c_naz->add_option("--n", naz_n, "n (power of two)")->required();
    c_naz->add_option("--M", naz_m, "M: 2^M atoms of mass 2^-M")->required();
    c_naz->add_flag("--dump-atoms", dump_atoms, "dump the measure (default)");
    c_naz->add_flag("--dump-families", dump_families, "dump the trimmed families F_ji");

    // cap -------------------------------------------------------------------
    std::string cap_boxes_path;
    bool cap_tree_exact = false;
    auto* cap_cmd = app.add_subcommand("cap", "capacity certificate for a box set");
    cap_cmd->add_option("--boxes", cap_boxes_path, "box set file")->required();
    cap_cmd->add_flag("--tree-exact", cap_tree_exact,
                      "use the exact series-parallel recursion (d=1 only)");

    // verify ----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "randomized verification suites");
    verify->require_subcommand(1);

    TreePositiveParams tree_params;
    auto* v_tree = verify->add_subcommand("tree", "positive theory on T");
    v_tree->add_option("--seed", tree_params.seed);
    v_tree->add_option("--depth", tree_params.depth);
    v_tree->add_option("--trials", tree_params.trials);
    v_tree->add_option("--pairs", tree_params.capacitary_pairs);
    v_tree->add_option("--grid", tree_params.level_grid);

    D1DiagnosticParams d1_params;
    auto* v_d1 = verify->add_subcommand("d1", "majorization constant diagnostic");
    v_d1->add_option("--seed", d1_params.seed);
    v_d1->add_option("--depth", d1_params.depth);
    v_d1->add_option("--trials", d1_params.trials);
    v_d1->add_option("--lambda-ratio", d1_params.lambda_over_delta);

    // cex ---------------------------------------------------------------------
    auto* cex = app.add_subcommand("cex", "counterexample reproductions");
    cex->require_subcommand(1);

    std::vector<int> se_scales{2, 3};
    auto* cex_se = cex->add_subcommand("small-energy", "small energy majorization fails");
    cex_se->add_option("--s", se_scales, "scales")->delimiter(',');

    std::vector<int> pe_scales{2, 3};
    auto* cex_pe = cex->add_subcommand("partial-energy", "first-power partial energy fails");
    cex_pe->add_option("--s", pe_scales, "scales")->delimiter(',');

    double naz_x = 4.0;
    std::vector<std::uint64_t> naz_ms{4, 6, 8};
    auto* cex_naz = cex->add_subcommand("nazarov", "partial energy unbounded in M");
    cex_naz->add_option("--x", naz_x, "x = n 2^-M (power of two >= 4)");
    cex_naz->add_option("--M", naz_ms, "M values")->delimiter(',');

    // levelset ------------------------------------------------------------------
    int ls_s = 3;
    auto* ls_cmd = app.add_subcommand("levelset", "level-set capacity anomaly");
    ls_cmd->add_option("--s", ls_s, "scale");

    // smp-diagnostic --------------------------------------------------------------
    int smp_s = 3;
    std::string smp_measure_path;
    std::vector<double> smp_eps;
    auto* smp_cmd = app.add_subcommand("smp-diagnostic", "surrogate maximum principle constants");
    smp_cmd->add_option("--s", smp_s, "use the corner measure at this scale");
    smp_cmd->add_option("--measure", smp_measure_path, "or a measure file");
    smp_cmd->add_option("--eps", smp_eps, "epsilon grid")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        const VerdictConfig cfg = load_verdict_config_or_default(flags.config_path);
        const SolverOptions opts = solver_options(flags);

        if (c_nu->parsed()) {
            std::ostringstream os;
            write_measure(os, build_nu(SemParams(nu_s)));
            write_text(flags.out_path, os.str());
            return 0;
        }
        if (c_f->parsed()) {
            std::ostringstream os;
            write_boxset(os, build_F(SemParams(f_s)));
            write_text(flags.out_path, os.str());
            return 0;
        }
        if (c_naz->parsed()) {
            const NazarovParams p(naz_n, naz_m);
            std::ostringstream os;
            if (dump_families) {
                for (std::uint64_t j = 0; j < (std::uint64_t{1} << p.m); ++j)
                    for (std::uint64_t i = 0; i < p.logn(); ++i) {
                        os << "# F_" << j << '_' << i << '\n';
                        visit_nazarov_family(p, j, i,
                                             [&os](const DyadicBox& b, std::uint64_t,
                                                   std::uint64_t) { os << b.str() << '\n'; });
                    }
            }
            if (dump_atoms || !dump_families) write_measure(os, build_nazarov_measure(p));
            write_text(flags.out_path, os.str());
            return 0;
        }
        if (cap_cmd->parsed()) {
            std::ifstream in(cap_boxes_path);
            if (!in) throw std::runtime_error("cannot open " + cap_boxes_path);
            const BoxSet e = read_boxset(in);
            const CapacityCertificate cert =
                cap_tree_exact ? tree_capacity_exact(e) : dual_capacity(e, opts);
            write_text(flags.out_path, certificate_json(cert).dump(2) + "\n");
            return 0;
        }

        std::vector<ExperimentReport> reports;
        if (v_tree->parsed()) {
            reports.push_back(verify_tree_positive(tree_params));
        } else if (v_d1->parsed()) {
            reports.push_back(theorem_d1_diagnostic(d1_params, opts).report);
        } else if (cex_se->parsed()) {
            reports.push_back(cex_small_energy(se_scales, opts, cfg).report);
        } else if (cex_pe->parsed()) {
            reports.push_back(cex_partial_energy(pe_scales, cfg));
        } else if (cex_naz->parsed()) {
            reports.push_back(cex_nazarov(naz_x, naz_ms, cfg));
        } else if (ls_cmd->parsed()) {
            reports.push_back(levelset_bitree(ls_s, opts, cfg));
        } else if (smp_cmd->parsed()) {
            AtomicMeasure nu(2);
            std::string label;
            if (!smp_measure_path.empty()) {
                std::ifstream in(smp_measure_path);
                if (!in) throw std::runtime_error("cannot open " + smp_measure_path);
                nu = read_measure(in);
                label = smp_measure_path;
            } else {
                nu = build_nu(SemParams(smp_s));
                label = "nu(s=" + std::to_string(smp_s) + ")";
            }
            std::vector<double> grid = smp_eps;
            if (grid.empty()) {
                const SemParams p(smp_s);
                const LemmaGInterval iv = lemma_g_interval(p);
                for (double c : {0.5 * iv.lo, iv.lo, iv.mid(), iv.hi, 2.0 * iv.hi})
                    grid.push_back(c / static_cast<double>(p.n));
            }
            reports.push_back(smp_diagnostic(nu, grid, label));
        }

        emit_reports(flags, reports);
        return verdict_exit_code(reports);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

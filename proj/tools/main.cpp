// Command-line surface for the conic feasibility solver: instance
// generation, solving, John-ellipsoid rounding, certificate verification,
// benchmark sweeps, and the Monte-Carlo volume oracle.

#include "conic/io.hpp"
#include "conic/mc.hpp"
#include "conic/rng.hpp"
#include "conic/solver.hpp"
#include "conic/sweep.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitBudget = 2;
constexpr int kExitVerifyFailed = 3;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw conic::Error("cannot write " + path);
    out << text;
}

struct SolveFlags {
    std::string instance_path;
    std::string phase = "mwu-fast";
    std::string rescale = "multirank";
    bool derandomize = false;
    bool fixed_step = false;
    std::uint64_t seed = 0;
    long max_phases = 0;
    long max_iters = 0;
    double alpha_cap = conic::kDefaultAlphaCap;
    std::optional<double> rho_hint;
    std::string out_path;
    std::string trace_path;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f, bool rounding) {
    cmd->add_option("--instance", f.instance_path, "instance document path")->required();
    cmd->add_option("--phase", f.phase, "classical|smooth|mwu|mwu-fast");
    cmd->add_option("--rescale", f.rescale, "rank1|multirank|norm");
    cmd->add_flag("--derandomize", f.derandomize,
                  "thin direction via conditional expectations instead of sampling");
    cmd->add_option("--seed", f.seed, "root seed for all randomized subroutines");
    cmd->add_option("--max-phases", f.max_phases, "phase budget (0: derived)");
    cmd->add_option("--max-iters", f.max_iters, "per-phase iteration cap (0: derived)");
    cmd->add_option("--alpha-cap", f.alpha_cap, "cap on the multi-rank alpha");
    double rho = 0.0;
    cmd->add_option_function<double>(
           "--rho-hint", [&f](double v) { f.rho_hint = v; },
           "inradius hint; sets the phase budget to ceil(8 n ln(1/rho))")
        ->expected(1);
    (void)rho;
    cmd->add_option("--out", f.out_path, "result document path (default: stdout)");
    cmd->add_option("--trace", f.trace_path, "per-iteration trace path (JSON lines)");
    if (rounding)
        cmd->add_flag("--fixed-step", f.fixed_step,
                      "fixed step 1/(2n), terminate at Phi < 1/m");
}

conic::SolveConfig to_config(const SolveFlags& f) {
    conic::SolveConfig cfg;
    cfg.phase_mode = conic::phase_mode_from_string(f.phase);
    cfg.rescale_mode = conic::rescale_mode_from_string(f.rescale);
    cfg.derandomize = f.derandomize;
    cfg.fixed_step = f.fixed_step;
    cfg.seed = f.seed;
    cfg.max_phases = f.max_phases;
    cfg.max_iters_per_phase = f.max_iters;
    cfg.alpha_cap = f.alpha_cap;
    cfg.rho_hint = f.rho_hint;
    cfg.record_trace = !f.trace_path.empty();
    return cfg;
}

int finish_solve(const conic::SolveResult& result, const conic::SolveConfig& cfg,
                 const SolveFlags& flags, double wall_ms) {
    write_or_print(flags.out_path, conic::save_result(result, cfg, wall_ms));
    if (!flags.trace_path.empty())
        write_or_print(flags.trace_path, conic::trace_to_jsonl(result));
    return result.certificate.is_feasible() ? kExitFeasible : kExitBudget;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"strict conic feasibility: rescaled perceptron / MWU solver"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a planted instance");
    int gen_n = 0, gen_m = 0;
    double gen_rho = 0.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "dimension")->required();
    gen->add_option("--m", gen_m, "row count")->required();
    gen->add_option("--rho", gen_rho, "planted inradius, in (0,1)")->required();
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--out", gen_out, "output path (default: stdout)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "find x with Ax > 0 or exhaust the budget");
    SolveFlags solve_flags;
    add_solve_flags(solve_cmd, solve_flags, false);

    // round
    auto* round_cmd =
        app.add_subcommand("round", "solve with Phi < 1/e and report the John ellipsoid");
    SolveFlags round_flags;
    add_solve_flags(round_cmd, round_flags, true);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "check a certificate against an instance");
    std::string verify_instance, verify_cert;
    verify_cmd->add_option("--instance", verify_instance, "instance document path")->required();
    verify_cmd->add_option("--cert", verify_cert, "certificate document path")->required();

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "planted-family benchmark sweep -> CSV");
    std::string bench_ns = "4,8,16", bench_ms, bench_rhos = "1e-2";
    std::string bench_phases = "mwu,mwu-fast", bench_rescales = "multirank";
    int bench_seeds = 3, bench_threads = 1;
    std::uint64_t bench_seed = 0;
    std::string bench_out;
    bench_cmd->add_option("--ns", bench_ns, "dimensions, comma separated");
    bench_cmd->add_option("--ms", bench_ms, "row counts (default: 2n paired)");
    bench_cmd->add_option("--rhos", bench_rhos, "inradii, comma separated");
    bench_cmd->add_option("--phases", bench_phases, "phase modes, comma separated");
    bench_cmd->add_option("--rescales", bench_rescales, "rescale modes, comma separated");
    bench_cmd->add_option("--seeds", bench_seeds, "seeds per cell");
    bench_cmd->add_option("--threads", bench_threads, "parallel cells");
    bench_cmd->add_option("--seed", bench_seed, "root seed");
    bench_cmd->add_option("--out", bench_out, "CSV path (default: stdout)");

    // volume-mc
    auto* volume_cmd = app.add_subcommand("volume-mc", "Monte-Carlo cone volume fraction");
    std::string volume_instance;
    long volume_samples = 1000000;
    std::uint64_t volume_seed = 0;
    volume_cmd->add_option("--instance", volume_instance, "instance document path")->required();
    volume_cmd->add_option("--samples", volume_samples, "sample count");
    volume_cmd->add_option("--seed", volume_seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            auto [instance, witness] = conic::generate_planted(gen_n, gen_m, gen_rho, gen_seed);
            write_or_print(gen_out, conic::save_instance(instance));
            return kExitFeasible;
        }

        if (solve_cmd->parsed() || round_cmd->parsed()) {
            const bool rounding = round_cmd->parsed();
            const SolveFlags& flags = rounding ? round_flags : solve_flags;
            const conic::ConeInstance instance = conic::load_instance_file(flags.instance_path);
            const conic::SolveConfig cfg = to_config(flags);
            const auto start = std::chrono::steady_clock::now();
            const conic::SolveResult result =
                rounding ? conic::john_ellipsoid(instance, cfg) : conic::solve(instance, cfg);
            const double wall_ms = std::chrono::duration<double, std::milli>(
                                       std::chrono::steady_clock::now() - start)
                                       .count();
            if (rounding && result.certificate.is_feasible()) {
                if (!result.roundedness ||
                    !conic::roundedness_check(*result.final_instance, result.roundedness->z,
                                              result.roundedness->t)) {
                    std::cerr << "roundedness check failed\n";
                    return kExitVerifyFailed;
                }
            }
            return finish_solve(result, cfg, flags, wall_ms);
        }

        if (verify_cmd->parsed()) {
            const conic::ConeInstance instance = conic::load_instance_file(verify_instance);
            conic::Certificate cert;
            try {
                cert = conic::load_certificate_file(verify_cert);
            } catch (const conic::Error& e) {
                std::cerr << "verification failed: " << e.what() << "\n";
                return kExitVerifyFailed;
            }
            try {
                const conic::VerificationReport report = conic::verify_certificate(instance, cert);
                std::cout << (report.pass ? "PASS" : "FAIL") << ": " << report.detail << "\n";
                return report.pass ? kExitFeasible : kExitVerifyFailed;
            } catch (const conic::Error& e) {
                std::cerr << "verification failed: " << e.what() << "\n";
                return kExitVerifyFailed;
            }
        }

        if (bench_cmd->parsed()) {
            conic::SweepGrid grid;
            for (const auto& s : split_list(bench_ns)) grid.ns.push_back(std::stoi(s));
            if (bench_ms.empty()) {
                for (int n : grid.ns) grid.ms.push_back(2 * n);
            } else {
                for (const auto& s : split_list(bench_ms)) grid.ms.push_back(std::stoi(s));
            }
            for (const auto& s : split_list(bench_rhos)) grid.rhos.push_back(std::stod(s));
            for (const auto& s : split_list(bench_phases))
                grid.modes.push_back(conic::phase_mode_from_string(s));
            for (const auto& s : split_list(bench_rescales))
                grid.rescales.push_back(conic::rescale_mode_from_string(s));
            for (int i = 0; i < bench_seeds; ++i)
                grid.seeds.push_back(static_cast<std::uint64_t>(i));
            grid.threads = bench_threads;
            const conic::SweepReport report = conic::bench_sweep(grid, bench_seed);
            write_or_print(bench_out, report.to_csv());
            for (const auto& fit : report.fits) {
                std::cerr << "fit " << conic::to_string(fit.mode)
                          << ": per-phase iters vs n slope = " << fit.iters_vs_n
                          << ", total iters vs log(1/rho) slope = " << fit.iters_vs_log_inv_rho
                          << "\n";
            }
            return kExitFeasible;
        }

        if (volume_cmd->parsed()) {
            const conic::ConeInstance instance = conic::load_instance_file(volume_instance);
            const conic::NormState norm = conic::NormState::identity(instance.dim());
            const conic::ConeInstance normalized = conic::normalize_rows(instance, norm);
            const conic::McEstimate est =
                conic::mc_volume_fraction(normalized, norm, volume_samples, volume_seed);
            std::cout << "estimate " << est.estimate << " stderr " << est.std_error
                      << " samples " << est.samples << "\n";
            return kExitFeasible;
        }
    } catch (const conic::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const conic::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const conic::GenerationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const conic::Error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

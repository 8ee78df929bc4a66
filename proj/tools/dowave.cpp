// Command-line driver: solve one configuration, run a convergence study, or
// run the oracle checks.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dowave/analysis.hpp"
#include "dowave/config.hpp"
#include "dowave/io.hpp"
#include "dowave/stepper.hpp"
#include "dowave/verify.hpp"
#include "dowave/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int { ok = 0, verification_failed = 1, config_error = 2, runtime_failure = 3 };

void open_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw dowave::config::ConfigError("--out", "cannot create '" + dir.string() + "': " + ec.message());
}

std::ofstream open_file(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw dowave::Error("cannot write '" + p.string() + "'");
    return f;
}

void write_json(const fs::path& p, const json& j) {
    auto f = open_file(p);
    f << std::setprecision(17) << j.dump(2) << '\n';
}

int cmd_solve(const std::string& config_path, const fs::path& out_dir, std::optional<std::size_t> threads) {
    using namespace dowave;
    config::SolveConfig cfg;
    std::optional<Discretization> disc;
    try {
        cfg = config::parse_solve_config(config::load_json(config_path));
        if (threads) cfg.threads = *threads;
        disc.emplace(cfg.spec, cfg.M1, cfg.M2, cfg.N, cfg.K);
        config::check_memory_budget(cfg.M1, cfg.M2, cfg.N, cfg.output.memory_budget_gib);
        open_out_dir(out_dir);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    }

    try {
        const bool with_exact = cfg.output.exact && cfg.spec.has_exact();
        std::ofstream errors_csv;
        if (cfg.output.track_errors && cfg.spec.has_exact()) {
            errors_csv = open_file(out_dir / "errors.csv");
            errors_csv << std::setprecision(17) << "n,t,err_inf,err_l2\n";
        }
        Observer observer = [&](std::size_t n, double t, const Field& u) {
            if (errors_csv.is_open()) {
                const auto e = error_norms(u, sample(*disc, cfg.spec.exact, t), *disc);
                errors_csv << n << ',' << t << ',' << e.inf << ',' << e.l2 << '\n';
            }
            if (cfg.output.snapshot_every > 0 && (n % cfg.output.snapshot_every == 0 || n == disc->N())) {
                std::ostringstream name;
                name << "field_step_" << std::setw(6) << std::setfill('0') << n << ".csv";
                auto f = open_file(out_dir / name.str());
                io::write_field_csv(f, *disc, u);
            }
        };

        const auto start = std::chrono::steady_clock::now();
        const Field u = run(cfg.spec, *disc, observer, StepOptions{cfg.threads});
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const CoefficientTable table(cfg.spec, *disc);
        json summary = {{"case", cfg.spec.name},
                        {"M1", disc->M1()}, {"M2", disc->M2()}, {"N", disc->N()}, {"K", disc->K()},
                        {"L1", disc->L1()}, {"L2", disc->L2()}, {"T", disc->T()},
                        {"h1", disc->h1()}, {"h2", disc->h2()}, {"tau", disc->tau()}, {"dbeta", disc->dbeta()},
                        {"mu", table.mu()},
                        {"order_integral", table.order_integral()},
                        {"lipschitz", cfg.spec.lipschitz},
                        {"history_bytes", history_bytes(*disc)},
                        {"threads", cfg.threads},
                        {"seconds", seconds},
                        {"version", version}};
        std::optional<Field> exact;
        if (cfg.spec.has_exact()) {
            exact = sample(*disc, cfg.spec.exact, disc->T());
            const auto e = error_norms(u, *exact, *disc);
            summary["err_inf"] = e.inf;
            summary["err_l2"] = e.l2;
            double max_rel = 0.0;
            const Field rel = relative_error_field(u, *exact);
            for (std::size_t i = 1; i < disc->M1(); ++i) {
                for (std::size_t j = 1; j < disc->M2(); ++j) max_rel = std::max(max_rel, rel(i, j));
            }
            summary["max_rel_err"] = max_rel;
        } else {
            summary["err_inf"] = nullptr;
            summary["err_l2"] = nullptr;
        }
        if (cfg.output.field) {
            auto f = open_file(out_dir / "field.csv");
            io::write_field_csv(f, *disc, u, with_exact ? &*exact : nullptr);
        }
        write_json(out_dir / "summary.json", summary);
        std::cout << std::setprecision(6) << "case " << cfg.spec.name << ": M1=" << disc->M1() << " M2=" << disc->M2()
                  << " N=" << disc->N() << " K=" << disc->K() << " mu=" << table.mu();
        if (cfg.spec.has_exact()) std::cout << " err_inf=" << summary["err_inf"].get<double>() << " err_l2=" << summary["err_l2"].get<double>();
        std::cout << " (" << std::fixed << std::setprecision(2) << seconds << " s)\n";
        return ok;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return runtime_failure;
    }
}

int cmd_study(const std::string& config_path, const fs::path& out_dir, std::optional<std::size_t> threads) {
    using namespace dowave;
    config::StudyConfig cfg;
    try {
        cfg = config::parse_study_config(config::load_json(config_path));
        if (threads) cfg.threads = *threads;
        if (!cfg.spec.has_exact()) throw config::ConfigError("case", "a study needs a case with a known exact solution");
        for (const auto& r : cfg.schedule.rows) config::check_memory_budget(r.M1, r.M2, r.N, cfg.output.memory_budget_gib);
        open_out_dir(out_dir);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    }

    try {
        StudyOptions opt;
        opt.threads = cfg.threads;
        opt.on_row = [](const StudyRow& r) {
            std::cerr << "  row M=" << r.M1 << " N=" << r.N << " K=" << r.K << " done in " << std::fixed
                      << std::setprecision(2) << r.seconds << " s\n";
        };
        const StudyReport report = run_study(cfg.spec, cfg.schedule, opt);
        write_json(out_dir / "report.json", to_json(report));
        auto csv = open_file(out_dir / "report.csv");
        write_csv(csv, report);
        print_table(std::cout, report);
        for (const auto& r : report.rows) {
            if (r.failure) return runtime_failure;
        }
        return ok;
    } catch (const std::exception& e) {
        std::cerr << "study failure: " << e.what() << '\n';
        return runtime_failure;
    }
}

int cmd_verify(const std::string& scale_name) {
    using namespace dowave::verify;
    const Scale scale = scale_name == "full" ? Scale::full : Scale::small;
    bool all = true;
    for (const auto& c : run_all(scale)) {
        std::cout << (c.passed ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << '\n';
        all = all && c.passed;
    }
    return all ? ok : verification_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ADI solver for the two-dimensional distributed-order time-fractional wave equation"};
    app.set_version_flag("--version", std::string("dowave ") + dowave::version);
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::size_t> threads;
    app.add_option("--threads", threads, "worker threads inside one solve")->check(CLI::PositiveNumber);

    std::string config_path;
    std::string out_dir;
    auto* solve = app.add_subcommand("solve", "solve one configuration and write field.csv and summary.json");
    solve->add_option("--config", config_path, "configuration file (JSON)")->required();
    solve->add_option("--out", out_dir, "output directory")->required();

    auto* study = app.add_subcommand("study", "run a convergence study and write report.json and report.csv");
    study->add_option("--config", config_path, "configuration file (JSON)")->required();
    study->add_option("--out", out_dir, "output directory")->required();

    std::string scale = "small";
    auto* verify = app.add_subcommand("verify", "run the oracle checks");
    verify->add_option("--scale", scale, "check size")->check(CLI::IsMember({"small", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }

    if (*solve) return cmd_solve(config_path, out_dir, threads);
    if (*study) return cmd_study(config_path, out_dir, threads);
    if (*verify) return cmd_verify(scale);
    return config_error;
}

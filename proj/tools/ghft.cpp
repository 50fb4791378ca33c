#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ghft/runner.hpp"

using namespace ghft;

namespace {

int fail(int code, const std::string& msg) {
    std::cerr << "ghft: " << msg << '\n';
    return code;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Green operators, propagators and CCR/CAR algebras on lattice spacetimes"};
    app.require_subcommand(1);

    std::string config, source, which = "retarded", model = "scalar", expr_file;
    bool parallel = false;

    auto* check = app.add_subcommand("check", "run the configured suites and write report.csv");
    check->add_option("config", config, "scenario INI file")->required();
    check->add_flag("--parallel", parallel, "run suites concurrently");

    auto* conv = app.add_subcommand("convergence", "error series over dyadic refinements");
    conv->add_option("config", config, "scenario INI file")->required();

    auto* green = app.add_subcommand("green", "apply a Green operator to a CSV source");
    green->add_option("config", config, "scenario INI file")->required();
    green->add_option("--source", source, "CSV with t_index,x_index,component_index,re,im")->required();
    green->add_option("--which", which, "retarded, advanced or causal")
        ->check(CLI::IsMember({"retarded", "advanced", "causal"}));
    green->add_option("--model", model, "scalar, dirac or proca")->check(CLI::IsMember({"scalar", "dirac", "proca"}));

    auto* alg = app.add_subcommand("algebra", "normal form of an algebra expression");
    alg->add_option("config", config, "scenario INI file")->required();
    alg->add_option("--expr", expr_file, "file holding the expression")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ScenarioConfig cfg = load_config(config);
        const std::string out = resolve_output_dir(cfg);
        if (*check) {
            RunResult res = run_scenario(cfg, out, parallel);
            std::size_t failed = 0, total = 0;
            for (const auto& s : res.suites)
                for (const auto& r : s.rows) {
                    ++total;
                    if (!r.pass) {
                        ++failed;
                        std::cerr << "FAIL " << r.suite << '/' << r.check << " measured " << csv_number(r.measured)
                                  << " threshold " << csv_number(r.threshold) << '\n';
                    }
                }
            std::cout << total - failed << '/' << total << " checks passed; report in " << out << "/report.csv\n";
            return res.pass() ? 0 : 1;
        }
        if (*conv) {
            auto series = run_convergence(cfg);
            std::filesystem::create_directories(out);
            std::ofstream f(std::filesystem::path(out) / "convergence.csv", std::ios::binary);
            if (!f) throw IoError("cannot write convergence.csv");
            write_convergence_csv(series, f);
            for (const auto& s : series)
                std::cout << s.identity << ": " << (s.exact ? std::string("exact") : csv_number(s.fitted_order())) << '\n';
            return convergence_pass(series) ? 0 : 1;
        }
        if (*green) {
            Section u = run_green(cfg, model, source, which, out);
            std::cout << "wrote " << out << "/green_" << which << ".csv (max |u| = " << u.max_abs() << ")\n";
            return 0;
        }
        if (*alg) {
            std::cout << run_algebra(cfg, read_file(expr_file), out) << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        return fail(2, e.what());
    } catch (const IoError& e) {
        return fail(3, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(3, e.what());
    } catch (const PreconditionError& e) {
        return fail(2, e.what());
    }
    return 0;
}

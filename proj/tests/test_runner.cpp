#include <sstream>

#include "doctest.h"
#include "ghft/runner.hpp"

using namespace ghft;

namespace {

ScenarioConfig parse(const std::string& s) {
    std::istringstream is(s);
    return parse_config(is);
}

}  // namespace

TEST_CASE("empty config gives defaults") {
    ScenarioConfig c = parse("");
    CHECK(c.spacetime.family == Family::Minkowski);
    CHECK(c.spacetime.n_t == 64);
    CHECK(c.suites.empty());
    CHECK(c.identity_tol == 1e-9);
}

TEST_CASE("config sections") {
    ScenarioConfig c = parse(
        "# comment\n[spacetime]\nfamily = frw\nn_t = 32\nn_x = 48\nscale = cosh\nradius = 1.3\n"
        "[model]\nproca_m2 = 2.5\n[suites]\nrun = scalar, proca\n[numerics]\nseed = 7\n[output]\ndir = somewhere\n");
    CHECK(c.spacetime.family == Family::FRW);
    CHECK(c.spacetime.n_t == 32);
    CHECK(c.spacetime.n_x == 48);
    CHECK(c.spacetime.dx == doctest::Approx(1.0 / 48));
    CHECK(c.proca_m2 == 2.5);
    CHECK(c.suites == std::vector<std::string>{"scalar", "proca"});
    CHECK(c.seed == 7);
    CHECK(c.output_dir == "somewhere");
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse("[model]\nproca_m2 = 0\n[suites]\nrun = proca\n"), ConfigError);
    CHECK_THROWS_AS(parse("[model]\nfoo = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[spacetime]\nn_t = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse("[spacetime]\nn_t = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("[numerics]\ncfl = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[suites]\nrun = scalar, quantum\n"), ConfigError);
    CHECK_THROWS_AS(parse("[spacetime]\nfamily = ultrastatic\n[suites]\nrun = dirac\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), IoError);
}

TEST_CASE("csv helpers") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    const double v = 0.1 + 0.2;
    CHECK(std::stod(csv_number(v)) == v);
    CHECK(std::stod(csv_number(-1e-300)) == -1e-300);
}

TEST_CASE("report csv layout") {
    SuiteResult s{"scalar", {{"scalar", "green_identity_LE", 1e-12, 1e-9, true}}};
    std::ostringstream os;
    write_report_csv({s}, os);
    const std::string out = os.str();
    CHECK(out.rfind("suite,check,measured,threshold,pass\r\n", 0) == 0);
    CHECK(out.find("scalar,green_identity_LE,") != std::string::npos);
}

TEST_CASE("fitted order") {
    ConvergenceSeries s{"x", {1, 2, 3}, {1, 2, 3}, {1.0, 0.25, 0.0625}, false};
    CHECK(s.fitted_order() == doctest::Approx(2.0));
    CHECK(s.orders() == std::vector<double>{2.0, 2.0});
    CHECK(convergence_pass({s}));
    s.error = {1.0, 0.6, 0.3};
    CHECK_FALSE(convergence_pass({s}));
}

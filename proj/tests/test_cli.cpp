#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bloch/cli.hpp"
#include "bloch/types.hpp"

using namespace bloch;
using bloch::cli::RunConfig;

namespace {

RunConfig fig1(const std::string& cmd) {
    RunConfig c;
    c.potential_path = std::string(BLOCH_DATA_DIR) + "/fig1_square.pot";
    c.command = cmd;
    return c;
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

std::vector<double> fields(const std::string& row) {
    std::vector<double> v;
    std::istringstream in(row);
    std::string f;
    while (std::getline(in, f, ',')) v.push_back(std::strtod(f.c_str(), nullptr));
    return v;
}

}  // namespace

TEST_CASE("config validation") {
    auto c = fig1("bands");
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.k_min = 3, bad.k_max = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c, bad.k_count = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c, bad.order = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c, bad.command = "plot";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c, bad.potential_path.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c, bad.eps = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = fig1("green"), bad.k_min = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("exit codes") {
    std::ostringstream out, err;
    auto c = fig1("bands");
    c.k_count = 10;
    CHECK(cli::run(c, out, err) == cli::kOk);
    c.potential_path = "/nonexistent.pot";
    CHECK(cli::run(c, out, err) == cli::kConfigError);
    c = fig1("bands");
    c.out = "/nonexistent-dir/x.csv";
    CHECK(cli::run(c, out, err) == cli::kConfigError);
    RunConfig st;
    st.command = "selftest";
    std::ostringstream so;
    CHECK(cli::run(st, so, err) == cli::kOk);
    CHECK(so.str().find("FAIL") == std::string::npos);
}

TEST_CASE("header is versioned and echoes the config") {
    auto c = fig1("bands");
    c.k_count = 5;
    auto csv = cli::render(c);
    CHECK(csv.rfind("# bloch-green v0.1.0, schema=1\n", 0) == 0);
    CHECK(csv.find("# cmd=bands") != std::string::npos);
    CHECK(csv.find("kmin=0 kmax=12 n=5") != std::string::npos);
    CHECK(csv.find("\nk,Y,band_flag,Re_Z,Im_Z\n") != std::string::npos);
}

TEST_CASE("reference square-well configuration gives three full scans") {
    auto b = data_rows(cli::render(fig1("bands")));
    auto g = data_rows(cli::render(fig1("green")));
    auto c = data_rows(cli::render(fig1("compare")));
    REQUIRE(b.size() == 600);
    REQUIRE(g.size() == 600);
    REQUIRE(c.size() == 600);
    CHECK(fields(b.front())[0] == doctest::Approx(0.02));
    CHECK(fields(b.back())[0] == doctest::Approx(12.0));
    int gap_rows = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto f = fields(g[i]);
        if (g[i].find(",gap") != std::string::npos) {
            ++gap_rows;
            CHECK(std::abs(f[2]) < 1e-9);
        }
        CHECK(b[i].substr(0, b[i].find(",")) == g[i].substr(0, g[i].find(",")));
    }
    CHECK(gap_rows > 50);
    // low-energy rows of compare: the series is good near k = 0
    CHECK(fields(c.front())[3] < 1e-6);
}

TEST_CASE("identical configs give identical bytes") {
    auto c = fig1("green");
    c.k_count = 200;
    auto a = cli::render(c);
    c.threads = 1;
    auto b = cli::render(c);
    CHECK(a == b);
}

TEST_CASE("free potential compare at coinciding points") {
    RunConfig c;
    c.potential_path = std::string(BLOCH_DATA_DIR) + "/free.pot";
    c.command = "compare";
    c.k_min = 0, c.k_max = 0.1, c.k_count = 10;
    c.x = c.y = 0.3;
    for (auto& r : data_rows(cli::render(c))) CHECK(fields(r)[3] <= 1e-10);
}

TEST_CASE("expand rows over one cell") {
    auto c = fig1("expand");
    c.k_count = 8;
    auto rows = data_rows(cli::render(c));
    REQUIRE(rows.size() == 8);
    for (auto& r : rows) {
        auto f = fields(r);
        REQUIRE(f.size() == 10);
        CHECK(f[4] == doctest::Approx(2 * f[1]));  // s0 = 2 a0
        CHECK(f[5] == doctest::Approx(2 * f[3]));  // s2 = 2 a2
    }
    CHECK(fields(rows[0])[0] == 0.0);
}

TEST_CASE("command line front end") {
    std::string cmd = std::string(BLOCH_CLI) + " --cmd bands --potential " + BLOCH_DATA_DIR +
                      "/free.pot --n 4 --kmax 1 > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    std::string bad = std::string(BLOCH_CLI) + " --cmd bands --n 1 --potential " + BLOCH_DATA_DIR + "/free.pot 2> /dev/null";
    int rc = std::system(bad.c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    std::string unk = std::string(BLOCH_CLI) + " --nope 2> /dev/null";
    CHECK(WEXITSTATUS(std::system(unk.c_str())) == 2);
}

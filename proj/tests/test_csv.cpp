#include "hawkes/csv.hpp"

#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace hawkes;

TEST_CASE("csv numbers round-trip exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const std::string s = csv::number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(csv::number(0.1) == "0.1");
    CHECK(csv::number(2.0) == "2");
    CHECK(csv::number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(csv::number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv fields are quoted only when needed") {
    CHECK(csv::field("abc") == "abc");
    CHECK(csv::field("a,b") == "\"a,b\"");
    CHECK(csv::field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    std::ostringstream os;
    csv::write_meta(os, "seed", "42");
    csv::write_row(os, {"t", "x"});
    CHECK(os.str() == "# seed = 42\nt,x\n");
}

TEST_CASE("read_numeric skips metadata and header") {
    const auto path = std::filesystem::temp_directory_path() / "hawkes_read_numeric.csv";
    {
        std::ofstream f(path);
        f << "# comment\nt,phi\n0,1\n0.5,0.25\n";
    }
    const auto rows = csv::read_numeric(path.string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == 0.5);
    CHECK(rows[1][1] == 0.25);
    std::filesystem::remove(path);
}

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hampath/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hampath");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = hampath::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream cells_in(line);
        for (std::string cell; std::getline(cells_in, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("propagator-ho prints the propagator as JSON") {
    const Result r = run_cli({"propagator-ho", "--k", "1", "--t", "1", "--p", "0", "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["re"].get<double>() == doctest::Approx(0.30752150772816185).epsilon(1e-14));
    CHECK(doc["im"].get<double>() == doctest::Approx(-0.30752150772816185).epsilon(1e-14));
    CHECK(doc["abs"].get<double>() == doctest::Approx(0.43490108695058905).epsilon(1e-14));
    CHECK(r.out.rfind(R"({"re":0.3075215077281619,"im":-0.3075215077281619,)", 0) == 0);
}

TEST_CASE("singular time exits with status 2") {
    const Result r = run_cli({"propagator-ho", "--k", "1", "--t", "1.5707963", "--p", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("singular time") != std::string::npos);
    CHECK(r.out.empty());
    const Result tt = run_cli({"ttransform", "ho", "--k", "4", "--t", "0.78539816339744828"});
    CHECK(tt.code == 2);
}

TEST_CASE("verify det reports both routes and the closed form") {
    const Result r = run_cli({"verify", "--suite", "det", "--k", "1", "--t", "1", "--terms", "100000",
                              "--grid-n", "200"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["pass"].get<bool>());
    const auto& res = doc["results"];
    CHECK(res["closed_form"].get<double>() == doctest::Approx(1.8508157176809256).epsilon(1e-14));
    CHECK(res.contains("product"));
    CHECK(res.contains("dense_re"));
    CHECK(res["max_rel"].get<double>() < 1e-2);

    const Result csv = run_cli({"verify", "--suite", "det", "--grid-n", "100", "--format", "csv"});
    const auto rows = csv_rows(csv.out);
    CHECK(rows.front() == std::vector<std::string>{"quantity", "value"});
    CHECK(rows.back() == std::vector<std::string>{"pass", "1"});
}

TEST_CASE("failed checks exit with status 3") {
    const Result r = run_cli({"verify", "--suite", "pde", "--h", "0.05"});
    CHECK(r.code == 3);
    CHECK_FALSE(nlohmann::json::parse(r.out)["pass"].get<bool>());
}

TEST_CASE("sweep over p has constant modulus") {
    const Result r =
        run_cli({"sweep", "ho", "--k", "1", "--t", "1", "--p", "-3:3:121", "--format", "csv"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 122);
    CHECK(rows[0] == std::vector<std::string>{"p", "re", "im", "abs", "arg", "flag"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 6);
        CHECK(std::abs(std::stod(rows[i][3]) - 0.43490108695058905) < 1e-10);
        CHECK(rows[i][5] == "ok");
    }
    CHECK(std::stod(rows[1][0]) == -3.0);
    CHECK(std::stod(rows[121][0]) == 3.0);
}

TEST_CASE("sweep over eps follows the Gaussian normalization") {
    const Result r = run_cli({"sweep", "--eps", "0.1:0.001:50", "--format", "csv"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 51);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double eps = std::stod(rows[i][0]);
        const double expected = std::sqrt(1.0 / (2.0 * std::numbers::pi * eps));
        CHECK(std::abs(std::stod(rows[i][3]) - expected) / expected < 1e-6);
    }
}

TEST_CASE("sweep across a singular time flags the row") {
    const Result r =
        run_cli({"sweep", "ho", "--k", "1", "--t", "1.4707963:1.6707963:3", "--format", "csv"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1][5] == "ok");
    CHECK(std::vector<std::string>(rows[2].begin() + 1, rows[2].end()) ==
          std::vector<std::string>{"nan", "nan", "nan", "nan", "singular"});
    CHECK(rows[3][5] == "beyond-caustic");
}

TEST_CASE("two-parameter sweep is in lexicographic order") {
    const Result r = run_cli(
        {"sweep", "ho", "--k", "0.5:1:2", "--t", "1", "--p", "0:1:3", "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["swept"] == nlohmann::json::array({"k", "p"}));
    const auto& rows = doc["rows"];
    REQUIRE(rows.size() == 6);
    CHECK(rows[0]["k"] == 0.5);
    CHECK(rows[2]["k"] == 0.5);
    CHECK(rows[3]["k"] == 1.0);
    CHECK(rows[4]["p"] == 0.5);
    for (const auto& row : rows) CHECK(row["flag"] == "ok");
}

TEST_CASE("usage errors exit with status 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"nonsense"}).code == 1);
    CHECK(run_cli({"propagator-ho", "--k", "abc"}).code == 1);
    CHECK(run_cli({"propagator-ho", "--k", "1:2:3"}).code == 1);
    CHECK(run_cli({"propagator-ho", "--k", "-1"}).code == 1);
    CHECK(run_cli({"propagator-ho", "--format", "xml"}).code == 1);
    CHECK(run_cli({"verify"}).code == 1);
    CHECK(run_cli({"verify", "--suite", "everything"}).code == 1);
    CHECK(run_cli({"verify", "--suite", "det", "--grid-n", "2.5"}).code == 1);
    const Result many = run_cli({"sweep", "ho", "--k", "1:2:2", "--t", "1:2:2", "--p", "0:1:2"});
    CHECK(many.code == 1);
    CHECK(many.err.find("at most 2") != std::string::npos);
    CHECK(run_cli({"sweep", "ho", "--k", "1"}).code == 1);
    CHECK(run_cli({"sweep", "ho", "--eps", "0.1:0.2:3"}).code == 1);
    CHECK(run_cli({"sweep", "--eps", "0.1:0.2"}).code == 1);
    const Result missing = run_cli({"ttransform", "--f-spec", "/nonexistent/f.json"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("/nonexistent/f.json") != std::string::npos);
    CHECK(run_cli({"propagator-free", "--eps", "0"}).code == 1);
}

TEST_CASE("help exits cleanly") {
    const Result r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("ttransform reads a test function file") {
    const auto bare = temp_file("hampath_bare.json",
                                R"({"terms":[{"a_re":0.2,"a_im":0.1,"b":3.0,"c":0.5}]})");
    const auto split = temp_file(
        "hampath_split.json",
        R"({"p":{"terms":[{"a_re":0.2,"a_im":0.1,"b":3.0,"c":0.5}]},"x":{"terms":[]}})");
    const Result a = run_cli({"ttransform", "ho", "--k", "1", "--t", "1", "--p", "0.4", "--f-spec",
                              bare.string()});
    const Result b = run_cli({"ttransform", "ho", "--k", "1", "--t", "1", "--p", "0.4", "--f-spec",
                              split.string()});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto doc = nlohmann::json::parse(a.out);
    for (const char* key : {"det_factor", "quad_factor", "pin_factor"}) {
        CHECK(doc[key].contains("re"));
        CHECK(doc[key].contains("im"));
    }
    const Result zero = run_cli({"ttransform", "ho", "--k", "1", "--t", "1", "--p", "0.4"});
    CHECK(zero.out != a.out);

    const Result free = run_cli({"ttransform", "--eps", "0.05", "--p0", "0.2", "--p", "0.3",
                                 "--f-spec", bare.string(), "--format", "csv"});
    CHECK(free.code == 0);
    const auto rows = csv_rows(free.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size() == rows[1].size());
    CHECK(rows[0][0] == "re");

    const auto broken = temp_file("hampath_broken.json", "{not json");
    CHECK(run_cli({"ttransform", "--f-spec", broken.string()}).code == 1);
}

TEST_CASE("propagator-free reports the grid value and the reference") {
    const Result r = run_cli({"propagator-free", "--p0", "1", "--p", "1", "--t", "1", "--eps", "0.01"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["abs"].get<double>() == doctest::Approx(3.9877608907686242).epsilon(1e-8));
    CHECK(doc["arg"].get<double>() == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(doc["reference"]["re"].is_number());
}

TEST_CASE("output file and determinism") {
    const auto path = std::filesystem::temp_directory_path() / "hampath_out.csv";
    std::filesystem::remove(path);
    const std::vector<std::string> args{"sweep",  "ho", "--k",     "1", "--t", "0.5:1.2:8",
                                        "--p",    "1",  "--format", "csv", "--out", path.string()};
    const Result first = run_cli(args);
    CHECK(first.code == 0);
    CHECK(first.out.empty());
    std::ifstream in(path);
    const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(written.rfind("t,re,im,abs,arg,flag\n", 0) == 0);
    const Result again = run_cli({"sweep", "ho", "--k", "1", "--t", "0.5:1.2:8", "--p", "1", "--format",
                                  "csv"});
    CHECK(again.out == written);
    CHECK(run_cli({"propagator-ho", "--out", "/nonexistent/dir/x.json"}).code == 1);
}

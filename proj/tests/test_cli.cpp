#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "plap/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run plap_run(std::vector<std::string> args) {
    args.insert(args.begin(), "plap");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = plap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(fs::temp_directory_path() / ("plap_cli_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string write(const std::string& file, const std::string& text) const {
        std::ofstream(path_ / file) << text;
        return (path_ / file).string();
    }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

const char* kLinear = R"j({"m":1,"p":2,"N":3,"beta":1,"coefficients":["1"],"nonlinearities":["u1"],
                          "grid":{"r_max":10,"points":4001}})j";

}  // namespace

TEST_CASE("load errors map to exit codes") {
    TempDir dir("errors");
    const auto out = dir.path().string();
    auto code_for = [&](const std::string& doc) {
        return plap_run({"solve", "--problem", dir.write("p.json", doc), "--out", out});
    };

    const auto bad_n = code_for(R"j({"m":1,"p":2,"N":2,"coefficients":["1"],"nonlinearities":["u1"],"grid":{"r_max":1,"points":17}})j");
    CHECK(bad_n.code == 2);
    CHECK(bad_n.err.find("/N") != std::string::npos);

    const auto unknown = code_for(R"j({"m":1,"p":2,"N":3,"coefficients":["1"],"nonlinearities":["u1"],"grid":{"r_max":1,"points":17},"colour":1})j");
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("/colour") != std::string::npos);

    const auto short_array = code_for(R"j({"m":2,"p":2,"N":3,"coefficients":["1"],"nonlinearities":["u1","u2"],"grid":{"r_max":1,"points":17}})j");
    CHECK(short_array.code == 2);
    CHECK(short_array.err.find("/coefficients") != std::string::npos);

    const auto syntax = code_for(R"j({"m":1,"p":2,"N":3,"coefficients":["1+"],"nonlinearities":["u1"],"grid":{"r_max":1,"points":17}})j");
    CHECK(syntax.code == 3);
    CHECK(syntax.err.find("/coefficients/0") != std::string::npos);
    CHECK(syntax.err.find("offset 2") != std::string::npos);

    const auto domain = code_for(R"j({"m":1,"p":2,"N":3,"coefficients":["log(r)"],"nonlinearities":["u1"],"grid":{"r_max":1,"points":17}})j");
    CHECK(domain.code == 5);

    CHECK(code_for("not json").code == 2);
    CHECK(plap_run({"solve", "--problem", (dir.path() / "missing.json").string()}).code == 2);
    CHECK(plap_run({"frobnicate"}).code == 2);
    CHECK(plap_run({}).code == 2);
    CHECK(plap_run({"--version"}).code == 0);
}

TEST_CASE("warnings do not abort") {
    TempDir dir("warn");
    const auto r = plap_run({"solve", "--problem",
                             dir.write("p.json", R"j({"m":1,"p":2,"N":3,"coefficients":["1"],"nonlinearities":["u1 - 1"],"grid":{"r_max":1,"points":17}})j"),
                             "--out", dir.path().string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("C1") != std::string::npos);
}

TEST_CASE("solve: linear oracle CSV and report") {
    TempDir dir("solve");
    const auto r = plap_run({"solve", "--problem", dir.write("p.json", kLinear), "--out", dir.path().string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("solve: converged", 0) == 0);

    std::ifstream csv(dir.path() / "profiles.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "r,u1");
    std::size_t rows = 0;
    double worst = 0.0;
    while (std::getline(csv, line)) {
        const auto comma = line.find(',');
        const double x = std::stod(line.substr(0, comma)), u = std::stod(line.substr(comma + 1));
        const double exact = x == 0.0 ? 1.0 : std::sinh(x) / x;
        worst = std::max(worst, std::abs(u - exact) / exact);
        ++rows;
    }
    CHECK(rows == 4001);
    CHECK(worst <= 1e-4);

    const auto report = nlohmann::json::parse(slurp(dir.path() / "report.json"));
    std::vector<std::string> keys;
    for (const auto& [k, v] : report.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"problem", "residuals", "solve", "version"});
    CHECK(report["solve"]["converged"] == true);
    CHECK(report["problem"]["iteration"]["max_iterations"] == 500);
}

TEST_CASE("solve: zero coefficients and exit 4") {
    TempDir dir("zero");
    const auto zero = plap_run({"solve", "--problem",
                                dir.write("z.json", R"j({"m":1,"p":2,"N":3,"beta":0.25,"coefficients":["0"],"nonlinearities":["u1"],"grid":{"r_max":5,"points":101}})j"),
                                "--out", dir.path().string()});
    CHECK(zero.code == 0);
    std::ifstream csv(dir.path() / "profiles.csv");
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) CHECK(line.substr(line.find(',') + 1) == "0.25");

    const auto capped = plap_run({"solve", "--problem", dir.write("c.json", kLinear), "--r-max", "80",
                                  "--out", (dir.path() / "capped").string()});
    CHECK(capped.code == 4);
    CHECK(fs::exists(dir.path() / "capped" / "profiles.csv"));
    CHECK(fs::exists(dir.path() / "capped" / "report.json"));

    const auto stalled = plap_run({"solve", "--problem", dir.write("s.json", kLinear), "--max-iter", "2",
                                   "--out", (dir.path() / "stalled").string()});
    CHECK(stalled.code == 4);
}

TEST_CASE("solve: bounded-nonlinearity tail grows like r^2/6") {
    TempDir dir("minu");
    const auto r = plap_run({"solve", "--problem",
                             dir.write("p.json", R"j({"m":1,"p":2,"N":3,"coefficients":["1"],"nonlinearities":["min(u1,1)"],"grid":{"r_max":40,"points":4001}})j"),
                             "--out", dir.path().string()});
    REQUIRE(r.code == 0);
    std::ifstream csv(dir.path() / "profiles.csv");
    std::string line;
    std::vector<std::pair<double, double>> rows;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        const auto c = line.find(',');
        rows.emplace_back(std::stod(line.substr(0, c)), std::stod(line.substr(c + 1)));
    }
    const auto [x, u] = rows.back();
    CHECK(u / (x * x / 6.0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("predict, verify and sweep") {
    TempDir dir("others");
    const auto bounded = dir.write("b.json", R"j({"m":1,"p":2,"N":3,"coefficients":["(1+r)^(-4)"],"nonlinearities":["u1^0.5"],"grid":{"r_max":40,"points":4001}})j");

    const auto pred = plap_run({"predict", "--problem", bounded, "--epsilon-scan", "--out", dir.path().string()});
    REQUIRE(pred.code == 0);
    CHECK(pred.out.rfind("predict: BoundedExists", 0) == 0);
    const auto report = nlohmann::json::parse(slurp(dir.path() / "report.json"));
    CHECK(report["criteria"]["prediction"] == "BoundedExists");
    CHECK(report["criteria"]["epsilon_scan"].size() == 4);
    CHECK(report["criteria"]["weight_monotone"]["kind"] == "FromRadius");

    const auto large = plap_run({"predict", "--problem",
                                 dir.write("l.json", R"j({"m":1,"p":2,"N":3,"coefficients":["1"],"nonlinearities":["u1^0.5"],"grid":{"r_max":10,"points":101}})j"),
                                 "--out", dir.path().string()});
    CHECK(large.out.rfind("predict: AllSolutionsLarge", 0) == 0);

    const auto zero = plap_run({"predict", "--problem",
                                dir.write("z.json", R"j({"m":1,"p":2,"N":3,"coefficients":["0"],"nonlinearities":["u1"],"grid":{"r_max":10,"points":101}})j"),
                                "--out", dir.path().string()});
    CHECK(zero.out.rfind("predict: Inconclusive", 0) == 0);
    CHECK(nlohmann::json::parse(slurp(dir.path() / "report.json"))["criteria"]["degenerate_coefficients"] == true);

    const auto solved = dir.path() / "solved";
    REQUIRE(plap_run({"solve", "--problem", dir.write("lin.json", kLinear), "--out", solved.string()}).code == 0);
    const auto ver = plap_run({"verify", "--problem", dir.write("lin.json", kLinear), "--profile",
                               (solved / "profiles.csv").string(), "--out", dir.path().string()});
    REQUIRE(ver.code == 0);
    const auto residuals = nlohmann::json::parse(slurp(dir.path() / "report.json"))["residuals"];
    CHECK(residuals["sup_fixed_point_residual"].get<double>() <= 1e-6);

    const auto sweep = plap_run({"sweep", "--problem", bounded, "--base-r", "40", "--out", dir.path().string()});
    REQUIRE(sweep.code == 0);
    CHECK(sweep.out.rfind("sweep: Saturating", 0) == 0);

    const auto sub = plap_run({"sweep", "--problem",
                               dir.write("s.json", R"j({"m":1,"p":2,"N":3,"beta":1,"coefficients":["1"],"nonlinearities":["u1^0.5"],"grid":{"r_max":5,"points":4001}})j"),
                               "--base-r", "5", "--doublings", "4", "--out", dir.path().string()});
    CHECK(sub.out.rfind("sweep: Growing", 0) == 0);
    const auto growth = nlohmann::json::parse(slurp(dir.path() / "report.json"))["growth"];
    CHECK(growth["exponent_estimate"].get<double>() == doctest::Approx(4.0).epsilon(0.3 / 4.0));
}

TEST_CASE("determinism: byte-identical outputs") {
    TempDir dir("det");
    const auto problem = dir.write("p.json", kLinear);
    const auto a = dir.path() / "a", b = dir.path() / "b";
    REQUIRE(plap_run({"solve", "--problem", problem, "--out", a.string()}).code == 0);
    REQUIRE(plap_run({"solve", "--problem", problem, "--out", b.string()}).code == 0);
    CHECK(slurp(a / "profiles.csv") == slurp(b / "profiles.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
}

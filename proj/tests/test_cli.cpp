#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "thirring/config.hpp"

using namespace thirring;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("thirring_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string cli() {
    const char* p = std::getenv("THIRRING_CLI");
    REQUIRE_MESSAGE(p != nullptr, "THIRRING_CLI must point at the thirring executable");
    return p;
}

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const fs::path log = scratch() / "stdout.txt";
    const std::string cmd = cli() + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path artifacts(const std::string& out) {
    const std::string tag = "artifacts: ";
    const auto pos = out.rfind(tag);
    REQUIRE(pos != std::string::npos);
    const auto end = out.find('\n', pos);
    return out.substr(pos + tag.size(), end - pos - tag.size());
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse("# comment\n[grid]\nradius = 1.5\nn = 33\n\n[model]\nm=0.5 # trailing\n", "t.cfg");
    CHECK(c.get_double("grid.radius") == 1.5);
    CHECK(c.get_long("grid.n") == 33);
    CHECK(c.get_double("model.m") == 0.5);
    CHECK(c.entry("grid.n").source == "t.cfg:4:5");
    CHECK(c.get_double("model.lambda", 2.0) == 2.0);
}

TEST_CASE("config errors carry line and column") {
    auto message = [](const std::string& text) {
        try {
            (void)Config::parse(text, "bad.cfg");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("[grid\n").find("bad.cfg:1:") == 0);
    CHECK(message("[grid]\nradius\n").find("bad.cfg:2:") == 0);
    CHECK(message("radius = 1\n").find("bad.cfg:1:") == 0);
    CHECK(message("[grid]\n\n  n =\n").find("bad.cfg:3:") == 0);

    const auto c = Config::parse("[grid]\nn = abc\n", "x.cfg");
    CHECK_THROWS_WITH_AS(c.get_long("grid.n"), doctest::Contains("x.cfg:2:5"), ConfigError);
    CHECK_THROWS_AS(c.require({"grid.radius"}), ConfigError);
}

TEST_CASE("typed sections") {
    auto c = Config::parse("[grid]\nradius = 1\nn = 32\n", "c");
    CHECK_THROWS_AS(grid_from(c), ConfigError);  // even n
    c.set("grid.n", "33", "--n");
    CHECK(grid_from(c).size() == 33);

    apply_data_preset(c, "gaussian", "--data");
    CHECK(std::holds_alternative<GaussianProfile>(data_from(c).f));
    c.set("data.f.lo", "0", "--set");
    CHECK_THROWS_WITH_AS(data_from(c), doctest::Contains("does not apply"), ConfigError);
    CHECK_THROWS_AS(apply_data_preset(c, "nosuch", "--data"), ConfigError);

    auto d = Config::parse("[bogus]\nkey = 1\n", "d");
    CHECK_THROWS_WITH_AS(d.check_known(known_keys()), doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("study overrides") {
    const auto c = Config::parse("[study]\nladder = 33, 65, 129\nseed = 5\n[model]\nm = 0.25\n", "s");
    const StudySpec spec = study_from(c, "reversal");
    CHECK(spec.ladder == std::vector<std::size_t>{33, 65, 129});
    CHECK(spec.seed == 5);
    CHECK(spec.params.m == 0.25);
}

TEST_CASE("cli exit codes") {
    const std::string out = " --out " + (scratch() / "results").string();

    SUBCASE("unknown study lists the available ones") {
        const auto r = run("study nosuch" + out);
        CHECK(r.code == 1);
        CHECK(r.out.find("convergence") != std::string::npos);
    }
    SUBCASE("missing required key") {
        const auto r = run("solve --data gaussian --m 0 --lambda 1 --R 1" + out);
        CHECK(r.code == 1);
        CHECK(r.out.find("grid.n") != std::string::npos);
    }
    SUBCASE("unknown flag") { CHECK(run("solve --bogus 1" + out).code == 1); }
    SUBCASE("config syntax error names the line") {
        write(scratch() / "broken.cfg", "[grid]\nradius = 1\nn\n");
        const auto r = run("solve --config " + (scratch() / "broken.cfg").string() + out);
        CHECK(r.code == 1);
        CHECK(r.out.find("broken.cfg:3:") != std::string::npos);
    }
    SUBCASE("forced non-convergence") {
        const auto r = run("solve --data gaussian --m 1 --lambda 1 --R 1 --n 65 --max-iter 1" + out);
        CHECK(r.code == 2);
    }
}

TEST_CASE("cli solve, norms and decompose artifacts") {
    const std::string out = " --out " + (scratch() / "results").string();
    const auto a = run("solve --data gaussian --m 0 --lambda 1 --R 1 --n 257" + out);
    REQUIRE(a.code == 0);
    const fs::path dir = artifacts(a.out);
    for (const char* f : {"data.csv", "field.csv", "slices.csv", "manifest.json"}) CHECK(fs::exists(dir / f));
    const auto manifest = read_json(dir / "manifest.json");
    CHECK(manifest["config"]["grid.n"] == "257");
    CHECK(manifest["artifacts"].contains("field.csv"));

    SUBCASE("same inputs give byte-identical artifacts") {
        const auto b = run("solve --data gaussian --m 0 --lambda 1 --R 1 --n 257" + out);
        REQUIRE(b.code == 0);
        const auto other = read_json(artifacts(b.out) / "manifest.json");
        CHECK(other["artifacts"] == manifest["artifacts"]);
        CHECK(other["inputs_sha1"] == manifest["inputs_sha1"]);
    }
    SUBCASE("norms of a slice") {
        const auto r = run("norms --input " + (dir / "slices.csv").string() + " --s 0.25 --t 0.5" + out);
        REQUIRE(r.code == 0);
        const auto rep = read_json(artifacts(r.out) / "norms.json");
        CHECK(rep["t"].get<double>() == doctest::Approx(0.5));
        CHECK(rep["psi"]["hs"].get<double>() >= rep["psi"]["l2"].get<double>());
        CHECK(rep["spinor"]["charge"].get<double>() > 0.0);
        CHECK(run("norms --input " + (dir / "slices.csv").string() + " --s 0.7" + out).code == 1);
    }
    SUBCASE("decompose at m = 0 has an identically zero remainder") {
        const auto r = run("decompose --data gaussian --m 0 --lambda 1 --R 1 --n 65" + out);
        REQUIRE(r.code == 0);
        const auto m = read_json(artifacts(r.out) / "manifest.json");
        CHECK(m["decomposition"]["linf_N"].get<double>() == 0.0);
        CHECK(fs::exists(artifacts(r.out) / "decomposition.csv"));
    }
    SUBCASE("decompose zero data") {
        const auto r = run("decompose --data zero --m 1 --lambda 1 --R 1 --n 33" + out);
        REQUIRE(r.code == 0);
        const auto m = read_json(artifacts(r.out) / "manifest.json");
        CHECK(m["decomposition"]["residual_sum"].get<double>() == 0.0);
        CHECK(m["decomposition"]["linf_N"].get<double>() == 0.0);
    }
}

TEST_CASE("cli study writes a verdict") {
    const std::string out = " --out " + (scratch() / "results").string();
    const auto r = run("study reversal --set study.ladder=17,33,65" + out);
    CHECK(r.code == 0);
    const auto v = read_json(artifacts(r.out) / "verdict.json");
    CHECK(v["verdict"] == "PASS");
    CHECK(fs::exists(artifacts(r.out) / "reversal.csv"));
}

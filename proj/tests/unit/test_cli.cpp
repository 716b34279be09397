#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string output;
};

Run cli(const std::string& args, const fs::path& dir) {
    const auto log = dir / "cli.log";
    const std::string cmd = std::string("\"") + GAITSENSE_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream text;
    text << in.rdbuf();
    return {status, text.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("gaitsense_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("classify without a feature table asks for extract") {
    const auto dir = scratch("missing");
    const auto r = cli("classify --table " + (dir / "features.csv").string() + " --out " + (dir / "c.json").string(), dir);
    CHECK(r.code != 0);
    CHECK(r.output.find("extract") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "c.json"));
}

TEST_CASE("unknown combination is rejected") {
    const auto dir = scratch("combo");
    std::ofstream(dir / "features.csv") << "subject_id,routine,cohort,truth,A\n";
    const auto r = cli("classify --combo diagonal --table " + (dir / "features.csv").string() + " --out " +
                           (dir / "c.json").string(),
                       dir);
    CHECK(r.code != 0);
}

TEST_CASE("synth, extract and classify on a small cohort") {
    const auto dir = scratch("pipeline");
    REQUIRE(cli("synth --patients 3 --healthy 3 --seed 5 --out " + (dir / "cohort").string(), dir).code == 0);
    CHECK(fs::exists(dir / "cohort" / "truth.json"));
    const auto ex = cli("extract --in " + (dir / "cohort").string() + " --out " + (dir / "features.csv").string(), dir);
    REQUIRE(ex.code == 0);
    CHECK(fs::exists(dir / "features.labels.csv"));
    const auto cl = cli("classify --combo rt --learner dt --seed 5 --table " + (dir / "features.csv").string() +
                            " --out " + (dir / "classify.json").string(),
                        dir);
    INFO(cl.output);
    REQUIRE(cl.code == 0);
    std::ifstream in(dir / "classify.json");
    const auto doc = nlohmann::json::parse(in);
    CHECK(doc["N_sample"] == 6);
    CHECK(doc["N_test"] == 1);
    CHECK(doc["combo"] == "rt");
    CHECK(fs::exists(dir / "classify.csv"));
}

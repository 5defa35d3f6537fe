// End-to-end checks of the hoplab binary: flag handling, exit codes,
// bit-identical reruns, and replay. Requires HOPLAB_BIN to point at the tool.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string binary_path() {
    const char* env = std::getenv("HOPLAB_BIN");
    return env ? env : "./tools/hoplab";
}

int run(const std::string& args, std::string* out = nullptr) {
    const std::string cmd = binary_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string text;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) text += buf;
    const int status = pclose(pipe);
    if (out) *out = text;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("unknown flags exit with the usage code") {
    CHECK(run("--frobnicate") == 1);
    CHECK(run("resonances --bogus 3") == 1);
}

TEST_CASE("limits subcommand emits the constants document") {
    CHECK(run("--out /tmp/hoplab_t1 limits --d 1 --q \"d1(psi)\" --q0 zero") == 0);
    const std::string j = slurp("/tmp/hoplab_t1.json");
    CHECK(j.find("\"case\": \"III\"") != std::string::npos);
    CHECK(j.find("\"gamma\"") != std::string::npos);
    CHECK(j.find("\"L\"") != std::string::npos);
    CHECK(j.find("\"digest\"") != std::string::npos);
}

TEST_CASE("resonance runs are byte-identical across reruns and worker counts") {
    const std::string flags =
        " resonances --q0 zero --q psi --law rademacher --N 12 --seed 7 --box -1.5,1.5,-1.5,0.4";
    CHECK(run("--out /tmp/hoplab_r1 --workers 1" + flags) == 0);
    CHECK(run("--out /tmp/hoplab_r2 --workers 4" + flags) == 0);
    CHECK(slurp("/tmp/hoplab_r1.json") == slurp("/tmp/hoplab_r2.json"));
    CHECK(slurp("/tmp/hoplab_r1.csv") == slurp("/tmp/hoplab_r2.csv"));
}

TEST_CASE("replay of a case-study report reports an empty diff") {
    CHECK(run("--out /tmp/hoplab_cs case-study --case I --q psi --N-list 10 --M 30 --seed 3") ==
          0);
    std::string out;
    CHECK(run("replay /tmp/hoplab_cs.json", &out) == 0);
    CHECK(out.find("identical") != std::string::npos);
}

TEST_CASE("config errors exit with code 1") {
    CHECK(run("counterexample --q psi") == 1);  // not unit mass
    CHECK(run("case-study --case II --q psi --N-list 8 --M 5") == 1);  // classifier mismatch
}

TEST_CASE("config file mirrors flags") {
    {
        std::ofstream cfg("/tmp/hoplab_cfg.ini");
        cfg << "out=/tmp/hoplab_c1\n";
    }
    CHECK(run("--config /tmp/hoplab_cfg.ini profile-info --p psi") == 0);
    const std::string j = slurp("/tmp/hoplab_c1.json");
    CHECK(j.find("\"describe\": \"psi\"") != std::string::npos);
}

TEST_SUITE_END();

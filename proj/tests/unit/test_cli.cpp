// End-to-end checks of the installed command-line surface: exit codes,
// document pipelines, and determinism. Drives the real binary.

#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef CONIC_CLI_PATH
#error "CONIC_CLI_PATH must point at the conic binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out_path =
        fs::temp_directory_path() / ("conic-cli-out-" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(CONIC_CLI_PATH) + " " + args + " >" + out_path.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out_path);
    fs::remove(out_path);
    return result;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / name;
}

} // namespace

TEST_CASE("gen/solve/verify pipeline") {
    const fs::path inst = temp_file("conic-inst.json");
    const fs::path result = temp_file("conic-result.json");
    const fs::path cert = temp_file("conic-cert.json");

    CHECK(run_cli("gen --n 6 --m 20 --rho 1e-2 --seed 1 --out " + inst.string()).exit_code == 0);
    const RunResult solved = run_cli("solve --instance " + inst.string() +
                                     " --phase mwu-fast --rescale multirank --seed 3 --out " +
                                     result.string());
    CHECK(solved.exit_code == 0);

    auto doc = nlohmann::json::parse(slurp(result));
    REQUIRE(doc.contains("certificate"));
    {
        std::ofstream out(cert);
        out << doc["certificate"].dump(2) << "\n";
    }
    CHECK(run_cli("verify --instance " + inst.string() + " --cert " + cert.string()).exit_code ==
          0);

    SUBCASE("tampered certificate fails with exit 3") {
        auto cert_doc = doc["certificate"];
        cert_doc["x"][0] = -1000.0;
        std::ofstream out(cert);
        out << cert_doc.dump(2) << "\n";
        out.close();
        CHECK(run_cli("verify --instance " + inst.string() + " --cert " + cert.string())
                  .exit_code == 3);
    }
    SUBCASE("garbage certificate fails with exit 3") {
        std::ofstream out(cert);
        out << "{ not json";
        out.close();
        CHECK(run_cli("verify --instance " + inst.string() + " --cert " + cert.string())
                  .exit_code == 3);
    }
}

TEST_CASE("infeasible instance exits with the budget code") {
    const fs::path inst = temp_file("conic-infeasible.json");
    {
        std::ofstream out(inst);
        out << R"({"n":2,"m":2,"rows":[[1,0],[-1,0]]})";
    }
    const RunResult r = run_cli("solve --instance " + inst.string() +
                                " --phase mwu --rescale multirank --max-phases 20");
    CHECK(r.exit_code == 2);
}

TEST_CASE("usage errors exit with 64") {
    CHECK(run_cli("solve").exit_code == 64);               // missing --instance
    CHECK(run_cli("frobnicate").exit_code == 64);          // unknown subcommand
    CHECK(run_cli("gen --n 3").exit_code == 64);           // missing required flags
    CHECK(run_cli("solve --instance /nonexistent.json").exit_code == 64);
    CHECK(run_cli("gen --n 3 --m 4 --rho 2.0").exit_code == 64); // rho out of range
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("round reports a John ellipsoid") {
    const fs::path inst = temp_file("conic-round.json");
    const fs::path result = temp_file("conic-round-result.json");
    CHECK(run_cli("gen --n 5 --m 15 --rho 5e-2 --seed 2 --out " + inst.string()).exit_code == 0);
    CHECK(run_cli("round --instance " + inst.string() + " --phase mwu-fast --out " +
                  result.string())
              .exit_code == 0);
    auto doc = nlohmann::json::parse(slurp(result));
    REQUIRE(doc.contains("roundedness"));
    CHECK(doc["roundedness"]["T"].get<long>() >= 1);
    CHECK(doc["roundedness"]["ratio"].get<double>() <=
          1.5 * doc["roundedness"]["T"].get<double>());
}

TEST_CASE("identical seeds reproduce result documents bit-exactly") {
    const fs::path inst = temp_file("conic-det.json");
    const fs::path r1 = temp_file("conic-det-1.json");
    const fs::path r2 = temp_file("conic-det-2.json");
    CHECK(run_cli("gen --n 5 --m 12 --rho 1e-2 --seed 4 --out " + inst.string()).exit_code == 0);
    const std::string flags = " --phase mwu-fast --rescale multirank --seed 11 --out ";
    CHECK(run_cli("solve --instance " + inst.string() + flags + r1.string()).exit_code == 0);
    CHECK(run_cli("solve --instance " + inst.string() + flags + r2.string()).exit_code == 0);
    auto a = nlohmann::json::parse(slurp(r1));
    auto b = nlohmann::json::parse(slurp(r2));
    a.erase("wall_ms");
    b.erase("wall_ms");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("volume oracle over the CLI") {
    const fs::path inst = temp_file("conic-vol.json");
    {
        std::ofstream out(inst);
        out << R"({"n":2,"m":2,"rows":[[1,0],[0,1]]})";
    }
    const RunResult r =
        run_cli("volume-mc --instance " + inst.string() + " --samples 200000 --seed 3");
    CHECK(r.exit_code == 0);
    double estimate = 0.0;
    std::sscanf(r.out.c_str(), "estimate %lf", &estimate);
    CHECK(estimate == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("bench emits the documented CSV header") {
    const fs::path csv = temp_file("conic-bench.csv");
    const RunResult r = run_cli(
        "bench --ns 4 --rhos 1e-1 --phases mwu-fast --rescales multirank --seeds 2 --out " +
        csv.string());
    CHECK(r.exit_code == 0);
    const std::string text = slurp(csv);
    CHECK(text.rfind("n,m,rho,mode,rescale,phases,iters,rescales,wall_ms,seed,status\n", 0) ==
          0);
}

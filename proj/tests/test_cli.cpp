#include "dwell/runner.hpp"

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(DWELL_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string config(const char* name) { return std::string(DWELL_CONFIG_DIR) + "/" + name; }

} // namespace

TEST_CASE("validate accepts the shipped configs")
{
    CHECK(run_cli("validate " + config("fig1.cfg")) == 0);
    CHECK(run_cli("validate " + config("fig4.cfg")) == 0);
    CHECK(run_cli("validate --preset fig3 --gamma 0.05") == 0);
    CHECK(run_cli("presets") == 0);
}

TEST_CASE("usage and configuration errors exit with 2")
{
    CHECK(run_cli("run --preset fig3 --dt 0") == 2);
    CHECK(run_cli("run --preset nosuch") == 2);
    CHECK(run_cli("validate /nonexistent/dir/x.cfg") == 2);
    CHECK(run_cli("validate --preset fig3 --set potential.massa=2") == 2);
    CHECK(run_cli("validate --preset fig3 --set broken") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("validate") == 2);
}

TEST_CASE("a short run writes its outputs")
{
    const auto dir = fs::temp_directory_path() / "dwell_cli_run";
    fs::remove_all(dir);
    const std::string args = "run --preset fig3 --gamma 0.1 --t-final 2 --N 100 --out " + dir.string()
                             + " --basename short --set grid.n1=32 --set grid.n2=64 --set time.dt=0.01"
                               " --set classical.dt=0.01";
    CHECK(run_cli(args) == 0);
    CHECK(fs::exists(dir / "short_quantum.csv"));
    CHECK(fs::exists(dir / "short_manifest.txt"));
    const auto m = dwell::parse_manifest(dwell::read_file(dir / "short_manifest.txt"));
    CHECK(m.status == "ok");
    CHECK(dwell::verify_manifest(m, dir));
    const auto cfg = dwell::parse_config(dwell::read_file(dir / "short_resolved.cfg"));
    CHECK(cfg.params.gamma == 0.1);
    CHECK(cfg.t_final == 2.0);
    CHECK(cfg.classical.n == 100);
}

TEST_CASE("a numerical abort exits with 1 and leaves no outputs")
{
    const auto dir = fs::temp_directory_path() / "dwell_cli_abort";
    fs::remove_all(dir);
    // a box this small lets particle 1 reach the edge almost at once
    const std::string args = "run --preset fig3 --t-final 5 --N 10 --out " + dir.string()
                             + " --basename abort --set grid.n1=32 --set grid.n2=64 --set grid.L1=5"
                               " --set time.dt=0.01 --set classical.dt=0.01";
    CHECK(run_cli(args) == 1);
    CHECK_FALSE(fs::exists(dir / "abort_quantum.csv"));
}

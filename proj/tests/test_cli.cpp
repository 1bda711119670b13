#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string tmp_path(const std::string& name) {
    return std::string("cli_test_") + name;
}

RunResult run(const std::string& args) {
    const std::string out_file = tmp_path("stdout.txt");
    const std::string cmd =
        std::string(NJCLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kCanonicalConfig = "n = 3\nhamiltonians = [x1, x2]\n";
const char* kWorkedConfig =
    "n = 3\nhamiltonians = [x1, x3]\nrho_box = 0\nsection = x1^2\n";

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("bogus-subcommand").exit_code == 2);
    CHECK(run("").exit_code == 2);
    CHECK(run("vf --config missing.cfg").exit_code == 2); // missing required --at
    CHECK(run("check --unknown-flag 1").exit_code == 2);
}

TEST_CASE("help exits 0") {
    auto r = run("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("check") != std::string::npos);
}

TEST_CASE("domain and validation errors exit with code 1") {
    const std::string cfg = tmp_path("bad.cfg");
    write_file(cfg, "n = 3\nhamiltonians = [x1]\n");
    auto r = run("vf --config " + cfg + " --at 0,0,0");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("error") != std::string::npos);

    const std::string good = tmp_path("good.cfg");
    write_file(good, kCanonicalConfig);
    CHECK(run("vf --config " + good + " --at 0,0").exit_code == 1); // wrong arity
    CHECK(run("vf --config missing.cfg --at 0,0,0").exit_code == 1);
}

TEST_CASE("vf prints the hand-computed field") {
    const std::string cfg = tmp_path("vf.cfg");
    write_file(cfg, kCanonicalConfig);
    auto r = run("vf --config " + cfg + " --at 0.5,2,0");
    CHECK(r.exit_code == 0);
    // X = (-x1, -x2, 1) = (-0.5, -2, 1)
    CHECK(r.out.find("-0.5") != std::string::npos);
    CHECK(r.out.find("-2") != std::string::npos);
    CHECK(r.out.find("components") != std::string::npos);
}

TEST_CASE("check on the canonical n=3 system exits 0") {
    const std::string cfg = tmp_path("check.cfg");
    write_file(cfg, kCanonicalConfig);
    const std::string report = tmp_path("report.json");
    auto r = run("check --config " + cfg + " --points 25 --seed 42 --report " + report);
    CHECK(r.exit_code == 0);
    auto body = read_file(report);
    CHECK(body.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("flow emits a CSV trajectory with exact header and LF endings") {
    const std::string cfg = tmp_path("flow.cfg");
    write_file(cfg, kCanonicalConfig);
    const std::string csv = tmp_path("traj.csv");
    auto r = run("flow --config " + cfg + " --from 1,1,0 --t0 0 --t1 0.1 --h 0.01 --output " +
                 csv);
    CHECK(r.exit_code == 0);
    auto body = read_file(csv);
    CHECK(body.rfind("t,x1,x2,x3\n", 0) == 0);
    CHECK(body.find("\r") == std::string::npos);
    // 11 data rows + header
    int lines = 0;
    for (char c : body)
        if (c == '\n') ++lines;
    CHECK(lines == 12);
}

TEST_CASE("hj on the worked section exits 0 and reports tiny residuals") {
    const std::string cfg = tmp_path("hj.cfg");
    write_file(cfg, kWorkedConfig);
    const std::string csv = tmp_path("hj.csv");
    auto r = run("hj --config " + cfg + " --grid=-1:1:5,-1:1:5 --output " + csv);
    CHECK(r.exit_code == 0);
    auto body = read_file(csv);
    CHECK(body.rfind("x1,x2,hj_residual,relatedness_n\n", 0) == 0);
    int lines = 0;
    for (char c : body)
        if (c == '\n') ++lines;
    CHECK(lines == 26);
}

TEST_CASE("hj requires a section") {
    const std::string cfg = tmp_path("hj_nosec.cfg");
    write_file(cfg, kCanonicalConfig);
    CHECK(run("hj --config " + cfg + " --grid=-1:1:3,-1:1:3").exit_code == 1);
}

TEST_CASE("characteristics emits a cloud CSV and a stats JSON") {
    const std::string cfg = tmp_path("ch.cfg");
    write_file(cfg, kWorkedConfig);
    const std::string seeds = tmp_path("seeds.txt");
    // base points (x1, x2) with u values; worked system transports along -x2
    std::string seed_text;
    for (int i = 0; i < 9; ++i) {
        const double x1 = -0.4 + 0.1 * i;
        seed_text += std::to_string(x1) + ",0," + std::to_string(x1 * x1) + "\n";
    }
    write_file(seeds, seed_text);
    const std::string cloud = tmp_path("cloud.csv");
    const std::string stats = tmp_path("stats.json");
    auto r = run("characteristics --config " + cfg + " --initial " + seeds +
                 " --tmax 0.3 --h 0.05 --output " + cloud + " --stats " + stats);
    CHECK(r.exit_code == 0);
    auto body = read_file(cloud);
    CHECK(body.rfind("x1,x2,u,seed_id,s\n", 0) == 0);
    auto stat_body = read_file(stats);
    CHECK(stat_body.find("max_residual") != std::string::npos);
}

TEST_CASE("lagrangian verdicts and exit codes") {
    const std::string cfg = tmp_path("lg.cfg");
    write_file(cfg, "n = 4\nhamiltonians = [x1, x2, x3]\n");
    const std::string basis3 = tmp_path("basis3.txt");
    write_file(basis3, "1,0,0,0\n0,1,0,0\n0,0,1,0\n");
    auto pass = run("lagrangian --config " + cfg + " --basis " + basis3 + " --j 3");
    CHECK(pass.exit_code == 0);
    CHECK(pass.out.find("true") != std::string::npos);

    auto fail = run("lagrangian --config " + cfg + " --basis " + basis3 + " --j 1");
    CHECK(fail.exit_code == 1);
    CHECK(fail.out.find("false") != std::string::npos);

    const std::string dep = tmp_path("dep.txt");
    write_file(dep, "1,0,0,0\n1,0,0,0\n");
    CHECK(run("lagrangian --config " + cfg + " --basis " + dep + " --j 1").exit_code == 1);
}

TEST_CASE("riccati family demo passes and writes its reports") {
    auto r = run("riccati --family --b1 2 --outdir .");
    CHECK(r.exit_code == 0);
    auto fact = read_file("factorization.json");
    CHECK(fact.find("\"pass\": true") != std::string::npos);
    CHECK(fact.find("\"on_family\": true") != std::string::npos);
    auto conf = read_file("conformal.json");
    CHECK(conf.find("\"pass\": true") != std::string::npos);
    CHECK(read_file("trajectory.csv").rfind("t,x1,x2,x3,x4\n", 0) == 0);
    CHECK(read_file("cloud.csv").rfind("x1,x2,x3,u,seed_id,s\n", 0) == 0);
    CHECK(read_file("cloud_stats.json").find("max_residual") != std::string::npos);
}

TEST_CASE("identical config, seed and flags give byte-identical outputs") {
    const std::string cfg = tmp_path("det.cfg");
    write_file(cfg, kCanonicalConfig);
    const std::string r1 = tmp_path("det1.json");
    const std::string r2 = tmp_path("det2.json");
    CHECK(run("check --config " + cfg + " --points 10 --seed 7 --report " + r1).exit_code ==
          0);
    CHECK(run("check --config " + cfg + " --points 10 --seed 7 --report " + r2).exit_code ==
          0);
    CHECK(read_file(r1) == read_file(r2));
    CHECK(!read_file(r1).empty());

    const std::string csv1 = tmp_path("det1.csv");
    const std::string csv2 = tmp_path("det2.csv");
    run("flow --config " + cfg + " --from 1,1,0 --t1 0.2 --h 0.01 --output " + csv1);
    run("flow --config " + cfg + " --from 1,1,0 --t1 0.2 --h 0.01 --output " + csv2);
    CHECK(read_file(csv1) == read_file(csv2));
}

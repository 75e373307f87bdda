// Integration tests for the gflow binary. The executable path comes from the
// GFLOW_BIN environment variable (set by ctest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string gflow_bin() {
    const char* bin = std::getenv("GFLOW_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "GFLOW_BIN must point at the gflow executable");
    return bin;
}

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "gflow-cli-tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit_code = -1;
    std::string output;
    std::string err;
};

RunResult run(const std::string& args, const fs::path& out_file = {}) {
    fs::path err_file = scratch_dir() / "stderr.txt";
    std::string cmd = "'" + gflow_bin() + "' " + args;
    if (!out_file.empty()) cmd += " --out '" + out_file.string() + "'";
    cmd += " > /dev/null 2> '" + err_file.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_file(err_file);
    if (!out_file.empty() && fs::exists(out_file)) r.output = read_file(out_file);
    return r;
}

const char* kClassifyConfig = R"json({
  "kind": "classify",
  "set": {
    "type": "lagrangian_set",
    "groupoid": {"type": "pair", "n": 2},
    "lagrangian": "0.5*((x2-x1)/h)^2 + 0.5*x1^2*y1",
    "variables": ["x1", "y1", "x2", "y2"],
    "constants": {"h": 0.1}
  },
  "points": [[1, 0, 1, 0], [1, 0, 0, 0], [0, 2, 0, 3]],
  "depth": 3
})json";

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("extract reproduces the worked chain") {
    fs::path cfg = scratch_dir() / "extract.json";
    write_file(cfg, R"json({
      "kind": "extract",
      "groupoid": {"type": "pair", "n": 2},
      "matrix": [[-1, 0, 1, 0], [0, 1, 0, 0]],
      "offset": [0, 1],
      "mode": "forward"
    })json");
    fs::path out = scratch_dir() / "extract.csv";
    auto r = run("extract --config '" + cfg.string() + "'", out);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("# groupoid-flow v1 extract") == 0);
    CHECK(r.output.find("FORWARD,0,1,2,0") != std::string::npos);
    CHECK(r.output.find("FORWARD,1,1,1,1") != std::string::npos);
    CHECK(r.err.find("stabilized k=1") != std::string::npos);
}

TEST_CASE("classify reports the singular-Lagrangian depths") {
    fs::path cfg = scratch_dir() / "classify.json";
    write_file(cfg, kClassifyConfig);
    fs::path out = scratch_dir() / "classify.csv";
    auto r = run("classify --config '" + cfg.string() + "' --seed 7", out);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\n0,0,") != std::string::npos);
    CHECK(r.output.find("\n1,1,") != std::string::npos);
    CHECK(r.output.find("\n2,3,3,0,0") != std::string::npos);
}

TEST_CASE("classify output is byte-identical across runs with the same seed") {
    fs::path cfg = scratch_dir() / "classify2.json";
    write_file(cfg, kClassifyConfig);
    fs::path out1 = scratch_dir() / "c1.csv";
    fs::path out2 = scratch_dir() / "c2.csv";
    auto r1 = run("classify --config '" + cfg.string() + "' --seed 42", out1);
    auto r2 = run("classify --config '" + cfg.string() + "' --seed 42", out2);
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(!r1.output.empty());
    CHECK(r1.output == r2.output);
}

TEST_CASE("dae integrates the semi-explicit example") {
    fs::path cfg = scratch_dir() / "dae.json";
    write_file(cfg, R"json({
      "kind": "dae",
      "n": 2,
      "A": [[1, 0], [0, 0]],
      "B": [[0, 0], [0, 1]],
      "b": ["0", "t"],
      "t0": 0.0,
      "h": 0.1,
      "steps": 3,
      "guess": [1.0, -7.0]
    })json");
    fs::path out = scratch_dir() / "dae.csv";
    auto r = run("dae --config '" + cfg.string() + "'", out);
    CHECK(r.exit_code == 0);
    // final state (1, 0.3)
    CHECK(r.output.find("\n3,0.30000000000000004,1,0.30000000000000004,") != std::string::npos);
}

TEST_CASE("dae reports HIGHER_INDEX with exit 3 and a partial file") {
    fs::path cfg = scratch_dir() / "dae_hi.json";
    write_file(cfg, R"json({
      "kind": "dae",
      "n": 2,
      "A": [[0, 1], [0, 0]],
      "B": [[1, 0], [0, 1]],
      "b": ["0", "0"],
      "h": 0.1,
      "steps": 5,
      "guess": [0.0, 0.0]
    })json");
    fs::path out = scratch_dir() / "dae_hi.csv";
    auto r = run("dae --config '" + cfg.string() + "'", out);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("HIGHER_INDEX") != std::string::npos);
    CHECK(r.output.find("# groupoid-flow v1 dae") == 0); // partial output still written
}

TEST_CASE("config rejection: unknown keys, kind mismatch, no partial writes") {
    fs::path cfg = scratch_dir() / "bad.json";
    write_file(cfg, R"json({"kind": "dae", "n": 1, "A": [[1]], "B": [[0]], "b": [0],
                        "h": 0.1, "steps": 1, "guess": [0], "bogus": true})json");
    fs::path out = scratch_dir() / "never.csv";
    auto r = run("dae --config '" + cfg.string() + "'", out);
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(r.err.find("unknown key 'bogus'") != std::string::npos);

    fs::path cfg2 = scratch_dir() / "mismatch.json";
    write_file(cfg2, R"json({"kind": "del"})json");
    auto r2 = run("extract --config '" + cfg2.string() + "'");
    CHECK(r2.exit_code == 2);

    auto r3 = run("dae --config '" + (scratch_dir() / "missing.json").string() + "'");
    CHECK(r3.exit_code == 2);

    fs::path cfg4 = scratch_dir() / "badexpr.json";
    write_file(cfg4, R"json({"kind": "dae", "n": 1, "A": [["(t"]], "B": [[0]], "b": [0],
                         "h": 0.1, "steps": 1, "guess": [0]})json");
    auto r4 = run("dae --config '" + cfg4.string() + "'");
    CHECK(r4.exit_code == 2);
}

TEST_CASE("del runs the oscillator and matches the recurrence") {
    fs::path cfg = scratch_dir() / "del.json";
    write_file(cfg, R"json({
      "kind": "del",
      "groupoid": {"type": "pair", "n": 1},
      "lagrangian": "h*(0.5*((q1-q0)/h)^2 - 0.5*((q0+q1)/2)^2)",
      "variables": ["q0", "q1"],
      "constants": {"h": 0.1},
      "initial": [0.0, 0.1],
      "steps": 2
    })json");
    fs::path out = scratch_dir() / "del.csv";
    auto r = run("del --config '" + cfg.string() + "'", out);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("step,q0,q1,p0,residual") != std::string::npos);
    CHECK(r.output.find("0.19900249376558604") != std::string::npos);

    // determinism for a deterministic subcommand too
    fs::path out2 = scratch_dir() / "del2.csv";
    auto r2 = run("del --config '" + cfg.string() + "'", out2);
    CHECK(r.output == r2.output);
}

TEST_CASE("del reports SINGULAR with exit 3 for the singular Lagrangian") {
    fs::path cfg = scratch_dir() / "del_sing.json";
    write_file(cfg, R"json({
      "kind": "del",
      "groupoid": {"type": "pair", "n": 2},
      "lagrangian": "0.5*((x2-x1)/h)^2 + 0.5*x1^2*y1",
      "variables": ["x1", "y1", "x2", "y2"],
      "constants": {"h": 0.1},
      "initial": [1.0, 0.5, 0.3, 0.2],
      "steps": 2
    })json");
    auto r = run("del --config '" + cfg.string() + "'");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("SINGULAR") != std::string::npos);
}

TEST_CASE("sleigh holds the hand-solved fixed point") {
    fs::path cfg = scratch_dir() / "sleigh.json";
    write_file(cfg, R"json({
      "kind": "sleigh",
      "m": 1.0, "a": 0.0, "b": 0.0, "J": 1.0,
      "initial": [1.5707963267948966, 1.0, 1.0],
      "steps": 3
    })json");
    fs::path out = scratch_dir() / "sleigh.csv";
    auto r = run("sleigh --config '" + cfg.string() + "'", out);
    CHECK(r.exit_code == 0);
    // every row keeps (pi/2, 1, 1)
    int rows = 0;
    std::istringstream lines(r.output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("#", 0) == 0 || line.rfind("step", 0) == 0) continue;
        CHECK(line.find(",1.5707963267948966,1,") != std::string::npos);
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("flow emits the lagrangian point cloud") {
    fs::path cfg = scratch_dir() / "flow.json";
    write_file(cfg, R"json({
      "kind": "flow",
      "n": 1,
      "hamiltonian": "(p^2+q^2)/2",
      "variables": ["q", "p"],
      "t": 0.0,
      "steps": 1,
      "grid": [[0.25, -0.75]]
    })json");
    fs::path out = scratch_dir() / "flow.csv";
    auto r = run("flow --config '" + cfg.string() + "'", out);
    CHECK(r.exit_code == 0);
    // t = 0: (q, q, -p, p)
    CHECK(r.output.find("0.25,0.25,0.75,-0.75") != std::string::npos);
}

TEST_CASE("tol flag is accepted and forwarded") {
    fs::path cfg = scratch_dir() / "del_tol.json";
    write_file(cfg, R"json({
      "kind": "del",
      "groupoid": {"type": "pair", "n": 1},
      "lagrangian": "h*(0.5*((q1-q0)/h)^2 - 0.5*((q0+q1)/2)^2)",
      "variables": ["q0", "q1"],
      "constants": {"h": 0.1},
      "initial": [0.0, 0.1],
      "steps": 1
    })json");
    auto r = run("del --config '" + cfg.string() + "' --tol 1e-12");
    CHECK(r.exit_code == 0);
}

TEST_SUITE_END();

// Contract tests for the fairsel binary: exit codes, output shapes,
// manifest replay. The binary path comes from the FAIRSEL_BIN environment
// variable (set by ctest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "fairsel_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string binary() {
    const char* bin = std::getenv("FAIRSEL_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "FAIRSEL_BIN must point at the fairsel binary");
    return bin;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    const fs::path out_file = scratch_dir() / "stdout.txt";
    const fs::path err_file = scratch_dir() / "stderr.txt";
    const std::string cmd =
        binary() + " " + args + " >" + out_file.string() + " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

std::vector<std::string> csv_lines(const fs::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

const std::string kSmallSynth =
    "--synthetic --synth-n 80 --synth-utility 4 --synth-sensitive 3 --synth-noise 3 "
    "--synth-separation 4 --synth-corr 0.9 --synth-seed 5";

}  // namespace

TEST_CASE("synth writes csv, roles json and manifest") {
    const fs::path out = scratch_dir() / "synth.csv";
    const auto result = run("synth --synth-n 40 --synth-utility 3 --synth-sensitive 2 "
                            "--synth-noise 1 --seed 9 --out " + out.string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out));
    CHECK(fs::exists(scratch_dir() / "synth.roles.json"));
    CHECK(fs::exists(scratch_dir() / "synth.manifest.json"));

    const auto lines = csv_lines(out);
    REQUIRE(lines.size() == 41);  // header + 40 instances
    CHECK(split(lines[0]).size() == 8);  // 6 features + protected + label

    const std::string roles = slurp(scratch_dir() / "synth.roles.json");
    CHECK(roles.find("\"utility\"") != std::string::npos);
    CHECK(roles.find("\"sensitive\"") != std::string::npos);
    CHECK(roles.find("\"noise\"") != std::string::npos);
}

TEST_CASE("select on synthetic data") {
    const fs::path out = scratch_dir() / "sel.json";
    const auto result = run("select " + kSmallSynth + " --k 4 --seed 1 --out " + out.string());
    CHECK(result.exit_code == 0);

    const std::string json_text = slurp(out);
    CHECK(json_text.find("\"selected\"") != std::string::npos);
    CHECK(json_text.find("\"trajectory\"") != std::string::npos);

    SUBCASE("selected has k entries") {
        // crude but dependency-free: count integers inside the selected array
        const auto pos = json_text.find("\"selected\"");
        const auto open = json_text.find('[', pos);
        const auto close = json_text.find(']', open);
        const std::string body = json_text.substr(open + 1, close - open - 1);
        CHECK(split(body).size() == 4);
    }
    SUBCASE("manifest replay is bitwise identical") {
        const fs::path replay = scratch_dir() / "sel_replay.json";
        const auto second = run("select --manifest " + (scratch_dir() / "sel.manifest.json").string() +
                                " --out " + replay.string());
        CHECK(second.exit_code == 0);
        CHECK(slurp(out) == slurp(replay));
    }
}

TEST_CASE("select validates k against d") {
    const fs::path out = scratch_dir() / "bad.json";
    const auto result = run("select " + kSmallSynth + " --k 99 --out " + out.string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("k") != std::string::npos);
}

TEST_CASE("select requires a data source") {
    const auto result = run("select --out " + (scratch_dir() / "x.json").string());
    CHECK(result.exit_code == 1);
}

TEST_CASE("evaluate over the fraction grid") {
    const fs::path sel = scratch_dir() / "eval_sel.json";
    REQUIRE(run("select " + kSmallSynth + " --k 4 --out " + sel.string()).exit_code == 0);

    SUBCASE("default grid emits seven rows and best-per-metric lines") {
        const fs::path out = scratch_dir() / "eval.csv";
        const auto result = run("evaluate " + kSmallSynth + " --selection " + sel.string() +
                                " --restarts 5 --seed 2 --out " + out.string());
        CHECK(result.exit_code == 0);
        const auto lines = csv_lines(out);
        REQUIRE(lines.size() == 8);
        CHECK(lines[0] == "fraction,acc,nmi,balance,proportion");
        CHECK(result.out.find("best acc") != std::string::npos);
        CHECK(result.out.find("best proportion") != std::string::npos);
    }
    SUBCASE("full feature set on separable data clusters well") {
        const fs::path out = scratch_dir() / "eval_full.csv";
        const auto result = run("evaluate " + kSmallSynth + " --no-standardize --selection " +
                                sel.string() +
                                " --fractions 1.0 --restarts 5 --seed 2 --out " + out.string());
        CHECK(result.exit_code == 0);
        const auto lines = csv_lines(out);
        REQUIRE(lines.size() == 2);
        const auto fields = split(lines[1]);
        CHECK(std::stod(fields[1]) > 0.95);
    }
    SUBCASE("requesting acc without labels is a data error") {
        const fs::path csv = scratch_dir() / "nolabel.csv";
        REQUIRE(run("synth --synth-n 40 --synth-utility 3 --synth-sensitive 2 --synth-noise 1 "
                    "--seed 4 --out " + csv.string()).exit_code == 0);
        const fs::path sel2 = scratch_dir() / "nolabel_sel.json";
        REQUIRE(run("select --data " + csv.string() +
                    " --protected protected --k 2 --out " + sel2.string()).exit_code == 0);
        const auto result = run("evaluate --data " + csv.string() +
                                " --protected protected --selection " + sel2.string() +
                                " --metrics acc --clusters 2 --out " +
                                (scratch_dir() / "nolabel.csv.out").string());
        CHECK(result.exit_code == 2);
    }
    SUBCASE("dimension mismatch is a data error") {
        const auto result = run("evaluate --synthetic --synth-n 40 --synth-utility 2 "
                                "--synth-sensitive 2 --synth-noise 2 --selection " + sel.string() +
                                " --out " + (scratch_dir() / "mismatch.csv").string());
        CHECK(result.exit_code == 2);
    }
}

TEST_CASE("gradcheck") {
    SUBCASE("defaults pass") {
        const auto result = run("gradcheck");
        CHECK(result.exit_code == 0);
        CHECK(result.out.find("max relative error") != std::string::npos);
    }
    SUBCASE("alpha=0 beta=0 still passes") {
        CHECK(run("gradcheck --alpha 0 --beta 0").exit_code == 0);
    }
    SUBCASE("coarse epsilon is reported, not asserted") {
        const auto result = run("gradcheck --epsilon 1e-1");
        CHECK((result.exit_code == 0 || result.exit_code == 3));
        CHECK(result.out.find("max relative error") != std::string::npos);
    }
}

TEST_CASE("sweep") {
    const fs::path cfg = scratch_dir() / "sweep_cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"max_iter": 150, "tol": 1e-5})";
    }
    SUBCASE("grid rows = points x fractions") {
        const fs::path out = scratch_dir() / "sweep.csv";
        const auto result = run("sweep " + kSmallSynth + " --config " + cfg.string() +
                                " --alpha-grid 0.001,0.01,0.1,1,10,100,1000 --beta 0.1 "
                                "--fractions 0.1,0.3 --restarts 3 --seed 1 --out " + out.string());
        CHECK(result.exit_code == 0);
        const auto lines = csv_lines(out);
        REQUIRE(lines.size() == 15);  // header + 7 alphas x 2 fractions
        CHECK(lines[0] == "alpha,beta,fraction,acc,nmi,balance,proportion");
        // rows sorted by (alpha, beta, fraction)
        CHECK(split(lines[1])[0] == "0.001");
        CHECK(split(lines[14])[0] == "1000");
    }
    SUBCASE("ablate-g writes a sibling table") {
        const fs::path out = scratch_dir() / "sweep_ablate.csv";
        const auto result = run("sweep " + kSmallSynth + " --config " + cfg.string() +
                                " --alpha-grid 1 --fractions 0.2 --restarts 3 --seed 1 "
                                "--ablate-g --out " + out.string());
        CHECK(result.exit_code == 0);
        CHECK(fs::exists(scratch_dir() / "sweep_ablate.ablated.csv"));
        CHECK(csv_lines(scratch_dir() / "sweep_ablate.ablated.csv").size() == 2);
    }
    SUBCASE("empty grid is a config error") {
        const auto result = run("sweep " + kSmallSynth + " --out " +
                                (scratch_dir() / "empty.csv").string());
        CHECK(result.exit_code == 1);
        CHECK(result.err.find("grid") != std::string::npos);
    }
}

TEST_CASE("config file with unknown key fails with exit 1") {
    const fs::path cfg = scratch_dir() / "typo.json";
    {
        std::ofstream out(cfg);
        out << R"({"alhpa": 1.0})";
    }
    const auto result = run("select " + kSmallSynth + " --config " + cfg.string() + " --out " +
                            (scratch_dir() / "typo_out.json").string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("alhpa") != std::string::npos);
}

TEST_CASE("unknown flags exit with code 1") {
    CHECK(run("select --bogus-flag").exit_code == 1);
    CHECK(run("frobnicate").exit_code == 1);
}

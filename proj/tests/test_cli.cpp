#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "config.hpp"
#include "runner.hpp"

using namespace urysohn;
using namespace urysohn::cli;
namespace fs = std::filesystem;

namespace {

const std::string kLin1 = R"([system]
name = LIN1

[grid]
resolution = 32

[experiment]
epsilon = 0.4, 0.2 0.1
samples = 20
random_members = 16
seed = 5

[schedule]
R_star = 1
)";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("urysohn_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(URYSOHN_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string message_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_CASE("config grammar and defaults") {
  const auto cfg = parse_config(kLin1);
  CHECK(cfg.system_name == "LIN1");
  CHECK(cfg.resolution == 32);
  CHECK(cfg.epsilons == std::vector<double>{0.4, 0.2, 0.1});
  CHECK(cfg.sample_count == 20);
  CHECK(cfg.random_members == 16);
  CHECK(cfg.seed == 5);
  CHECK(cfg.R_star == 1.0);
  CHECK_FALSE(cfg.tau_cap);
  CHECK(cfg.cap == 100000);
  CHECK(cfg.tol == 1e-10);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.emit_csv);
  CHECK(cfg.emit_svg);
  CHECK(cfg.source == kLin1);

  const auto full = parse_config("; comment\n[system]\nname = ROT2\n[experiment]\nepsilon = 0.5\ncap = 10\n"
                                 "tol = 1e-9\nmax_iter = 50\nworkers = 2\n[schedule]\ntau_cap = 0.25\n"
                                 "[output]\ndir = here\ncsv = false\njson = no\nsvg = off\n");
  CHECK(full.cap == 10);
  CHECK(full.tol == 1e-9);
  CHECK(full.max_iter == 50);
  CHECK(full.workers == 2);
  CHECK(full.tau_cap == 0.25);
  CHECK(full.out_dir == "here");
  CHECK_FALSE(full.emit_csv);
  CHECK_FALSE(full.emit_json);
  CHECK_FALSE(full.emit_svg);
}

TEST_CASE("config errors name the field") {
  CHECK(message_of("[experiment]\nepsilon = 0.1\n").find("[system] name") != std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\n").find("[experiment] epsilon") != std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\n[experiment]\nepsilon = 0.1, -2\n").find("epsilon") != std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\n[experiment]\nepsilon = 0.1\nsamples = 0\n").find("samples") !=
        std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\n[experiment]\nepsilon = abc\n").find("epsilon") != std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\nnmae = 2\n[experiment]\nepsilon = 0.1\n").find("nmae") !=
        std::string::npos);
  CHECK(message_of("[sytem]\nname = LIN1\n").find("sytem") != std::string::npos);
  CHECK(message_of("[system]\nname = NOPE\n[experiment]\nepsilon = 0.1\n").find("NOPE") != std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\na = 2\n[experiment]\nepsilon = 0.1\n").find("[system] a") !=
        std::string::npos);
  CHECK(message_of("[system]\nname = linear\nlambda = 0.1\nrho = 1\n[experiment]\nepsilon = 0.1\n")
            .find("[system] a") != std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\n[grid]\nresolution = 0\n[experiment]\nepsilon = 0.1\n")
            .find("resolution") != std::string::npos);
  CHECK(message_of("[system]\nname = LIN1\n[output]\ncsv = maybe\n[experiment]\nepsilon = 0.1\n").find("csv") !=
        std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("inline linear systems") {
  const auto cfg = parse_config("[system]\nname = linear\na = 0.1\nkernel = gauss 2 0.5\nlambda = 0.2\nrho = 1.5\n"
                                "lower = 0, 0\nupper = 1, 2\n[experiment]\nepsilon = 0.3\n");
  const auto sys = make_system(cfg);
  CHECK(sys.domain_dim() == 2);
  CHECK(sys.rho == 1.5);
  CHECK(sys.k2_state_independent);
  VectorXd xi(2), s(2);
  xi << 0.2, 0.4;
  s << 0.7, 1.0;
  CHECK(sys.k2(xi, s, VectorXd::Zero(1))(0, 0) == doctest::Approx(2.0 * std::exp(-0.61 / 0.25)));

  const auto lin = make_system(parse_config("[system]\nname = linear\na = 0.1\nlambda = 0.1\nrho = 1\n"
                                            "[experiment]\nepsilon = 0.3\n"));
  const auto g = build_grid(lin.domain, Index(16));
  CHECK(compute_constants(lin, g).c_star == doctest::Approx(0.628539).epsilon(1e-6));
  CHECK_THROWS_AS(make_system(parse_config("[system]\nname = linear\na = 1.5\nlambda = 0.1\nrho = 1\n"
                                           "[experiment]\nepsilon = 0.3\n")),
                  ConfigError);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("results table") {
  const auto cfg = parse_config(kLin1);
  const auto result = run_experiment(cfg);
  const auto csv = results_csv(result);
  CHECK(csv.find('\r') == std::string::npos);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "epsilon,alpha_star,Delta_star,delta_star,sigma_star,c_star,g1,g2,bound,sampled_max_distance,pass");
  int rows = 0;
  for (std::string line; std::getline(in, line); ++rows) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');)
      cells.push_back(c);
    REQUIRE(cells.size() == 11);
    const double eps = std::stod(cells[0]);
    CHECK(std::stod(cells[8]) == doctest::Approx(1.628539 * eps).epsilon(1e-6));
    CHECK(std::stod(cells[9]) <= std::stod(cells[8]));
    CHECK(cells[10] == "true");
  }
  CHECK(rows == 3);
  CHECK(result.all_passed());

  // every CSV number follows from the manifest inputs
  const auto m = nlohmann::json::parse(manifest_json(cfg, result));
  CHECK(m["seed"] == 5);
  CHECK(m["config_sha256"] == sha256_hex(kLin1));
  CHECK(m["csv"]["columns_version"] == kCsvColumnsVersion);
  const auto sys = builtin_system(m["inputs"]["system"].get<std::string>());
  const auto consts = compute_constants(sys, build_grid(sys.domain, m["inputs"]["resolution"].get<Index>()));
  for (const auto& row : m["results"]) {
    const auto s = schedule(consts, row["epsilon"].get<double>(), row["R_star"].get<double>());
    CHECK(s.alpha_star == row["alpha_star"].get<double>());
    CHECK(s.Delta_star == row["Delta_star"].get<double>());
    CHECK(s.sigma_star == row["sigma_star"].get<double>());
    CHECK(s.bound == row["bound"].get<double>());
  }
  const auto svg = convergence_svg(result);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("constants table") {
  bool passes = false;
  const auto t = constants_table(builtin_system("LIN1"), 32, passes);
  CHECK(passes);
  CHECK(t.find("0.628539") != std::string::npos);
  CHECK(t.find("0.06  ok") != std::string::npos);
  const auto z = constants_table(builtin_system("ZERO"), 8, passes);
  CHECK(z.find("g2                               0") != std::string::npos);
}

TEST_CASE("command line behaviour") {
  const auto dir = scratch("cmd");
  spit(dir / "lin1.ini", kLin1);
  spit(dir / "noname.ini", "[experiment]\nepsilon = 0.1\n");
  spit(dir / "fail.ini", "[system]\nname = linear\na = 0.5\nb = 0.3\nkernel = 0\nlambda = 1\nrho = 1\n"
                         "[experiment]\nepsilon = 0.1\n");

  SUBCASE("dry run writes nothing") {
    const auto r = invoke("run " + (dir / "lin1.ini").string() + " --dry-run --out " + (dir / "dry").string(), dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("eps 0.2") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "dry"));
  }
  SUBCASE("missing system name") {
    const auto r = invoke("run " + (dir / "noname.ini").string(), dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("[system] name") != std::string::npos);
  }
  SUBCASE("usage errors") {
    CHECK(invoke("", dir).code == 1);
    CHECK(invoke("run", dir).code == 1);
    CHECK(invoke("frobnicate", dir).code == 1);
    CHECK(invoke("constants NOPE", dir).code == 1);
  }
  SUBCASE("failing system") {
    CHECK(invoke("run " + (dir / "fail.ini").string() + " --out " + (dir / "f").string(), dir).code == 2);
    const auto r = invoke("constants " + (dir / "fail.ini").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.out.find("FAILS") != std::string::npos);
  }
  SUBCASE("repeated runs are byte identical") {
    const auto a = invoke("run " + (dir / "lin1.ini").string() + " --out " + (dir / "a").string(), dir);
    const auto b = invoke("run " + (dir / "lin1.ini").string() + " --out " + (dir / "b").string(), dir);
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    for (const char* f : {"results.csv", "manifest.json", "convergence.svg"}) {
      CAPTURE(f);
      REQUIRE(fs::exists(dir / "a" / f));
      CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto c = invoke("run " + (dir / "lin1.ini").string() + " --seed 6 --out " + (dir / "c").string(), dir);
    CHECK(c.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "c" / "manifest.json"))["seed"] == 6);
  }
  fs::remove_all(dir);
}

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "symw/symmetry.hpp"
#include "symw/tensor.hpp"

#ifndef SYMW_CLI_PATH
#error "SYMW_CLI_PATH must point at the built CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "symw_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const std::string cmd =
      std::string(SYMW_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  return result;
}

}  // namespace

TEST_CASE("orbits prints toeplitz diagonals") {
  const auto r = run_cli("orbits --kind toeplitz --k 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("M=5") != std::string::npos);
  CHECK(r.out.find("eta=44.44%") != std::string::npos);
  // constant diagonals: row i shifts the previous row right by one id
  CHECK(r.out.find("0 1 2") != std::string::npos);
  CHECK(r.out.find("3 0 1") != std::string::npos);
  CHECK(r.out.find("4 3 0") != std::string::npos);
}

TEST_CASE("orbits marks the central-skew center") {
  const auto r = run_cli("orbits --kind central-skew --k 5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("M=12") != std::string::npos);
  CHECK(r.out.find("×") != std::string::npos);
}

TEST_CASE("orbits of the 1x1 identity") {
  const auto r = run_cli("orbits --kind none --k 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("M=1") != std::string::npos);
}

TEST_CASE("invalid symmetry name is a usage error") {
  const auto r = run_cli("orbits --kind bogus --k 3");
  CHECK(r.exit_code == 2);
}

TEST_CASE("help text lists all ten symmetry names") {
  const auto r = run_cli("transmit --help");
  CHECK(r.exit_code == 0);
  for (const char* name : {"none", "central-even", "central-skew", "horizontal", "vertical",
                           "main-diagonal", "anti-diagonal", "rot90", "radial", "toeplitz"}) {
    CAPTURE(name);
    CHECK(r.out.find(name) != std::string::npos);
  }
}

TEST_CASE("even k fails with a format-class exit code") {
  const auto r = run_cli("orbits --kind none --k 4");
  CHECK(r.exit_code == 3);
}

TEST_CASE("missing bundle file maps to the I/O exit code") {
  const auto r = run_cli("transmit --in /nonexistent/x.symw");
  CHECK(r.exit_code == 4);
}

TEST_CASE("bad magic maps to the format exit code") {
  const fs::path bad = work_dir() / "bad.symw";
  std::ofstream(bad, std::ios::binary) << "XXXX not a bundle";
  const auto r = run_cli("transmit --in " + bad.string());
  CHECK(r.exit_code == 3);
}

TEST_CASE("make-bundle, encode, decode round trip") {
  const fs::path bundle = work_dir() / "model.symw";
  const fs::path payload = work_dir() / "model.symp";
  const fs::path decoded = work_dir() / "decoded.symw";

  CHECK(run_cli("make-bundle --out " + bundle.string() + " --shapes 4x2x3,8x4x5 --seed 7")
            .exit_code == 0);
  CHECK(run_cli("encode --in " + bundle.string() + " --out " + payload.string() +
                " --codec dof --symmetry central-skew --bits 16")
            .exit_code == 0);
  CHECK(run_cli("decode --in " + payload.string() + " --out " + decoded.string() + " --project")
            .exit_code == 0);

  const symw::ModelBundle original = symw::load_bundle(bundle);
  const symw::ModelBundle roundtrip = symw::load_bundle(decoded);
  REQUIRE(roundtrip.layers.size() == original.layers.size());
  // decode reproduces the projected weights up to the b=16 quantizer step
  for (std::size_t l = 0; l < original.layers.size(); ++l) {
    const auto& w = original.layers[l].weights;
    CHECK(roundtrip.layers[l].weights.same_shape(w));
    const auto projected =
        symw::project(w, symw::orbit_map(symw::SymmetryKind::CentralSkew, w.k));
    CHECK(symw::frobenius_distance(roundtrip.layers[l].weights, projected) < 1e-3);
  }
}

TEST_CASE("noiseless transmit reports full delivery and a CSV row") {
  const fs::path bundle = work_dir() / "tx.symw";
  const fs::path csv = work_dir() / "tx.csv";
  REQUIRE(run_cli("make-bundle --out " + bundle.string() + " --shapes 8x8x3 --seed 3").exit_code ==
          0);

  const auto r = run_cli("transmit --in " + bundle.string() +
                         " --codec dof --symmetry central-skew --bits 8 --snr-db 200 --csv " +
                         csv.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("delivered_frac=1") != std::string::npos);
  CHECK(r.out.find("reduction_pct=55.56") != std::string::npos);

  const std::string csv_text = slurp(csv);
  CHECK(csv_text.find("codec,symmetry,") == 0);
  CHECK(csv_text.find("dof,central-skew,8,200,") != std::string::npos);
}

TEST_CASE("fixed seed makes transmit reproducible") {
  const fs::path bundle = work_dir() / "det.symw";
  REQUIRE(run_cli("make-bundle --out " + bundle.string() + " --shapes 16x8x3 --seed 5").exit_code ==
          0);
  const std::string args = "transmit --in " + bundle.string() +
                           " --codec full --symmetry none --bits 8 --snr-db 8 --seed 123";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);

  const auto c = run_cli(args + "4");  // different seed
  CHECK(c.exit_code == 0);
  CHECK(c.out != a.out);
}

TEST_CASE("sweep writes the CSV described by its config") {
  const fs::path bundle = work_dir() / "sweep.symw";
  const fs::path config = work_dir() / "sweep.cfg";
  const fs::path out = work_dir() / "sweep.csv";
  REQUIRE(run_cli("make-bundle --out " + bundle.string() + " --shapes 4x4x3 --seed 9").exit_code ==
          0);

  std::ofstream cfg(config);
  cfg << "# minimal one-cell sweep\n"
      << "bundle = " << bundle.string() << "\n"
      << "output = " << out.string() << "\n"
      << "codecs = dof\n"
      << "symmetries = rot90\n"
      << "bits = 8\n"
      << "snr_db = 10\n"
      << "seeds = 1\n";
  cfg.close();

  const auto r = run_cli("sweep --config " + config.string());
  CHECK(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("codec,symmetry,") == 0);
  std::size_t lines = 0;
  for (char ch : text) lines += (ch == '\n');
  CHECK(lines == 2);  // header + single row
  CHECK(text.find("dof,rot90,8,10,1,") != std::string::npos);
}

TEST_CASE("sweep with several seeds appends mean and se rows") {
  const fs::path bundle = work_dir() / "sweep10.symw";
  const fs::path config = work_dir() / "sweep10.cfg";
  const fs::path out = work_dir() / "sweep10.csv";
  REQUIRE(run_cli("make-bundle --out " + bundle.string() + " --shapes 4x4x3 --seed 9").exit_code ==
          0);

  std::ofstream cfg(config);
  cfg << "bundle = " << bundle.string() << "\noutput = " << out.string()
      << "\ncodecs = dof\nsymmetries = central-even\nbits = 8\nsnr_db = 6\n"
      << "seeds = 1,2,3,4,5,6,7,8,9,10\n";
  cfg.close();

  REQUIRE(run_cli("sweep --config " + config.string()).exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find(",mean,") != std::string::npos);
  CHECK(text.find(",se,") != std::string::npos);
}

TEST_CASE("full-grid sweep reproduces the K=3 reduction column end to end") {
  const fs::path bundle = work_dir() / "grid.symw";
  const fs::path config = work_dir() / "grid.cfg";
  const fs::path out = work_dir() / "grid.csv";
  REQUIRE(run_cli("make-bundle --out " + bundle.string() + " --shapes 2x2x3 --seed 1").exit_code ==
          0);
  std::ofstream cfg(config);
  cfg << "bundle = " << bundle.string() << "\noutput = " << out.string()
      << "\ncodecs = dof\nbits = 8\nsnr_db = 10\nseeds = 7\n"
      << "symmetries = none, central-even, central-skew, horizontal, vertical, "
         "main-diagonal, anti-diagonal, rot90, radial, toeplitz\n";
  cfg.close();
  REQUIRE(run_cli("sweep --config " + config.string()).exit_code == 0);

  const std::vector<double> expected = {0.00,  44.44, 55.56, 33.33, 33.33,
                                        33.33, 33.33, 66.67, 66.67, 44.44};
  std::istringstream lines(slurp(out));
  std::string line;
  std::getline(lines, line);  // header
  for (double want : expected) {
    REQUIRE(std::getline(lines, line));
    std::istringstream fields(line);
    std::string field;
    for (int i = 0; i < 7; ++i) std::getline(fields, field, ',');
    CHECK(std::abs(std::stod(field) - want) <= 0.01);
  }
}

TEST_CASE("bad sweep config key is a format error") {
  const fs::path config = work_dir() / "bad.cfg";
  std::ofstream(config) << "bundel = typo.symw\n";
  CHECK(run_cli("sweep --config " + config.string()).exit_code == 3);
}

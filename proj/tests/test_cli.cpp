#include <oscurve/cli.hpp>

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace oscurve::cli;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "oscurve-run");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t data_rows(const std::string& csv) {
  const auto ls = lines(csv);
  const std::size_t body =
      std::count_if(ls.begin(), ls.end(), [](const std::string& l) { return !l.empty() && l[0] != '#'; });
  return body == 0 ? 0 : body - 1;  // minus the column header
}

bool has_line(const std::string& text, const std::string& line) {
  const auto ls = lines(text);
  return std::find(ls.begin(), ls.end(), line) != ls.end();
}

}  // namespace

TEST_CASE("derive reports the leading lattice exponent") {
  const Run r = run({"derive", "--n", "3", "--alpha", "1", "--beta", "3"});
  REQUIRE(r.status == 0);
  CHECK(has_line(r.out, "cos,27,0,3,3,12"));
  CHECK(has_line(r.out, "# summary degree=12"));
  CHECK(has_line(r.out, "# summary expected_degree=12"));
  CHECK(has_line(r.out, "# command=derive"));
}

TEST_CASE("cover --k 0 on sin(2 pi t) has two rows") {
  const Run r = run({"cover", "--k", "0"});
  REQUIRE(r.status == 0);
  CHECK(data_rows(r.out) == 2);
  CHECK(has_line(r.out, "# summary N=2"));
}

TEST_CASE("sharpness with beta = 3 diverges") {
  const Run r = run({"sharpness", "--n", "3", "--alpha", "1", "--beta", "3", "--format", "json"});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["summary"]["verdict"] == "diverges");
  CHECK(j["summary"]["ratio_slope"].get<double>() == doctest::Approx(-0.5).epsilon(0.1));
  REQUIRE(j["rows"].size() == 12);
  const auto& J = j["rows"][0]["J"];
  CHECK(J.contains("mantissa"));
  CHECK(J.contains("scale2"));
  CHECK(J.contains("log10"));
  const double m = J["mantissa"].get<double>();
  const double s = J["scale2"].get<double>();
  CHECK(J["log10"].get<double>() == doctest::Approx(std::log10(std::abs(m)) + s * std::log10(2.0)));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"nonsense"}).status == 2);
  CHECK(run({}).status == 2);
  CHECK(run({"derive", "--bogus", "1"}).status == 2);
  CHECK(run({"derive", "--k", "3"}).status == 2);
  CHECK(run({"derive", "--n", "abc"}).status == 2);
  CHECK(run({"cover", "--k", "0", "--r", "1"}).status == 2);
  CHECK(run({"sharpness", "--beta", "0.5"}).status == 2);
  CHECK(run({"sharpness", "--delta-grid", "0.1,0.5"}).status == 2);
  CHECK(run({"derive", "--format", "xml"}).status == 2);
  const Run r = run({"dyadic-sum", "--p", "0.5"});
  CHECK(r.status == 2);
  CHECK(r.err.find("usage error") != std::string::npos);
}

TEST_CASE("computation errors exit with 1 and name the operation") {
  const Run r = run({"torsion", "--domain", "-1,1"});
  CHECK(r.status == 1);
  CHECK(r.err.find("error in curve_geometry::") == 0);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  for (const std::string fmt : {"csv", "json"}) {
    const Run a = run({"jacobian", "--samples", "300", "--seed", "42", "--format", fmt});
    const Run b = run({"jacobian", "--samples", "300", "--seed", "42", "--format", fmt});
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const Run c = run({"jacobian", "--samples", "300", "--seed", "43", "--format", fmt});
    CHECK(c.out != a.out);
  }
  const Run d1 = run({"dyadic-sum", "--k-range", "auto:6"});
  const Run d2 = run({"dyadic-sum", "--k-range", "auto:6"});
  CHECK(d1.out == d2.out);
}

TEST_CASE("every artifact echoes the resolved parameters") {
  for (const std::string& cmd : commands()) {
    ExperimentConfig cfg;
    cfg.command = cmd;
    const auto resolved = resolve(cfg);
    std::vector<std::string> args{cmd};
    if (cmd == "sharpness") args = {cmd, "--delta-grid", "0.1,0.2"};
    if (cmd == "dyadic-sum") args = {cmd, "--k-range", "auto:3"};
    if (cmd == "jacobian" || cmd == "torsion") args = {cmd, "--samples", "10"};
    const Run r = run(args);
    REQUIRE(r.status == 0);
    CHECK(has_line(r.out, "# checksum=" + config_checksum(parse_command_line(
                                                static_cast<int>(args.size() + 1),
                                                [&] {
                                                  static std::vector<const char*> v;
                                                  v = {"oscurve-run"};
                                                  for (const auto& a : args) v.push_back(a.c_str());
                                                  return v.data();
                                                }()))));
    for (const auto& [key, value] : resolved) {
      if (cmd == "sharpness" && key == "delta-grid") continue;
      if (cmd == "dyadic-sum" && key == "k-range") continue;
      if ((cmd == "jacobian" || cmd == "torsion") && key == "samples") continue;
      if (key == "rho" || key == "q" || key == "k" || key == "r") continue;
      CHECK(has_line(r.out, "# param " + key + "=" + value));
    }
    CHECK(has_line(r.out, "# command=" + cmd));
  }
}

TEST_CASE("config file with flag override, written atomically") {
  const auto dir = std::filesystem::temp_directory_path() / "oscurve_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg_path = dir / "derive.cfg";
  {
    std::ofstream f(cfg_path);
    f << "# derivative table\ncommand = derive\nn = 4\nbeta = 3   # trailing comment\n";
  }
  const auto out_path = dir / "out.csv";
  std::filesystem::remove(out_path);
  const Run r = run({"--config", cfg_path.string(), "--n", "2", "-o", out_path.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(has_line(ss.str(), "# param n=2"));
  CHECK(has_line(ss.str(), "# param beta=3"));
  CHECK(has_line(ss.str(), "# summary degree=8"));
  CHECK_FALSE(std::filesystem::exists(out_path.string() + ".tmp"));

  const ExperimentConfig parsed = parse_config_text("command = knapp\np = 1.2\nformat = json\n");
  CHECK(parsed.command == "knapp");
  CHECK(parsed.format == "json");
  CHECK(parsed.params.at("p") == "1.2");
  CHECK_THROWS_AS(parse_config_text("no equals sign"), UsageError);
  CHECK_THROWS_AS(parse_config_text("colour = blue"), UsageError);
  CHECK(run({"--config", (dir / "missing.cfg").string()}).status == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("checksum depends on the resolved parameters only") {
  ExperimentConfig a;
  a.command = "derive";
  ExperimentConfig b = a;
  b.params["n"] = "3";  // the default, spelled out
  CHECK(config_checksum(a) == config_checksum(b));
  b.params["n"] = "4";
  CHECK(config_checksum(a) != config_checksum(b));
  b = a;
  b.format = "json";
  CHECK(config_checksum(a) != config_checksum(b));
}

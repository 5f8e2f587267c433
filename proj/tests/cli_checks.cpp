// Exit-code and output contract checks for the command-line tool, driven
// through the shell so the real binary is what gets exercised.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int failures = 0;

int run(const std::string& args) {
  const std::string cmd = std::string(PVFIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void check(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

}  // namespace

int main() {
  const fs::path out = fs::temp_directory_path() / "pvfit_cli_checks";
  fs::remove_all(out);
  fs::create_directories(out);
  const std::string data = std::string(PVFIT_DATA_DIR) + "/rtc_france.csv";

  check(run("info") == 0, "info exits 0");
  check(run("") == 2, "missing subcommand exits 2");
  check(run("fit --model sdm --temp-c 33") == 2, "missing --data exits 2");
  check(run("fit --model sdm --data " + data + " --temp-c 33 --bogus 1") == 2,
        "unknown flag exits 2");
  check(run("fit --model tdm --data " + data + " --temp-c 33") == 2, "bad model exits 2");
  check(run("fit --model sdm --data /no/such/file.csv --temp-c 33") == 1,
        "missing dataset file exits 1");
  check(run("bench --cases nope") == 2, "unknown bench case exits 2");

  const std::string fit_out = (out / "fit").string();
  check(run("fit --model sdm --data " + data + " --temp-c 33 --gens 60 --seed 4 --out " +
            fit_out) == 0,
        "small fit exits 0");
  {
    std::ifstream in(fit_out + "/report.json");
    nlohmann::json j;
    bool parsed = false;
    if (in) {
      in >> j;
      parsed = j.contains("meta") && j.contains("stats") && j.contains("best") &&
               j.contains("files") && j["meta"]["model"] == "sdm" &&
               j["meta"]["dataset"] == "rtc_france";
    }
    check(parsed, "fit report carries the documented schema");
    check(fs::exists(fit_out + "/curve.csv") && fs::exists(fit_out + "/history.csv"),
          "fit writes curve and history tables");
  }

  const std::string cert_out = (out / "cert").string();
  check(run("certify --model sdm --data " + data + " --temp-c 33 --max-boxes 1 --out " +
            cert_out) == 0,
        "certify with a one-box budget exits 0");
  {
    std::ifstream in(cert_out + "/certify.json");
    nlohmann::json j;
    bool ok = false;
    if (in) {
      in >> j;
      ok = j["terminated_by"] == "box_cap" && j["rmse_lower"].get<double>() >= 0.0 &&
           j["rmse_lower"].get<double>() <= j["rmse_upper"].get<double>() &&
           j["certified"] == false;
    }
    check(ok, "budget-capped certify reports rigorous loose bounds");
  }

  const std::string curve_out = (out / "curve").string();
  check(run("curve --model sdm --data " + data +
            " --temp-c 33 --theta 0.760775,0.323021,1.481184,0.036377,53.71852 --out " +
            curve_out) == 0,
        "curve reconstruction exits 0");
  check(run("curve --model sdm --data " + data + " --temp-c 33 --theta 1,2,3 --out " +
            curve_out) == 2,
        "wrong theta arity exits 2");

  fs::remove_all(out);
  if (failures > 0) {
    std::printf("%d check(s) failed\n", failures);
    return 1;
  }
  std::printf("all cli checks passed\n");
  return 0;
}

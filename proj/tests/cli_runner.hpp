#pragma once

// Runs the chainbk executable through the shell. Used by the CLI tests and
// the acceptance gate.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace test {

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

/// Exit status of `chainbk args...`; stdout and stderr go to `log`.
inline int run_cli(const std::string& exe, const std::vector<std::string>& args,
                   const std::filesystem::path& log) {
  std::string cmd = shell_quote(exe);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " > " + shell_quote(log.string()) + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
#ifdef WEXITSTATUS
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  return status;
#endif
}

/// generate -> calibrate -> cascade on the three-firm chain scenario.
/// Returns the first nonzero exit status, or 0.
inline int cli_chain_round_trip(const std::string& exe, const std::filesystem::path& scenario,
                                const std::filesystem::path& dir) {
  const auto d = [&](const char* name) { return (dir / name).string(); };
  const std::string cfg = scenario.string();
  const std::vector<std::vector<std::string>> steps{
      {"generate", "--config", cfg, "--firms", "3", "--periods", "6", "--edge-model", "chain",
       "--k-range", "1", "1", "--equity-range", "0", "0", "--noise", "off", "--seed", "3",
       "--out-dir", dir.string()},
      {"calibrate", "--config", cfg, "--panel", d("panel.csv"), "--edges", d("edges.csv"),
       "--gdp", d("gdp.csv"), "--out-dir", dir.string()},
      {"cascade", "--config", cfg, "--panel", d("panel.csv"), "--edges", d("edges.csv"),
       "--gdp", d("gdp.csv"), "--params", d("params.csv"), "--fit", d("fit_report.json"),
       "--trigger", "F0002", "--out-dir", dir.string()}};
  for (const auto& s : steps) {
    const int rc = run_cli(exe, s, dir / (s.front() + ".log"));
    if (rc != 0) return rc;
  }
  return 0;
}

}  // namespace test

#pragma once

// Drives the command-line tool from tests. Commands run from inside a work
// directory with relative paths so that two runs in different directories
// produce comparable manifests.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace cli {

namespace fs = std::filesystem;

inline std::string binary() { return INCDYN_CLI; }

struct Result {
  int code = -1;
  std::string err;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Result run(const fs::path& cwd, const std::string& args) {
  fs::create_directories(cwd);
  const fs::path err = cwd / ".stderr";
  const std::string cmd = "cd '" + cwd.string() + "' && '" + binary() + "' " + args + " > /dev/null 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  fs::remove(err);
  return r;
}

// Every subcommand on a small simulated panel. Returns the failing command
// line, or an empty string when all succeed.
inline std::string pipeline(const fs::path& root, std::size_t iters = 300, std::size_t burnin = 150) {
  const std::string fitargs = " --iters " + std::to_string(iters) + " --burnin " + std::to_string(burnin);
  const std::vector<std::string> commands = {
      "simulate --seed 5 --z 160 --periods 6 --per-year 60 --out sim",
      "fit --in sim/panel.csv --model rw --seed 3" + fitargs + " --out fit_rw",
      "fit --in sim/panel.csv --model rw-hs --seed 3" + fitargs + " --out fit_hs",
      "fit --in sim/panel.csv --model ind --seed 3" + fitargs + " --out fit_ind",
      "welfare --in fit_rw --z 160 --out welfare",
      "dominance --in fit_rw --years 2006,2001 --out dom",
      "dominance --in fit_rw --in-b fit_ind --years 2003,2003 --relation fsd,ld --range 0.001:0.100 --grid 999 --out dom_poor",
      "forecast --in fit_hs --horizon 3 --seed 4 --z 160 --grid 99 --out forecast",
      "curves --in fit_rw --z 160 --grid 99 --years 2001,2006 --out curves",
      "cv --in sim/panel.csv --model rw --seed 2 --folds 3 --threads 2" + fitargs + " --out cv",
  };
  for (const auto& c : commands) {
    const auto r = run(root, c);
    if (r.code != 0) return c + " -> exit " + std::to_string(r.code) + ": " + r.err;
  }
  return "";
}

// Relative paths of all regular files under `root`, with their contents.
inline std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

// Files that differ or exist on one side only.
inline std::vector<std::string> tree_differences(const fs::path& a, const fs::path& b) {
  const auto ta = tree(a), tb = tree(b);
  std::vector<std::string> diff;
  for (const auto& [k, v] : ta) {
    auto it = tb.find(k);
    if (it == tb.end() || it->second != v) diff.push_back(k);
  }
  for (const auto& [k, v] : tb) {
    if (!ta.count(k)) diff.push_back(k);
  }
  return diff;
}

}  // namespace cli

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace prmnav::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Relative paths resolve against the workspace root.
struct Workspace {
  std::filesystem::path root = std::filesystem::current_path();
  std::filesystem::path resolve(const std::string& p) const;
};

// Loads a JSON config file, or {} when `path` is empty. Throws ConfigError.
nlohmann::json load_config(const Workspace& ws, const std::string& path);

}  // namespace prmnav::cli

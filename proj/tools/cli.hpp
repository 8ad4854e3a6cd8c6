#pragma once

// escrate <pressure|escape|dimension|oracle> --config <path> [--out dir]
//         [--depth N] [--seed S] [--format csv|json]

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace escrate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct Options {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> depth;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
};

/// Parses argv and runs; errors go to `err` as one JSON object per line.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Runs one command. The summary JSON is printed to `out` and written next
/// to the tables in the output directory.
int run(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace escrate::cli

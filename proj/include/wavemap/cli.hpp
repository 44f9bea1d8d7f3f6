#pragma once

// Command-line front end: subcommand dispatch, key=value config files,
// deterministic manifests and the text formats shared by all outputs.
//
// Exit codes: 0 success, 1 unexpected failure, 2 bad input or usage,
// 3 numerical failure, 4 output could not be written.

#include "wavemap/core.hpp"
#include "wavemap/profile.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavemap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitOutput = 4;

/// Output file could not be created or written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Round-trippable decimal form (%.17g).
std::string format_double(double v);

/// Flat key=value file; '#' starts a comment, blank lines are ignored.
/// Throws InputError on a malformed line or a repeated key.
std::map<std::string, std::string> read_config(const std::filesystem::path& path);

/// --out if given, else $WAVEMAP_OUTDIR, else the working directory.
std::filesystem::path resolve_output_dir(const std::string& flag);

/// Columnar slice file: '# key=value' metadata, header x,phi_1..phi_m, rows.
void write_slice(const std::filesystem::path& path, const SphereSlice& slice, const Metadata& meta);
/// Throws InputError if the file is missing, ragged or not on a uniform grid.
SphereSlice read_slice(const std::filesystem::path& path, std::map<std::string, std::string>* meta = nullptr);

/// Profile file: metadata (C, alpha, residual, source time) plus columns
/// s, F_1..F_m, G_1..G_m.
void write_profile(const std::filesystem::path& path, const AsymptoticProfile& p, const Metadata& meta);
AsymptoticProfile read_profile(const std::filesystem::path& path);

/// Parses args (program name excluded), runs the subcommand and returns the
/// exit code. Diagnostics go to stderr, summaries to stdout.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace wavemap::cli

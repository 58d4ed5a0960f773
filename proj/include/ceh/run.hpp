#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ceh/solve.hpp"

namespace ceh::run {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes besides the solve statuses (see exit_code(SolveStatus)).
namespace exit_codes {
inline constexpr int kOk = 0;
inline constexpr int kOtherError = 1;
inline constexpr int kInputError = 2;
inline constexpr int kInfeasibleSession = 3;
inline constexpr int kCrosscheckMismatch = 40;
inline constexpr int kEnumerationTooLarge = 41;
inline constexpr int kValidationFailure = 50;
inline constexpr int kBackendUnavailable = 60;
}  // namespace exit_codes

/// Maps a library error to its exit code.
int exit_code_for(const std::exception& error);

struct RunOptions {
    std::filesystem::path config;
    /// Empty: no files are written.
    std::filesystem::path out;
    SolveOptions solve;
    bool export_model = false;
    EnumerationCaps caps;
};

/// Record of one invocation, written as run_manifest.json into the output
/// directory.
struct RunManifest {
    std::string command;
    std::string config;
    std::string output_directory;
    std::string backend;
    double relative_gap = 0.0;
    double time_limit_s = 0.0;
    std::uint32_t seed = 0;
    int threads = 1;
    bool export_model = false;
    std::string started_utc;
    std::string finished_utc;
    std::string tool_version = kToolVersion;
    std::string solver_version;
    std::string status;
    std::optional<double> objective;
    int exit_code = 0;
    std::string error;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& directory);

/// Subcommands. Each prints its findings to `out`, errors to `err`, writes a
/// manifest when an output directory is given, and returns the exit code.
int cmd_validate(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_size(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_crosscheck(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_export(const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace ceh::run

#pragma once

#include "ginidyn/dynamics.hpp"
#include "ginidyn/io.hpp"
#include "ginidyn/verifier.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

namespace ginidyn::cli {

/// Process exit codes.
enum Exit : int {
    kOk = 0,
    kBoundFailure = 1,  ///< an inequality failed (verify) or a trajectory bound failed (simulate)
    kUsage = 2,         ///< bad flags, unreadable or malformed config/input
    kNumerical = 3,     ///< integrator or validation failure during a run
};

enum class Format { Csv, Json };

struct SimulateRun {
    ModelSpec model;
    SimConfig sim;
    Dist initial;
    std::optional<std::filesystem::path> output;
    Format format = Format::Csv;
};

/// Parses a simulate config; relative paths resolve against base_dir.
SimulateRun parse_simulate_config(const json& j, const std::filesystem::path& base_dir);

struct VerifyRun {
    SweepOptions sweep;
    std::optional<std::filesystem::path> output;
};

VerifyRun parse_verify_config(const json& j, const std::filesystem::path& base_dir);

/// Entry point. args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ginidyn::cli

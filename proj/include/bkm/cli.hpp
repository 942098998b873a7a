#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bkm/analytic.hpp"
#include "json.hpp"

namespace bkm {

// Exit codes of the command-line tool; a stable contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEarlyStop = 3;

std::string tool_version();

/// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Analytic field from a descriptor {"family": name, ...parameters}; keys
/// are checked strictly. A seed, when given, replaces the default seed of
/// random families that do not set one.
AnalyticFunction parse_analytic(const nlohmann::json& j, const std::string& path = "function",
                                const std::uint64_t* seed = nullptr);

/// Runs the tool: bkm <simulate|diagnose|verify|gronwall> [--config PATH]
/// [--out DIR] [--threads N] [--seed U64]. Returns an exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace bkm

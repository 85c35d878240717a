// Command-line front end: nms, assign, experiment, eval.
//
// Exit codes: 0 success, 1 domain error (contract violation, unsupported
// config), 2 I/O or parse error.
#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ddq::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Parallel trial cap from DDQ_THREADS; hardware concurrency when unset.
int threads_from_env();

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddq::cli

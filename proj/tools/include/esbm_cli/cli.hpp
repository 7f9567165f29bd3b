#pragma once

#include <atomic>
#include <iosfwd>
#include <span>
#include <string>

namespace esbm::cli {

/// Runs one subcommand. Returns 0 on success, 1 on invalid input or usage
/// errors, 2 on file I/O failures.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Full help text of every subcommand.
std::string usage();

/// Set from a signal handler to stop running chains between sweeps.
std::atomic<bool>& interrupt_flag();

}  // namespace esbm::cli

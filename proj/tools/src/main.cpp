#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "esbm_cli/cli.hpp"

namespace {

extern "C" void on_interrupt(int) { esbm::cli::interrupt_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::vector<std::string> args(argv + 1, argv + argc);
  return esbm::cli::dispatch(args, std::cout, std::cerr);
}

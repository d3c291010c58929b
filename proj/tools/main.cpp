#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return creamkit::cli::execute_command(args, std::cout, std::cerr,
                                        creamkit::cli::Environment::from_process());
}

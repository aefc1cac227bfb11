#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto result = blowup::cli::run(args);
  std::cout << blowup::cli::render(result);
  return blowup::cli::exit_code(result.status);
}

#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return botsift::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "f2ac/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return f2ac::cli::run(args, std::cout, std::cerr);
}

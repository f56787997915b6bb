#include <iostream>
#include <string>
#include <vector>

#include "gprlab/app/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return gprlab::app::run_cli(args, gprlab::app::process_environment(), std::cout, std::cerr);
}

#include <iostream>

#include "queuelib/cli/commands.hpp"

int main(int argc, char** argv) {
  return queuelib::cli::run(argc, argv, std::cout, std::cerr);
}

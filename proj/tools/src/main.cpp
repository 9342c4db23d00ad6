#include <string>
#include <vector>

#include "deblur/cli/commands.hpp"

int main(int argc, char** argv) {
  return deblur::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

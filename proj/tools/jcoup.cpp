#include <jcoup/cli.hpp>

#include <iostream>

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jcoup::cli::run(std::move(args), std::cerr);
}

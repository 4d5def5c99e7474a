#include "revmine/cli.hpp"

int main(int argc, char** argv) {
  return revmine::cli::run(argc - 1, argv + 1);
}

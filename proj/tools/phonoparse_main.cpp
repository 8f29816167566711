#include "phonoparse/cli.hpp"

int main(int argc, char** argv) {
  return phonoparse::cli::run(argc, argv);
}

#include <oscurve/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
  return oscurve::cli::main_entry(argc, argv, std::cout, std::cerr);
}

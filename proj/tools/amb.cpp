#include <string>
#include <vector>

#include "amb/cli.hpp"

int main(int argc, char** argv) { return amb::cli::execute(std::vector<std::string>(argv, argv + argc)); }

#include <string>
#include <vector>

#include "pancad/cli.hpp"

int main(int argc, char** argv) { return pancad::run(std::vector<std::string>(argv + 1, argv + argc)); }

// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "mvmt/cli/app.hpp"

int main(int argc, char** argv) { return mvmt::cli::run_cli(argc, argv, std::cout, std::cerr); }

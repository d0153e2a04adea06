// SPDX-License-Identifier: Apache-2.0

#include "mcad/cli.hpp"

int main(int argc, char** argv) { return mcad::run_cli(argc, argv); }

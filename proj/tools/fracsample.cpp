// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "fracsample/cli.hpp"

int main(int argc, char** argv) { return fracsample::run_cli(argc, argv, std::cout, std::cerr); }

// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/cli.hpp"

int main(int argc, char** argv) { return satrecon::cli::run(argc, argv); }

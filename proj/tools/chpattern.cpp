// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/cli.hpp"

int main(int argc, char** argv) { return chpattern::run_cli(argc, argv); }

// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/cli.hpp"

int main(int argc, char** argv) { return isomedia::run_cli(argc, argv); }

// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() -> std::process::ExitCode {
    qhpc::cli::main()
}

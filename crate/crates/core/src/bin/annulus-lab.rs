use std::process::ExitCode;

fn main() -> ExitCode {
    annulus_energy::lab::main_entry()
}

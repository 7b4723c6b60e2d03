use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(permeq::run(std::env::args_os()))
}

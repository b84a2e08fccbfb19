use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lame_mt::cli::run(std::env::args_os()))
}

use std::process::ExitCode;

fn main() -> ExitCode {
    aerial_rss::cli::run(std::env::args_os())
}

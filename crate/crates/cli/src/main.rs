use std::io::{stderr, stdin, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let code = tensorank_cli::dispatch(&args, &mut stdin().lock(), &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(code)
}

use std::io;
use std::process::ExitCode;

use sumsetlab::{run, Engine};

fn main() -> ExitCode {
    let code = run(std::env::args_os(), &Engine, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}

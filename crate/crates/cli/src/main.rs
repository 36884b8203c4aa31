use std::io;
use std::process::ExitCode;

use cow_settle::app::{run, PRECISION_VAR};

fn main() -> ExitCode {
    let precision = std::env::var(PRECISION_VAR).ok();
    let code = run(
        std::env::args_os(),
        precision.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}

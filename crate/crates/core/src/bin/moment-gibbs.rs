use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = moment_gibbs::cli::run(std::env::args_os(), &mut std::io::stdin().lock());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(result.stdout().as_bytes());
    let _ = stdout.flush();
    let _ = std::io::stderr().write_all(result.stderr().as_bytes());
    ExitCode::from(result.exit_code as u8)
}

use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let budget = std::env::var(spectra::cli::BUDGET_VAR).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let code = spectra::cli::run(std::env::args_os(), budget.as_deref(), &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}

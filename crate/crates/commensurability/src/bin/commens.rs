use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (out, err, code) = commensurability::cli::main_with_args(std::env::args_os());
    if !out.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = writeln!(stdout, "{}", out.trim_end());
    }
    if !err.is_empty() {
        eprint!("{err}");
    }
    ExitCode::from(code as u8)
}

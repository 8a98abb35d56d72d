use std::process::ExitCode;

fn main() -> ExitCode {
    let code = korteweg_lab::cli::main_with(std::env::args(), &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}

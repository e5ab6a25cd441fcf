use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out_dir = std::env::var_os(qbound_cli::OUT_DIR_ENV).map(PathBuf::from);
    let code = qbound_cli::run(
        std::env::args_os(),
        out_dir.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}

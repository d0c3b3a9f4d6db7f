use std::process::ExitCode;

fn main() -> ExitCode {
    let code = std::panic::catch_unwind(|| {
        qifkit::cli::main_with_args(
            std::env::args_os(),
            &mut std::io::stdout().lock(),
            &mut std::io::stderr().lock(),
        )
    })
    .unwrap_or(qifkit::cli::EXIT_INTERNAL);
    ExitCode::from(code as u8)
}

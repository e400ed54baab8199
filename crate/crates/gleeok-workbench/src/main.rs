use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = gleeok_workbench::run_to_string(std::env::args_os());
    if code == 0 || code == 1 {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    ExitCode::from(code as u8)
}

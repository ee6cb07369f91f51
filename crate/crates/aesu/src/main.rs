use std::panic;

fn main() {
    let code = panic::catch_unwind(|| aesu::cli::run(std::env::args_os())).unwrap_or(2);
    std::process::exit(code);
}

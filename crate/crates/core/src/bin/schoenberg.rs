use std::io;

fn main() {
    schoenberg::cli::configure_threads();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = schoenberg::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}

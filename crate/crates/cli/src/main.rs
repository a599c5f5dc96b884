use std::io;

fn main() {
    let mut stdout = io::stdout();
    let mut stderr = io::stderr();
    let code = dmrf_cli::run(std::env::args_os(), &mut stdout, &mut stderr);
    std::process::exit(code);
}

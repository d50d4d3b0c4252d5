use std::io;

fn main() {
    let code = fram_resonance::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}

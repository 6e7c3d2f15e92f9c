use std::io::Write;

fn main() {
    let (code, out) = noniterate_cli::run(std::env::args_os());
    if !out.is_empty() {
        // a closed pipe is not worth a panic
        let _ = writeln!(std::io::stdout().lock(), "{out}");
    }
    std::process::exit(code);
}

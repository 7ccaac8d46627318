use std::io::{Read, Write};

use eocos_cli::run_cli;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // only block on standard input when it was asked for
    let mut stdin = Vec::new();
    if args.iter().skip(1).any(|a| a == "-") {
        if let Err(e) = std::io::stdin().read_to_end(&mut stdin) {
            eprintln!("error: cannot read standard input: {e}");
            std::process::exit(3);
        }
    }
    let out = run_cli(args, &stdin);
    let _ = std::io::stdout().write_all(&out.stdout);
    let _ = std::io::stderr().write_all(&out.stderr);
    std::process::exit(out.exit.code());
}

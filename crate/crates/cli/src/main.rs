use std::io::{IsTerminal, Write};

use sphred_cli::{run, Env};

fn main() {
    let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    let env = Env { color: std::io::stdout().is_terminal() && !no_color };
    let outcome = run(std::env::args_os(), &mut std::io::stdin().lock(), env);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}

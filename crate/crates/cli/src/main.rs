use std::io;

fn main() {
    let mut stdin = io::stdin();
    let mut stdout = io::BufWriter::new(io::stdout());
    let mut stderr = io::stderr();
    let code = uniseg_cli::run(
        std::env::args_os(),
        &mut uniseg_cli::Streams {
            stdin: &mut stdin,
            stdout: &mut stdout,
            stderr: &mut stderr,
        },
    );
    drop(stdout);
    std::process::exit(code);
}

use std::time::Instant;

use clap::Parser;
use posetal_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            std::process::exit(1);
        }
    }
    let start = Instant::now();
    let status = run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    if cli.global.timing {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    std::process::exit(status.code());
}

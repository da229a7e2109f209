use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    // MAXDIST_THREADS caps parallelism; default is the hardware count.
    if let Ok(text) = std::env::var("MAXDIST_THREADS") {
        if let Ok(n) = text.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = maxdist_cli::Cli::parse();
    match maxdist_cli::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

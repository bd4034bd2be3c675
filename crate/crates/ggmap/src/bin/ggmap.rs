use clap::Parser;
use ggmap::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore the error if a pool was already installed (tests, embedding).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli) {
        Ok(outcome) => {
            if !outcome.converged {
                std::process::exit(3);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

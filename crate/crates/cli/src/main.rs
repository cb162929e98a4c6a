use std::process::ExitCode;
use std::sync::atomic::Ordering;

use clap::Parser;
use tandem_cli::{run, Cli, INTERRUPTED};

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a second interrupt falls through to the default handler
    let _ = ctrlc::set_handler(|| {
        if INTERRUPTED.swap(true, Ordering::SeqCst) {
            std::process::exit(130);
        }
    });
    ExitCode::from(run(&cli))
}

use clap::Parser;
use symbreak_cli::{configure_threads, exit, run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { exit::USAGE } else { exit::PASS });
        }
    };
    let outcome = configure_threads().and_then(|()| run(&cli));
    match outcome {
        Ok(summary) => println!("{summary}"),
        Err(failure) => {
            eprintln!("symbreak: {failure}");
            std::process::exit(failure.exit_code());
        }
    }
}

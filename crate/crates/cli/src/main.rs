use symcubature_cli::{run, Cli};

fn main() {
    let cli = Cli::parse_args();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

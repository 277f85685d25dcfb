use clap::Parser;

fn main() {
    let cli = qwalk_cli::Cli::parse();
    let code = match qwalk_cli::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qwalk: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

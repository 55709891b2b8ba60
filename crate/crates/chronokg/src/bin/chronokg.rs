use clap::Parser;

fn main() {
    let cli = chronokg::cli::Cli::parse();
    let json = cli.json;
    match chronokg::cli::execute(&cli) {
        Ok(summary) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&summary.value).unwrap());
            } else {
                eprintln!("ok: {}", summary.value);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(chronokg::cli::exit_code_for(&e));
        }
    }
}

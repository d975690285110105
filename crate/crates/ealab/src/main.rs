use std::process::ExitCode;

const USAGE: &str = "\
ealab — experiment runner for elitist (1+1) evolutionary algorithms

USAGE:
    ealab <config.json>
    ealab -h | --help

The single argument is a JSON config document whose \"cmd\" field selects the
subcommand: run, batch, drift, bound, oracle, audit, verify, sweep. Output
goes to the config's \"out\" path, or to stdout when omitted.

Exit codes: 0 success, 2 config parse/schema error, 3 verification failure,
1 other errors.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.as_slice() {
        [flag] if flag == "-h" || flag == "--help" => {
            print!("{USAGE}");
            ExitCode::SUCCESS
        }
        [path] => match ealab::cli::execute_path(path) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(err.exit_code() as u8)
            }
        },
        _ => {
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
    }
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use cdos_cli::args::{Cli, Command};
use cdos_cli::{cmd_bench, cmd_list, cmd_serve, cmd_solve, CliError};
use clap::Parser;

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve(a) => cmd_solve(&a, &mut out),
        Command::Bench(a) => match &a.out {
            Some(path) => {
                let mut file = BufWriter::new(File::create(path)?);
                cmd_bench(&a, &mut file, &mut out)?;
                file.flush()?;
                Ok(())
            }
            None => cmd_bench(&a, &mut out, &mut io::stderr()).map(drop),
        },
        Command::List => cmd_list(&mut out),
        Command::Serve { problem } => cmd_serve(&problem, &mut io::stdin().lock(), &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cdos: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod args;
mod config;
mod run;
mod selfcheck;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command, Format};
use powerwl::Exec;

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("POWERWL_THREADS") {
        Ok(v) => {
            let n = v.trim().parse::<usize>().map_err(|_| powerwl::Error::Parse(format!("POWERWL_THREADS={v:?}")))?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn configure_exec(threads: Option<usize>) -> Result<Exec> {
    match threads {
        Some(0) => Err(powerwl::Error::Domain("threads must be at least 1".into()).into()),
        Some(1) => Ok(Exec::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
            let _ = n;
            Ok(Exec::default())
        }
        None => Ok(Exec::default()),
    }
}

fn execute(cli: Cli) -> Result<(String, bool)> {
    let exec = configure_exec(thread_count(cli.global.threads)?)?;
    let name = cli.command.name();
    let default_format = match cli.command {
        Command::Fit(_) | Command::Selfcheck(_) => Format::Json,
        _ => Format::Csv,
    };
    let format = cli.global.format.unwrap_or(default_format);
    let text = match &cli.command {
        Command::DensityMacro(a) => run::density_macro(a, &run::Context::new(name, a, exec, format)?)?,
        Command::DensityMicro(a) => run::density_micro(a, &run::Context::new(name, a, exec, format)?)?,
        Command::FirstEig(a) => run::first_eig(a, &run::Context::new(name, a, exec, format)?)?,
        Command::Gap(a) => run::gap(a, &run::Context::new(name, a, exec, format)?)?,
        Command::Spacing(a) => run::spacing(a, &run::Context::new(name, a, exec, format)?)?,
        Command::FiniteN(a) => run::finite_n(a, &run::Context::new(name, a, exec, format)?)?,
        Command::Sample(a) => run::sample(a, &run::Context::new(name, a, exec, format)?)?,
        Command::Fit(a) => run::fit(a, &run::Context::new(name, a, exec, format)?)?,
        Command::Selfcheck(_) => {
            let checks = selfcheck::checks(exec);
            let ok = checks.iter().all(|c| c.passed);
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "powerwl": env!("CARGO_PKG_VERSION"),
                    "passed": ok,
                    "checks": checks,
                }))? + "\n",
                Format::Csv => {
                    let mut s = String::from("check,passed,detail\n");
                    for c in &checks {
                        s.push_str(&format!("{},{},\"{}\"\n", c.name, c.passed, c.detail.replace('"', "'")));
                    }
                    s
                }
            };
            return Ok((text, ok));
        }
    };
    Ok((text, true))
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.global.out.clone();
    match execute(cli) {
        Ok((text, ok)) => {
            let written = match &out {
                Some(path) => run::ensure_written(path, &text),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(anyhow::Error::from),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: selfcheck failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(run::exit_code(&e))
        }
    }
}

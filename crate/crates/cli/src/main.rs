use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use cascade_cli::config::{flag_name, CommandKind, KEYS};
use cascade_cli::{emit_csv, run_command, CliError, Origin, RawConfig, RunConfig};
use clap::{Arg, ArgAction, Command};

fn cli() -> Command {
    let commands: Vec<&str> = CommandKind::ALL.iter().map(|c| c.name()).collect();
    let mut cmd = Command::new("cascade-rd")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Rate-distortion regions of cascade and triangular source coding networks")
        .arg(
            Arg::new("command")
                .help(format!("one of: {}", commands.join(", ")))
                .value_name("COMMAND"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .value_parser(clap::value_parser!(PathBuf))
                .help("configuration file; flags override its values"),
        )
        .arg(
            Arg::new("sweep")
                .long("sweep")
                .value_name("NAME:lin|log:MIN:MAX:STEPS")
                .action(ArgAction::Append)
                .help("sweep axis, may repeat; the first is the outermost loop"),
        );
    for spec in KEYS {
        let name: &'static str = Box::leak(flag_name(spec.key).into_boxed_str());
        cmd = cmd.arg(
            Arg::new(spec.key)
                .long(name)
                .value_name("VALUE")
                .help(spec.help)
                .overrides_with(spec.key),
        );
    }
    cmd
}

fn flags(m: &clap::ArgMatches) -> Result<RawConfig, CliError> {
    let mut raw = RawConfig::default();
    if let Some(c) = m.get_one::<String>("command") {
        raw.set("command", c, Origin::Flag)?;
    }
    for spec in KEYS {
        if let Some(v) = m.get_one::<String>(spec.key) {
            raw.set(spec.key, v, Origin::Flag)?;
        }
    }
    for s in m.get_many::<String>("sweep").into_iter().flatten() {
        raw.set("sweep", s, Origin::Flag)?;
    }
    Ok(raw)
}

fn run() -> Result<bool, CliError> {
    let m = cli().get_matches();
    let cfg = RunConfig::load(m.get_one::<PathBuf>("config").map(PathBuf::as_path), flags(&m)?)?;
    let table = run_command(&cfg);
    match &cfg.out {
        Some(path) => emit_csv(&table, path)?,
        None => std::io::stdout()
            .write_all(table.to_csv().as_bytes())
            .map_err(|e| CliError::Io { path: "standard output".into(), source: e })?,
    }
    Ok(!table.has_errors())
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("cascade-rd: {e}");
            match e {
                CliError::Config { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use treasury_kelly::flywheel::{run_to_end, write_series, write_stress};
use treasury_kelly::{
    issue_and_buy, kpis, stress, CompanyState, FlywheelError, ScenarioConfig, StressReport,
};

use crate::format::{sig, table};
use crate::{BatchArgs, Failure, FlywheelCommand};

#[derive(Clone, Copy)]
enum Mode {
    Run,
    Stress,
}

pub fn run(cmd: FlywheelCommand) -> Result<(), Failure> {
    match cmd {
        FlywheelCommand::Run(args) => batch(args, Mode::Run),
        FlywheelCommand::Stress(args) => batch(args, Mode::Stress),
        FlywheelCommand::Example => example(),
    }
}

fn example() -> Result<(), Failure> {
    let domain = |e: FlywheelError| Failure::Domain(e.to_string());
    let before = CompanyState::new(4.0, 1.0, 1.0, 1.0).map_err(domain)?;
    let after = issue_and_buy(&before, 1.0).map_err(domain)?;
    let k = kpis(&before, &after).map_err(domain)?;
    let pair = |label: &str, f: &dyn Fn(&CompanyState) -> f64| {
        vec![label.to_string(), sig(f(&before)), sig(f(&after))]
    };
    let mnav = |c: &CompanyState| c.mnav().unwrap_or(f64::NAN);
    let rows = vec![
        vec!["quantity".into(), "before".into(), "after".into()],
        pair("shares", &|c| c.shares_outstanding),
        pair("tokens", &|c| c.tokens_held),
        pair("token_price", &|c| c.token_price),
        pair("share_price", &|c| c.share_price),
        pair("mnav", &mnav),
        pair("btc_per_share", &|c| c.btc_per_share()),
    ];
    print!("{}", table(&rows));
    println!();
    let change = after.share_price / before.share_price - 1.0;
    let rows = [
        ("share_price_change", change),
        ("btc_yield", k.btc_yield),
        ("btc_gain", k.btc_gain),
        ("btc_dollar_gain", k.btc_dollar_gain),
    ]
    .map(|(label, v)| vec![label.to_string(), sig(v)]);
    print!("{}", table(&rows));
    Ok(())
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    ScenarioConfig::from_toml_str(&text).map_err(|e| match e {
        FlywheelError::Parse(msg) => Failure::Usage(format!("{}: {msg}", path.display())),
        other => Failure::Usage(format!("{}: {other}", path.display())),
    })
}

type Rendered = Result<Vec<u8>, Failure>;

/// Runs one scenario and renders its CSV.
fn execute(config: &ScenarioConfig, mode: Mode) -> Rendered {
    let domain = |e: FlywheelError| Failure::Domain(e.to_string());
    let (records, world) = run_to_end(config).map_err(domain)?;
    let mut out = Vec::new();
    match mode {
        Mode::Run => write_series(&mut out, &records).map_err(domain)?,
        Mode::Stress => {
            if config.stress.is_empty() {
                return Err(Failure::Usage(
                    "stress: no [[stress]] shocks configured".into(),
                ));
            }
            let impact = config.mnav.impact();
            let reports = config
                .stress
                .iter()
                .map(|&shock| match stress(&world, shock, impact) {
                    Ok(r) => Ok(r),
                    // reported with converged = false
                    Err(FlywheelError::NonConvergence { report, .. }) => Ok(*report),
                    Err(e) => Err(domain(e)),
                })
                .collect::<Result<Vec<StressReport>, _>>()?;
            write_stress(&mut out, &reports).map_err(domain)?;
        }
    }
    Ok(out)
}

fn output_path(dir: &Path, config: &Path, mode: Mode) -> PathBuf {
    let stem = config.file_stem().unwrap_or_default().to_string_lossy();
    match mode {
        Mode::Run => dir.join(format!("{stem}.csv")),
        Mode::Stress => dir.join(format!("{stem}-stress.csv")),
    }
}

fn batch(args: BatchArgs, mode: Mode) -> Result<(), Failure> {
    if args.config.len() > 1 && args.out_dir.is_none() {
        return Err(Failure::Usage("several configs need --out-dir".into()));
    }
    let configs = args
        .config
        .iter()
        .map(|p| load(p))
        .collect::<Result<Vec<_>, _>>()?;

    let jobs = usize::from(args.jobs).min(configs.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Rendered>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(config) = configs.get(i) else { break };
                let result = execute(config, mode);
                results.lock().expect("no worker panicked")[i] = Some(result);
            });
        }
    });
    let results = results.into_inner().expect("no worker panicked");

    let write = |path: &Path, bytes: &[u8]| {
        fs::write(path, bytes)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
    };
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut first_failure = None;
    for (path, result) in args.config.iter().zip(results) {
        match result.expect("every config was processed") {
            Ok(bytes) => {
                if let Some(dir) = &args.out_dir {
                    write(&output_path(dir, path, mode), &bytes)?;
                } else if let Some(out) = &args.out {
                    let mut file = File::create(out).map_err(|e| {
                        Failure::Usage(format!("cannot write {}: {e}", out.display()))
                    })?;
                    file.write_all(&bytes).map_err(|e| {
                        Failure::Usage(format!("cannot write {}: {e}", out.display()))
                    })?;
                } else {
                    io::stdout()
                        .write_all(&bytes)
                        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))?;
                }
            }
            Err(failure) if args.config.len() == 1 => return Err(failure),
            Err(failure) => {
                eprintln!("error: {}: {failure}", path.display());
                first_failure.get_or_insert(failure);
            }
        }
    }
    match first_failure {
        Some(Failure::Domain(_)) => Err(Failure::Domain("some scenarios failed".into())),
        Some(Failure::Usage(_)) => Err(Failure::Usage("some scenarios failed".into())),
        None => Ok(()),
    }
}

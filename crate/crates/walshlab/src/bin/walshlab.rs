use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use walshlab::calibration::{calibrate, Calibration, CALIBRATION_SEED};
use walshlab::formats::{
    read_json, resolve, write_json, Basis, CertificateFile, LowerBoundFile, MultiplierFile,
    ParsedMultiplier, SignalFile, SpectrumFile,
};
use walshlab::scans::{run_scan, ScanConfig, ScanKind};
use walshlab::selftest::{self, Level};
use walshlab::{InputError, InputResult};
use walshlab_core::experiments::lower_bound;
use walshlab_core::haar::{haar_forward, haar_inverse};
use walshlab_core::multiplier::AtomRq1;
use walshlab_core::sparse::{
    certify_marcinkiewicz, certify_multiplier, certify_s_lambda, CertifyConfig,
};
use walshlab_core::walsh::{walsh_forward, walsh_inverse};
use walshlab_core::Resolution;

const DEFAULT_LEVEL: u32 = 10;

#[derive(Parser)]
#[command(
    name = "walshlab",
    version,
    about = "Finite-resolution Walsh analysis experiments"
)]
struct Cli {
    /// Resolution 2^N shared by every input of this invocation.
    #[arg(long = "N", id = "resolution", global = true)]
    level: Option<u32>,
    /// Calibration file to use instead of the built-in one.
    #[arg(long, global = true)]
    calibration: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walsh or Haar transform of a signal, or its inverse.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        inverse: bool,
        #[arg(long)]
        haar: bool,
    },
    /// Applies a multiplier to a signal.
    Apply {
        #[arg(long)]
        multiplier: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sparse certificate for `⟨T_m f, φ⟩`.
    CertifyMultiplier {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        multiplier: PathBuf,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        out: PathBuf,
        /// Required sparseness margin of every interval.
        #[arg(long, default_value_t = 0.5)]
        sparseness: f64,
    },
    /// Sparse certificate for `∫ S_λ(f)^r |g|`.
    CertifySquare {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        out: PathBuf,
        /// Required sparseness margin of every interval.
        #[arg(long, default_value_t = 0.5)]
        sparseness: f64,
    },
    /// Exact values of the lacunary lower-bound pair.
    Lowerbound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs a scan; writes CSV to `--out` and JSON next to it.
    Scan {
        #[arg(long, value_enum)]
        kind: ScanKind,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs the invariant suites.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        level: Level,
    },
    /// Regenerates the calibration file from a seeded run.
    Calibrate {
        #[arg(long, default_value_t = CALIBRATION_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Status {
    Ok,
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> InputError + '_ {
    move |source| InputError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> InputError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => io_error(path)(source),
        other => InputError::Invalid(format!("writing {}: {other:?}", path.display())),
    }
}

fn default_resolution(level: Option<u32>) -> InputResult<Resolution> {
    Ok(Resolution::new(level.unwrap_or(DEFAULT_LEVEL))?)
}

fn load_calibration(path: &Option<PathBuf>) -> InputResult<Calibration> {
    match path {
        Some(p) => Calibration::load(p),
        None => Ok(Calibration::builtin()),
    }
}

fn certify_config(sparseness: f64) -> InputResult<CertifyConfig> {
    if !(sparseness > 0.0 && sparseness <= 1.0) {
        return Err(InputError::Invalid(format!(
            "sparseness {sparseness} must lie in (0, 1]"
        )));
    }
    Ok(CertifyConfig {
        sparseness,
        ..CertifyConfig::default()
    })
}

fn report_certificate(out: &Path, file: &CertificateFile) -> InputResult<Status> {
    write_json(out, file)?;
    let violations = file.all_violations();
    println!(
        "{}: ratio {:.6}, {} intervals, {} violations",
        file.kind,
        file.ratio,
        file.collection.len() + file.parts.iter().map(|p| p.collection.len()).sum::<usize>(),
        violations
    );
    Ok(if file.passed && violations == 0 {
        Status::Ok
    } else {
        Status::Violation
    })
}

fn run(cli: Cli) -> InputResult<Status> {
    let mut level = cli.level;
    if let Some(n) = level {
        Resolution::new(n)?;
    }
    match cli.command {
        Command::Transform {
            input,
            out,
            inverse,
            haar,
        } => {
            if inverse {
                let file: SpectrumFile = read_json(&input)?;
                resolve(&mut level, file.n, "spectrum")?;
                let expected = if haar { Basis::Haar } else { Basis::Walsh };
                if file.basis != expected {
                    return Err(InputError::Invalid(format!(
                        "spectrum basis is {:?} but {:?} was requested",
                        file.basis, expected
                    )));
                }
                let f = match file.basis {
                    Basis::Walsh => walsh_inverse(&file.to_walsh()?),
                    Basis::Haar => haar_inverse(&file.to_haar()?),
                };
                write_json(&out, &SignalFile::from_signal(&f))?;
            } else {
                let file: SignalFile = read_json(&input)?;
                resolve(&mut level, file.n, "signal")?;
                let f = file.to_signal()?;
                let spectrum = if haar {
                    SpectrumFile::from_haar(&haar_forward(&f))
                } else {
                    SpectrumFile::from_walsh(&walsh_forward(&f))
                };
                write_json(&out, &spectrum)?;
            }
            Ok(Status::Ok)
        }
        Command::Apply {
            multiplier,
            input,
            out,
        } => {
            let m: MultiplierFile = read_json(&multiplier)?;
            resolve(&mut level, m.n, "multiplier")?;
            let file: SignalFile = read_json(&input)?;
            resolve(&mut level, file.n, "signal")?;
            let tf = m.parse()?.symbol().apply(&file.to_signal()?)?;
            write_json(&out, &SignalFile::from_signal(&tf))?;
            Ok(Status::Ok)
        }
        Command::CertifyMultiplier {
            f,
            phi,
            multiplier,
            q,
            out,
            sparseness,
        } => {
            let ff: SignalFile = read_json(&f)?;
            let res = resolve(&mut level, ff.n, "f")?;
            let pf: SignalFile = read_json(&phi)?;
            resolve(&mut level, pf.n, "phi")?;
            let m: MultiplierFile = read_json(&multiplier)?;
            resolve(&mut level, m.n, "multiplier")?;
            let (f, phi) = (ff.to_signal()?, pf.to_signal()?);
            let config = certify_config(sparseness)?;
            let file = match m.parse()? {
                ParsedMultiplier::Atom(a) => {
                    let atom = AtomRq1::new(q, a.jumps(), a.blocks().to_vec())?;
                    let cert = certify_multiplier(&f, &phi, &atom, &config)?;
                    CertificateFile::from_sparse(res, "multiplier-atom", &cert)
                }
                ParsedMultiplier::Symbol(s) => {
                    let cert = certify_marcinkiewicz(&f, &phi, &s, q, &config)?;
                    CertificateFile::from_marcinkiewicz(res, q, &cert)
                }
            };
            report_certificate(&out, &file)
        }
        Command::CertifySquare {
            f,
            g,
            lambda,
            r,
            out,
            sparseness,
        } => {
            let ff: SignalFile = read_json(&f)?;
            let res = resolve(&mut level, ff.n, "f")?;
            let gf: SignalFile = read_json(&g)?;
            resolve(&mut level, gf.n, "g")?;
            let cert = certify_s_lambda(
                &ff.to_signal()?,
                &gf.to_signal()?,
                lambda,
                r,
                &certify_config(sparseness)?,
            )?;
            report_certificate(&out, &CertificateFile::from_lambda(res, lambda, &cert))
        }
        Command::Lowerbound { n, out } => {
            let res = Resolution::new(level.unwrap_or(n + 2))?;
            let report = lower_bound(n, res)?;
            write_json(&out, &LowerBoundFile::new(res, &report))?;
            println!(
                "n = {n}: pairing {} (expected {}), ratio {:.6}",
                report.pairing, report.expected_pairing, report.ratio
            );
            Ok(Status::Ok)
        }
        Command::Scan { kind, config, out } => {
            let res = default_resolution(level)?;
            let config: ScanConfig = match config {
                Some(p) => read_json(&p)?,
                None => ScanConfig::default(),
            };
            let calibration = load_calibration(&cli.calibration)?;
            let table = run_scan(kind, res, &config, &calibration)?;
            let file = File::create(&out).map_err(io_error(&out))?;
            table
                .write_csv(BufWriter::new(file))
                .map_err(|e| csv_error(&out, e))?;
            write_json(&out.with_extension("json"), &table)?;
            Ok(Status::Ok)
        }
        Command::Selftest { level: suite } => {
            let calibration = load_calibration(&cli.calibration)?;
            let outcomes = selftest::run(suite, &calibration);
            for o in &outcomes {
                println!("{}", o.line());
            }
            Ok(if outcomes.iter().all(|o| o.passed) {
                Status::Ok
            } else {
                Status::Violation
            })
        }
        Command::Calibrate { seed, trials, out } => {
            let res = default_resolution(level)?;
            let c = calibrate(res, seed, trials)?;
            write_json(&out, &c)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&c).expect("plain data serializes")
            );
            Ok(Status::Ok)
        }
    }
}

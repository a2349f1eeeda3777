use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kutzko_core::verify::{self, Config, Format, Section, VariantChoice};

#[derive(Parser)]
#[command(name = "kutzko", version, about = "Exact verification of a depth-zero Hecke algebra and its 2-cocycle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Residue field size; needs 4 | q − 1.
    #[arg(long, global = true, default_value_t = 5)]
    q: u32,
    /// Relative precision of every series, in digits.
    #[arg(long, global = true, default_value_t = 40)]
    precision: usize,
    /// stabilizer, parahoric or both.
    #[arg(long, global = true, default_value = "both")]
    variant: VariantChoice,
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// text or json.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Maximum dihedral word length in the window.
    #[arg(long, global = true, default_value_t = 4)]
    window_words: usize,
    /// Maximum |zexp| in the window.
    #[arg(long, global = true, default_value_t = 2)]
    window_z: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check.
    Report,
    /// Run one section: residue, norms, genericity, epsilon, subgroups,
    /// weyl, lattice, cocycle, convolution, omega or algebra.
    Verify { section: Section },
    /// Structure constants of the example algebra as CSV.
    DumpConstants,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = cli.opts;
    let cfg = Config {
        q: o.q,
        precision: o.precision,
        variant: o.variant,
        window_words: o.window_words,
        window_z: o.window_z,
        seed: o.seed,
        format: o.format,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("kutzko: {e}");
        return ExitCode::from(2);
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Report | Command::Verify { .. } => {
            let sections = match cli.command {
                Command::Verify { section } => vec![section],
                _ => Section::ALL.to_vec(),
            };
            let report = match verify::run_sections(&cfg, &sections) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("kutzko: {e}");
                    return ExitCode::from(2);
                }
            };
            let mut text = report.emit(cfg.format);
            if !text.ends_with('\n') {
                text.push('\n');
            }
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::DumpConstants => {
            let rows = match verify::structure_constant_rows(&cfg) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("kutzko: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let mut w = csv::Writer::from_writer(out);
            let written = w
                .write_record(["u", "v", "uv", "re", "im"])
                .and_then(|_| rows.iter().try_for_each(|r| w.write_record(r)))
                .and_then(|_| w.flush().map_err(csv::Error::from));
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("kutzko: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}

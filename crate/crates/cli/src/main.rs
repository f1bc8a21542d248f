use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use arthurkit::params::{Family, GroupTag};
use arthurkit_cli::{parse_stream, run, CliError, Command, ObjectKind, OracleKind};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "arthurkit", version, about = "Local Arthur parameters and extended multi-segments for Sp(2n) and SO(2n+1)")]
struct Cli {
    /// Print one JSON object per result instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 2 when a verdict is negative.
    #[arg(long, global = true)]
    strict: bool,
    /// Read documents from this file instead of stdin.
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "Sp", alias = "sp")]
    Sp,
    #[value(name = "SO", alias = "so")]
    So,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Sp => Family::Sp,
            FamilyArg::So => Family::SOodd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Tempered,
    Unramified,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectArg {
    Param,
    Ems,
    Ldata,
}

#[derive(Subcommand)]
enum Sub {
    /// Check every object and report basic properties.
    Validate,
    /// Split each parameter into its positive, non-good-parity and good-parity parts.
    Decompose,
    /// The associated L-parameter.
    Lparam,
    /// Swap the two SL2 factors.
    DualParam,
    /// Characters of the component group.
    Characters,
    /// Order, sign and (L) checks of extended multi-segments.
    EmsCheck,
    /// The representation attached to an extended multi-segment satisfying (L).
    EmsPi,
    /// Dual of an extended multi-segment.
    EmsDual,
    /// The extended multi-segments of a parameter satisfying (L).
    LClass,
    /// Members of a tempered L-packet.
    TemperedPacket,
    /// Whether a tempered representation lies in a single Arthur packet.
    Singleton,
    /// Whether a parameter's packet has a generic member.
    Shahidi,
    /// Decide whether unramified Langlands data is of Arthur type.
    ClassifyUnramified,
    /// The unramified member of a parameter's packet, if any.
    UnramifiedMember,
    /// Run the Arthur-type test with a derivative oracle.
    ArthurType {
        #[arg(long, value_enum)]
        oracle: OracleArg,
    },
    /// The Steinberg parameter.
    Steinberg {
        #[arg(long, value_enum)]
        group: FamilyArg,
        #[arg(long)]
        n: u32,
    },
    /// Census objects with N up to the cap (ARTHURKIT_MAX_N lowers it).
    Enumerate {
        #[arg(long, value_enum)]
        group: FamilyArg,
        #[arg(long = "max-N", alias = "max-n", default_value_t = 9)]
        max_n: u32,
        #[arg(long, value_enum, default_value = "param")]
        objects: ObjectArg,
        /// Also include parameters on two distinct rho.
        #[arg(long)]
        two_rho: bool,
    },
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Validate => Command::Validate,
            Sub::Decompose => Command::Decompose,
            Sub::Lparam => Command::Lparam,
            Sub::DualParam => Command::DualParam,
            Sub::Characters => Command::Characters,
            Sub::EmsCheck => Command::EmsCheck,
            Sub::EmsPi => Command::EmsPi,
            Sub::EmsDual => Command::EmsDual,
            Sub::LClass => Command::LClass,
            Sub::TemperedPacket => Command::TemperedPacket,
            Sub::Singleton => Command::Singleton,
            Sub::Shahidi => Command::Shahidi,
            Sub::ClassifyUnramified => Command::ClassifyUnramified,
            Sub::UnramifiedMember => Command::UnramifiedMember,
            Sub::ArthurType { oracle } => Command::ArthurType {
                oracle: match oracle {
                    OracleArg::Tempered => OracleKind::Tempered,
                    OracleArg::Unramified => OracleKind::Unramified,
                },
            },
            Sub::Steinberg { group, n } => Command::Steinberg {
                group: match group {
                    FamilyArg::Sp => GroupTag::sp(n),
                    FamilyArg::So => GroupTag::so_odd(n),
                },
            },
            Sub::Enumerate { group, max_n, objects, two_rho } => Command::Enumerate {
                family: group.into(),
                max_n,
                objects: match objects {
                    ObjectArg::Param => ObjectKind::Param,
                    ObjectArg::Ems => ObjectKind::Ems,
                    ObjectArg::Ldata => ObjectKind::Ldata,
                },
                two_rho,
            },
        }
    }
}

fn execute(cli: Cli) -> Result<(String, bool), CliError> {
    let cmd = cli.command.command();
    let docs = if cmd.reads_input() {
        let mut src = String::new();
        match &cli.input {
            Some(path) => src = std::fs::read_to_string(path)?,
            None => {
                std::io::stdin().read_to_string(&mut src)?;
            }
        }
        let docs = parse_stream(&src)?;
        if docs.is_empty() {
            return Err(CliError::Usage("no input documents".into()));
        }
        docs
    } else {
        Vec::new()
    };
    let out = run(&cmd, &docs)?;
    let text = if cli.json { out.json_lines() } else { out.text() };
    Ok((text, out.negative()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict;
    match execute(cli) {
        Ok((text, negative)) => {
            print!("{text}");
            if strict && negative {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drinfeld_core::jobs::{self, Job, JobManifest};
use drinfeld_core::Error;
use serde_json::{json, Value};

const EXIT_DOMAIN: u8 = 1;
const EXIT_CONSISTENCY: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "drinfeld", version, about = "Drinfeld modules, Taguchi duality and Tate-Drinfeld expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Base {
    /// Order of the constant field F_q.
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Modulus of F_q over F_p, low degree first, e.g. 1,1,1.
    #[arg(long, value_delimiter = ',')]
    p_modulus: Option<Vec<u32>>,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Base {
    fn job(&self, command: &str) -> Job {
        let mut j = Job::new(command, self.q);
        j.p_modulus = self.p_modulus.clone();
        j
    }
}

#[derive(Subcommand)]
enum Command {
    /// The Carlitz module.
    #[command(subcommand)]
    Carlitz(CarlitzCmd),
    /// Rank-2 Drinfeld modules over finite fields.
    #[command(subcommand)]
    Drinfeld(DrinfeldCmd),
    /// Finite v-sheaves of Carlitz torsion.
    #[command(subcommand)]
    Vsheaf(VsheafCmd),
    /// Tate-Drinfeld modules.
    #[command(subcommand)]
    Tate(TateCmd),
    /// x-expansions and weight congruences.
    #[command(subcommand)]
    Forms(FormsCmd),
    /// Run a job manifest.
    Suite {
        #[arg(long)]
        manifest: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in acceptance manifest.
    Manifest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CarlitzCmd {
    /// Φ^C_a as a twisted polynomial.
    Phi {
        #[command(flatten)]
        base: Base,
        #[arg(long, default_value = "t")]
        a: String,
    },
    /// Eisenstein check of Φ^C_℘(Z)/Z.
    Eisenstein {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        wp: String,
    },
    /// The Carlitz cyclotomic polynomial W_n.
    Cyclotomic {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        n: String,
    },
    /// Eisenstein check for every prime up to a degree.
    Criterion {
        #[command(flatten)]
        base: Base,
        #[arg(long, default_value_t = 3)]
        max_deg: u64,
    },
}

#[derive(Subcommand)]
enum DrinfeldCmd {
    /// Taguchi dual, factorization and reduction type of one module.
    Dual {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        wp: String,
        /// Degree of the base field over A/℘.
        #[arg(long, default_value_t = 1)]
        ext: u64,
        #[arg(long, default_value = "1")]
        a1: String,
        #[arg(long, default_value = "1")]
        a2: String,
    },
    /// Random duality checks over F_{q^d} and F_{q^2d}.
    Suite {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        wp: Option<String>,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum VsheafCmd {
    /// The v-sheaf of C[℘], its dual and its dual points.
    Kernel {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        wp: String,
        #[arg(long, default_value_t = 1)]
        ext: u64,
    },
    /// Validator and duality checks on several kernel sheaves.
    Suite {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        wp: String,
    },
}

#[derive(Args)]
struct TateArgs {
    #[command(flatten)]
    base: Base,
    #[arg(long)]
    wp: String,
    #[arg(long, default_value = "1")]
    f: String,
    #[arg(long, default_value_t = 8)]
    prec: i64,
    #[arg(long)]
    i_max: Option<u64>,
}

impl TateArgs {
    fn job(&self, command: &str) -> Job {
        let mut j = self.base.job(command).wp(&self.wp).f(&self.f).prec(self.prec);
        if let Some(i) = self.i_max {
            j = j.param("i_max", json!(i));
        }
        j
    }
}

#[derive(Subcommand)]
enum TateCmd {
    /// Exponential, a1, a2, j and the Kodaira-Spencer factor.
    Expand(TateArgs),
    /// The canonical isogeny Ψ_℘ and its identities.
    Isogeny(TateArgs),
}

#[derive(Args)]
struct FormsBase {
    #[command(flatten)]
    base: Base,
    #[arg(long)]
    wp: String,
    /// x-precision.
    #[arg(long)]
    prec: Option<i64>,
    /// Coefficients are computed mod ℘^wp_prec.
    #[arg(long)]
    wp_prec: Option<u32>,
}

impl FormsBase {
    fn job(&self, command: &str) -> Job {
        let mut j = self.base.job(command).wp(&self.wp);
        j.prec = self.prec;
        j.wp_prec = self.wp_prec;
        j
    }
}

#[derive(Subcommand)]
enum FormsCmd {
    /// The Hasse lift α_d.
    Hasse(FormsBase),
    /// Weight-congruence audit of a1^α a2^β α_d^γ monomials.
    Audit {
        #[command(flatten)]
        forms: FormsBase,
        /// Exponents alpha,beta,gamma.
        #[arg(long, value_parser = triple)]
        f1: Exps,
        #[arg(long, value_parser = triple)]
        f2: Exps,
        /// Override the weight of f1.
        #[arg(long)]
        k1: Option<i64>,
        #[arg(long)]
        k2: Option<i64>,
        #[arg(long)]
        max_n: Option<u64>,
    },
    /// The constructed-congruence harness with negative controls.
    Harness {
        #[command(flatten)]
        forms: FormsBase,
        #[arg(long, default_value_t = 40)]
        max_weight: u64,
        #[arg(long, default_value_t = 3)]
        l_max: u64,
    },
    /// ℘-adic limit of f·α_d^e_n along a weight character.
    Limit {
        #[command(flatten)]
        forms: FormsBase,
        #[arg(long, value_parser = triple, default_value = "1,1,0")]
        f: Exps,
        /// s0,s1.
        #[arg(long, value_parser = pair)]
        chi: Option<Pair>,
        #[arg(long, default_value_t = 4)]
        steps: u64,
        /// p-adic digits stored for s1.
        #[arg(long, default_value_t = 4)]
        precision: u64,
    },
}

type Exps = [u64; 3];
type Pair = [u64; 2];

fn numbers<const N: usize>(s: &str) -> Result<[u64; N], String> {
    let xs: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    xs.try_into().map_err(|_| format!("expected {N} comma-separated integers"))
}

fn triple(s: &str) -> Result<Exps, String> {
    numbers::<3>(s)
}

fn pair(s: &str) -> Result<Pair, String> {
    numbers::<2>(s)
}

enum Plan {
    Job(Job, Option<PathBuf>),
    Suite { manifest: PathBuf, threads: Option<usize>, out: Option<PathBuf> },
    Manifest(Option<PathBuf>),
}

fn plan(cmd: Command) -> Plan {
    match cmd {
        Command::Carlitz(c) => match c {
            CarlitzCmd::Phi { base, a } => Plan::Job(base.job("carlitz.phi").param("a", json!(a)), base.out),
            CarlitzCmd::Eisenstein { base, wp } => Plan::Job(base.job("carlitz.eisenstein").wp(&wp), base.out),
            CarlitzCmd::Cyclotomic { base, n } => Plan::Job(base.job("carlitz.cyclotomic").param("n", json!(n)), base.out),
            CarlitzCmd::Criterion { base, max_deg } => {
                Plan::Job(base.job("carlitz.criterion").param("max_deg", json!(max_deg)), base.out)
            }
        },
        Command::Drinfeld(c) => match c {
            DrinfeldCmd::Dual { base, wp, ext, a1, a2 } => Plan::Job(
                base.job("drinfeld.dual").wp(&wp).param("ext", json!(ext)).param("a1", json!(a1)).param("a2", json!(a2)),
                base.out,
            ),
            DrinfeldCmd::Suite { base, wp, d, count, seed } => {
                let mut j = base.job("drinfeld.duality_suite").param("d", json!(d)).param("count", json!(count)).param("seed", json!(seed));
                j.wp = wp;
                Plan::Job(j, base.out)
            }
        },
        Command::Vsheaf(c) => match c {
            VsheafCmd::Kernel { base, wp, ext } => Plan::Job(base.job("vsheaf.kernel").wp(&wp).param("ext", json!(ext)), base.out),
            VsheafCmd::Suite { base, wp } => Plan::Job(base.job("vsheaf.suite").wp(&wp), base.out),
        },
        Command::Tate(c) => match c {
            TateCmd::Expand(t) => Plan::Job(t.job("tate.expand"), t.base.out.clone()),
            TateCmd::Isogeny(t) => Plan::Job(t.job("tate.isogeny"), t.base.out.clone()),
        },
        Command::Forms(c) => match c {
            FormsCmd::Hasse(f) => Plan::Job(f.job("forms.hasse"), f.base.out.clone()),
            FormsCmd::Audit { forms, f1, f2, k1, k2, max_n } => {
                let mut j = forms.job("forms.audit").param("f1", json!(f1)).param("f2", json!(f2));
                for (k, v) in [("k1", k1.map(|x| json!(x))), ("k2", k2.map(|x| json!(x))), ("max_n", max_n.map(|x| json!(x)))] {
                    if let Some(v) = v {
                        j = j.param(k, v);
                    }
                }
                Plan::Job(j, forms.base.out)
            }
            FormsCmd::Harness { forms, max_weight, l_max } => Plan::Job(
                forms.job("forms.harness").param("max_weight", json!(max_weight)).param("l_max", json!(l_max)),
                forms.base.out,
            ),
            FormsCmd::Limit { forms, f, chi, steps, precision } => {
                let mut j = forms.job("forms.limit").param("f", json!(f)).param("steps", json!(steps)).param("precision", json!(precision));
                if let Some(c) = chi {
                    j = j.param("chi", json!(c));
                }
                Plan::Job(j, forms.base.out)
            }
        },
        Command::Suite { manifest, threads, out } => Plan::Suite { manifest, threads, out },
        Command::Manifest { out } => Plan::Manifest(out),
    }
}

/// Whether `pass: false` from this command means a violated identity
/// rather than a legitimate negative answer.
fn pass_is_identity(command: &str) -> bool {
    !matches!(command, "forms.audit" | "carlitz.phi")
}

fn emit(v: &Value, out: &Option<PathBuf>) -> Result<(), u8> {
    let text = jobs::to_text(v);
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            eprintln!("drinfeld: cannot write {}: {e}", p.display());
            EXIT_DOMAIN
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(e: &Error) -> u8 {
    eprintln!("drinfeld: {e}");
    if e.is_consistency() {
        EXIT_CONSISTENCY
    } else {
        EXIT_DOMAIN
    }
}

fn execute(p: Plan) -> u8 {
    match p {
        Plan::Job(job, out) => match jobs::run_job(&job) {
            Ok(v) => {
                if let Err(c) = emit(&v, &out) {
                    return c;
                }
                let pass = v["pass"].as_bool().unwrap_or(false);
                if !pass && pass_is_identity(&job.command) {
                    EXIT_CONSISTENCY
                } else {
                    0
                }
            }
            Err(e) => {
                let _ = emit(&json!({"error": jobs::error_json(&e)}), &out);
                fail(&e)
            }
        },
        Plan::Suite { manifest, threads, out } => {
            let text = match std::fs::read_to_string(&manifest) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("drinfeld: cannot read {}: {e}", manifest.display());
                    return EXIT_USAGE;
                }
            };
            let m = match JobManifest::from_json(&text) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("drinfeld: {e}");
                    return EXIT_USAGE;
                }
            };
            let report = match jobs::run_manifest(&m, threads) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let out = out.or_else(|| m.output.as_ref().map(PathBuf::from));
            if let Some(rows) = report["jobs"].as_array() {
                for r in rows {
                    let mark = if r["pass"] == json!(true) { "pass" } else { "FAIL" };
                    eprintln!("{:>3}  {mark}  {}", r["index"], r["command"].as_str().unwrap_or(""));
                }
            }
            if let Err(c) = emit(&report, &out) {
                return c;
            }
            if report["pass"] == json!(true) {
                0
            } else {
                EXIT_CONSISTENCY
            }
        }
        Plan::Manifest(out) => {
            let m = jobs::acceptance_manifest();
            let v: Value = serde_json::from_str(&m.to_json()).expect("manifest is JSON");
            emit(&v, &out).err().unwrap_or(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(execute(plan(cli.command)))
}

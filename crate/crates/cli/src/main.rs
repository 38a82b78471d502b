use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use mumford_core::covers::{self, CoverError, RestrictCheck, DEFAULT_GUARD};
use mumford_core::group::FiniteGroup;
use mumford_core::io::{matrix_literal, GeneratorSetFile, GraphFile, MatrixFile, PairFile, RepFile};
use mumford_core::matrix::Matrix;
use mumford_core::normalforms::{self, IntegralConjugacy, PadicNumber};
use mumford_core::padic::{format_rational, Prime};
use mumford_core::pgl2::{classify, schottky_ball_check};
use mumford_core::phibound::{classify_phi, Budget, PhiError, Representation};
use mumford_core::redgraph::{self, d_plus, free_basis, orient_admissible, proof_constant, ReductionGraph};
use mumford_core::repcat::{self, IsoVerdict, RepError};
use mumford_core::word::FreeWord;

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "mumford", version, about = "Exact p-adic computations for Mumford curves and their representations")]
struct Cli {
    /// Expected prime; every input file must agree with it.
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide or certify boundedness of a representation on a reduction graph.
    PhiCheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        eps_exp: i64,
        #[arg(long, default_value_t = 4)]
        max_period: usize,
        #[arg(long, default_value_t = 6)]
        power_check: u32,
        /// Largest number of words to enumerate.
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: usize,
    },
    /// Geodesic lengths and positive widths for words in the free generators.
    Dplus {
        #[arg(long)]
        graph: PathBuf,
        /// Words such as "g1 g2^-1"; "e" is the identity.
        #[arg(long = "word", required = true)]
        words: Vec<String>,
    },
    /// Reorient a graph so every nonidentity word has edges both ways.
    Orient {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Emit the m-cycle reduction graph of a Tate curve.
    TateGraph {
        #[arg(long)]
        m: usize,
    },
    /// Ping-pong test for Schottky generators with given discs.
    SchottkyCheck {
        #[arg(long)]
        generators: PathBuf,
    },
    /// Rational canonical form.
    Rcf {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Decide conjugacy to an integral matrix.
    IntegralTest {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Normal form of a generic pair of 2x2 matrices.
    PairClassify {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 10)]
        precision: u32,
    },
    /// Finite image mod p^n, kernel basis and cover genus.
    Cover {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// Also build the voltage cover of this graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: usize,
    },
    /// Compare the transported fiber action with the reduction mod p^n.
    DwCompare {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// Index of the evaluation point in the image group.
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: usize,
    },
    /// Reductions mod p, p^2, ..., p^n and their image groups.
    Tower {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: usize,
    },
    /// Tensor product of two representations.
    Tensor(TwoReps),
    /// Dual representation.
    Dual {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Direct sum of two representations.
    Dsum(TwoReps),
    /// Test two representations for isomorphism.
    IsoCheck(TwoReps),
}

#[derive(Args)]
struct TwoReps {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Guard(String),
    Invariant(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Guard(_) => "guard",
            CliError::Invariant(_) => "invariant",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Guard(m) | CliError::Invariant(m) => m,
        }
    }
}

fn input<E: Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::OrderExceedsGuard { .. } => CliError::Guard(e.to_string()),
            e => input(e),
        }
    }
}

impl From<PhiError> for CliError {
    fn from(e: PhiError) -> Self {
        match e {
            PhiError::DepthInsufficient { .. } => CliError::Guard(e.to_string()),
            e => input(e),
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::Cover(c) => c.into(),
            RepError::Phi(p) => p.into(),
            e => input(e),
        }
    }
}

fn invariant(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Invariant(what.to_string()))
    }
}

struct Ctx {
    prime: Option<u64>,
}

impl Ctx {
    fn read<T: DeserializeOwned>(&self, path: &Path) -> Result<T, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn check_prime(&self, p: u64) -> Result<(), CliError> {
        match self.prime {
            Some(q) if q != p => Err(CliError::Input(format!("input uses p = {p} but --prime {q} was given"))),
            _ => Ok(()),
        }
    }

    fn graph(&self, path: &Path) -> Result<ReductionGraph, CliError> {
        let f: GraphFile = self.read(path)?;
        self.check_prime(f.p)?;
        f.to_graph().map_err(input)
    }

    fn rep(&self, path: &Path) -> Result<Representation, CliError> {
        let f: RepFile = self.read(path)?;
        self.check_prime(f.p)?;
        f.to_rep().map_err(input)
    }

    fn matrix(&self, path: &Path) -> Result<(Prime, Matrix), CliError> {
        let f: MatrixFile = self.read(path)?;
        self.check_prime(f.p)?;
        f.to_matrix().map_err(input)
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn mat(m: &Matrix) -> Value {
    to_value(&matrix_literal(m))
}

fn number(x: &PadicNumber) -> Value {
    to_value(x)
}

fn word_count(generators: usize, depth: usize, guard: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut level: usize = 1;
    for k in 0..depth {
        level = level.checked_mul(if k == 0 { 2 * generators } else { 2 * generators - 1 })?;
        total = total.checked_add(level)?;
        if total > guard {
            return None;
        }
    }
    Some(total)
}

fn run(cli: Cli) -> Result<Value, CliError> {
    let ctx = Ctx { prime: cli.prime };
    let report = match cli.command {
        Command::PhiCheck { graph, rep, depth, eps_exp, max_period, power_check, guard } => {
            let g = ctx.graph(&graph)?;
            let rho = ctx.rep(&rep)?;
            if g.prime() != rho.prime() {
                return Err(CliError::Input("graph and representation use different primes".into()));
            }
            let basis = free_basis(&g);
            if word_count(basis.rank(), depth.max(max_period * power_check as usize), guard).is_none() {
                return Err(CliError::Guard(format!("more than {guard} words at depth {depth}")));
            }
            let budget = Budget { depth, eps_exp, max_period, power_check };
            to_value(&classify_phi(&rho, &g, &basis, budget)?)
        }
        Command::Dplus { graph, words } => {
            let g = ctx.graph(&graph)?;
            let basis = free_basis(&g);
            let mut rows = Vec::new();
            for w in &words {
                let word = FreeWord::parse(w).map_err(input)?;
                word.check_generators(basis.rank()).map_err(input)?;
                let r = d_plus(&g, &basis, &word);
                rows.push(json!({"word": word, "l": r.l, "l_plus": r.l_plus, "d_plus_exp": r.d_plus_exp}));
            }
            json!({"betti_number": basis.rank(), "reports": rows})
        }
        Command::Orient { graph, depth } => {
            let g = ctx.graph(&graph)?;
            let h = orient_admissible(&g, depth).map_err(input)?;
            let flipped: Vec<&str> =
                g.edges().iter().zip(h.edges()).filter(|(a, b)| a.from != b.from).map(|(a, _)| a.id.as_str()).collect();
            let pc = proof_constant(&h, &free_basis(&h)).map_err(|e| CliError::Invariant(e.to_string()))?;
            json!({"graph": GraphFile::from_graph(&h), "flipped": flipped, "checked_depth": depth, "proof_constant": pc})
        }
        Command::TateGraph { m } => {
            let p = cli.prime.ok_or_else(|| CliError::Input("tate-graph needs --prime".into()))?;
            let p = Prime::new(p).map_err(input)?;
            let g = redgraph::tate_cycle_graph(m, p).map_err(input)?;
            to_value(&GraphFile::from_graph(&g))
        }
        Command::SchottkyCheck { generators } => {
            let f: GeneratorSetFile = ctx.read(&generators)?;
            ctx.check_prime(f.p)?;
            let (gens, balls) = f.to_generators().map_err(input)?;
            let verdict = schottky_ball_check(&gens, &balls).map_err(input)?;
            let classes: Vec<Value> = gens.iter().map(|g| to_value(&classify(g))).collect();
            let mut v = to_value(&verdict);
            v["classifications"] = Value::Array(classes);
            v
        }
        Command::Rcf { matrix } => {
            let (_, m) = ctx.matrix(&matrix)?;
            let r = normalforms::rcf(&m).map_err(input)?;
            let pinv = r.conjugator.inverse().ok_or_else(|| CliError::Invariant("singular conjugator".into()))?;
            invariant(&(&r.conjugator * &m) * &pinv == r.canonical, "P M P^-1 differs from the canonical form")?;
            json!({
                "invariant_factors": r.factors.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "canonical": mat(&r.canonical),
                "conjugator": mat(&r.conjugator),
            })
        }
        Command::IntegralTest { matrix } => {
            let (p, m) = ctx.matrix(&matrix)?;
            match normalforms::integral_conjugacy(&m, p).map_err(input)? {
                IntegralConjugacy::Yes { conjugate, conjugator } => {
                    invariant(conjugate.is_integral(p), "returned conjugate is not integral")?;
                    json!({"integral": true, "conjugate": mat(&conjugate), "conjugator": mat(&conjugator)})
                }
                IntegralConjugacy::No { degree, coefficient, valuation } => json!({
                    "integral": false,
                    "degree": degree,
                    "coefficient": format_rational(&coefficient),
                    "valuation": valuation,
                }),
            }
        }
        Command::PairClassify { pair, precision } => {
            let f: PairFile = ctx.read(&pair)?;
            ctx.check_prime(f.p)?;
            let (p, a, b) = f.to_pair().map_err(input)?;
            let r = normalforms::pair_classify(&a, &b, p, precision).map_err(input)?;
            json!({
                "t": number(&r.t),
                "s": number(&r.s),
                "c": format_rational(&r.c),
                "trace_shifts": [format_rational(&r.shift_a), format_rational(&r.shift_b)],
                "canonical_a": mat(&r.canonical_a),
                "canonical_b": mat(&r.canonical_b),
                "conjugator": mat(&r.conjugator),
                "precision": r.precision,
            })
        }
        Command::Cover { rep, level, graph, guard } => {
            let rho = ctx.rep(&rep)?;
            let q = covers::image_group(&rho, level, guard)?;
            let data = covers::schreier_basis(&q);
            let g = rho.generators().len() as u64;
            let genus = covers::cover_genus(g, q.order() as u64)?;
            invariant(data.kernel_basis.len() as u64 == genus, "kernel rank differs from the genus formula")?;
            let check = covers::restrict_check(&rho, &data, level)?;
            invariant(check == RestrictCheck::TrivialModPn, "kernel word acts nontrivially mod p^n")?;
            let mut v = json!({
                "group_order": q.order(),
                "level": level,
                "base_genus": g,
                "kernel_rank": data.kernel_basis.len(),
                "kernel_basis": data.kernel_basis,
                "genus": genus,
                "restriction": check,
            });
            if let Some(path) = graph {
                let base = ctx.graph(&path)?;
                let basis = free_basis(&base);
                let voltages: Vec<usize> = q.generators().to_vec();
                let cover = redgraph::voltage_cover(&base, &basis, &voltages, &q).map_err(input)?;
                invariant(cover.betti_number() as u64 == covers::cover_genus(basis.rank() as u64, q.order() as u64)?, "cover Betti number differs from the genus formula")?;
                v["voltage_cover"] = json!({
                    "vertices": cover.vertices().len(),
                    "edges": cover.edges().len(),
                    "betti_number": cover.betti_number(),
                });
            }
            v
        }
        Command::DwCompare { rep, level, basepoint, guard } => {
            let rho = ctx.rep(&rep)?;
            let r = covers::dw_transport(&rho, level, basepoint, guard)?;
            invariant(r.module_consistent, "equivariant functions are inconsistent")?;
            invariant(r.generators.iter().all(|g| g.equal_to_conjugate), "transported action is not the conjugate")?;
            invariant(!r.basepoint_is_identity || r.all_equal, "transport differs from the reduction")?;
            to_value(&r)
        }
        Command::Tower { rep, levels, guard } => {
            let rho = ctx.rep(&rep)?;
            let t = repcat::reduction_tower(&rho, levels, guard)?;
            invariant(t.compatible, "tower levels are incompatible")?;
            to_value(&t)
        }
        Command::Tensor(TwoReps { left, right }) => {
            let r = repcat::tensor(&ctx.rep(&left)?, &ctx.rep(&right)?)?;
            to_value(&RepFile::from_rep(&r))
        }
        Command::Dual { rep } => to_value(&RepFile::from_rep(&repcat::dual(&ctx.rep(&rep)?))),
        Command::Dsum(TwoReps { left, right }) => {
            let r = repcat::direct_sum(&ctx.rep(&left)?, &ctx.rep(&right)?)?;
            to_value(&RepFile::from_rep(&r))
        }
        Command::IsoCheck(TwoReps { left, right }) => {
            let report = repcat::iso_check(&ctx.rep(&left)?, &ctx.rep(&right)?)?;
            let mut v = match report.verdict {
                IsoVerdict::Isomorphic { conjugator } => json!({"verdict": "Isomorphic", "conjugator": mat(&conjugator)}),
                IsoVerdict::NotIsomorphic { witness } => json!({"verdict": "NotIsomorphic", "witness": witness}),
                IsoVerdict::Inconclusive => json!({"verdict": "Inconclusive"}),
            };
            v["hom_dimension"] = to_value(&report.hom_dimension);
            v
        }
    };
    Ok(report)
}

fn emit(mut report: Value, out: Option<&Path>) -> Result<(), CliError> {
    let obj: &mut Map<String, Value> = match report.as_object_mut() {
        Some(o) => o,
        None => return Err(CliError::Invariant("report is not a JSON object".into())),
    };
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    let text = serde_json::to_string_pretty(&report).expect("values serialize") + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli).and_then(|r| emit(r, out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let err = json!({"error": e.kind(), "message": e.message(), "schema_version": SCHEMA_VERSION});
            eprintln!("{}", serde_json::to_string_pretty(&err).expect("values serialize"));
            ExitCode::from(e.code())
        }
    }
}


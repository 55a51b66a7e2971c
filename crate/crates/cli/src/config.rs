use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use shapoform_core::rootsys::{CartanType, RootSystem};
use shapoform_core::scalars::ratfunc::parse_rational;
use shapoform_core::scalars::NumericField;
use shapoform_core::singular::{FhatMethod, VerifyMethod};
use shapoform_core::uqmodules::ModuleSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "shapoform", version, about = "Inverse Shapovalov forms and singular vectors for U_q(g)")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Positive roots, ρ-pairings and the Gram matrix of the simple roots.
    Roots(TypeArg),
    /// Dimensions or generator actions of a truncated Verma module.
    Verma(VermaArgs),
    /// One weight block of the Shapovalov pairing.
    Gram(GramArgs),
    /// Components of R̂ = q^{-h⊗h} R on V ⊗ M_λ.
    Rmatrix(ModuleArgs),
    /// Entries of F̂, or the route decomposition of one entry.
    Fhat(FhatArgs),
    /// Singular vectors u_j in V ⊗ M_λ and their annihilation check.
    Singular(SingularArgs),
    /// Exact checks: inverse form, ABRR identity, intertwining identity, denominators.
    #[command(subcommand)]
    Verify(Verify),
    /// Wall-clock and field-operation costs of the three constructions.
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Route-sum, ABRR and oracle inverses of the Shapovalov form.
    Inverse(InverseArgs),
    /// The ABRR linear identity and the series length bound.
    Abrr(ModuleArgs),
    /// The intertwining identity satisfied by F.
    Keyid(ModuleArgs),
    /// Denominators of the inverse form against the genericity factors.
    Audit(CutoffArgs),
}

#[derive(Args, Debug)]
pub struct TypeArg {
    /// Cartan type: A1, A2, A3, B2 or G2.
    #[arg(long = "type")]
    pub cartan: String,
}

#[derive(Args, Debug)]
pub struct CutoffArgs {
    #[command(flatten)]
    pub t: TypeArg,
    #[arg(long)]
    pub cutoff: usize,
}

#[derive(Args, Debug)]
pub struct Specialization {
    /// Substitute rationals for q and z_i = q^{(λ,α_i)}, e.g. `q=3/2,z1=2,z2=-5`.
    #[arg(long)]
    pub at: Option<String>,
}

#[derive(Args, Debug)]
pub struct VermaArgs {
    #[command(flatten)]
    pub c: CutoffArgs,
    #[arg(long, value_enum, default_value_t = VermaEmit::Dims)]
    pub emit: VermaEmit,
    /// The dual Verma module instead of M_λ.
    #[arg(long)]
    pub dual: bool,
    #[command(flatten)]
    pub at: Specialization,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VermaEmit {
    Dims,
    Actions,
}

#[derive(Args, Debug)]
pub struct GramArgs {
    #[command(flatten)]
    pub c: CutoffArgs,
    /// Depth of the block in simple-root coordinates, e.g. "1,1".
    #[arg(long)]
    pub nu: String,
    #[arg(long, value_enum, default_value_t = GramEmit::Matrix)]
    pub emit: GramEmit,
    #[command(flatten)]
    pub at: Specialization,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GramEmit {
    Matrix,
    Det,
    Inverse,
}

#[derive(Args, Debug)]
pub struct ModuleArgs {
    #[command(flatten)]
    pub t: TypeArg,
    /// verma-dual, trivial, natural, adjoint, fund:k or hw:a,b,...
    #[arg(long, default_value = "verma-dual")]
    pub module: String,
    /// Truncation level; required for verma-dual, defaults to the depth of V otherwise.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    pub at: Specialization,
}

#[derive(Args, Debug)]
pub struct FhatArgs {
    #[command(flatten)]
    pub m: ModuleArgs,
    #[arg(long, default_value = "routes")]
    pub method: String,
    #[arg(long, value_enum, default_value_t = FhatEmit::Entries)]
    pub emit: FhatEmit,
    /// Row label for `--emit routes`.
    #[arg(long)]
    pub i: Option<String>,
    /// Column label for `--emit routes`, or the only column for `--emit entries`.
    #[arg(long)]
    pub j: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FhatEmit {
    Entries,
    Routes,
}

#[derive(Args, Debug)]
pub struct SingularArgs {
    #[command(flatten)]
    pub m: ModuleArgs,
    #[arg(long, default_value = "routes")]
    pub method: String,
    /// Only this column; all columns (and their independence) otherwise.
    #[arg(long)]
    pub j: Option<String>,
}

#[derive(Args, Debug)]
pub struct InverseArgs {
    #[command(flatten)]
    pub c: CutoffArgs,
    #[arg(long, default_value = "all")]
    pub method: String,
    /// Run at this many seeded rational points instead of symbolically.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include per-stage wall-clock times (makes the report nondeterministic).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub m: ModuleArgs,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

pub fn cap(t: CartanType) -> Option<usize> {
    match t {
        CartanType::A(1) => Some(10),
        CartanType::A(2) => Some(6),
        CartanType::A(3) => Some(4),
        CartanType::B(2) => Some(5),
        CartanType::G2 => Some(3),
        _ => None,
    }
}

impl TypeArg {
    pub fn root_system(&self) -> Result<RootSystem, UsageError> {
        let t = CartanType::from_str(&self.cartan).map_err(|e| usage(e.to_string()))?;
        if cap(t).is_none() {
            return Err(usage(format!("type {t} is not supported; use A1, A2, A3, B2 or G2")));
        }
        Ok(RootSystem::of_type(t))
    }
}

pub fn check_cutoff(rs: &RootSystem, cutoff: usize) -> Result<usize, UsageError> {
    let t = CartanType::from_str(&rs.name).map_err(|e| usage(e.to_string()))?;
    let max = cap(t).unwrap_or(0);
    if cutoff > max {
        return Err(usage(format!("cutoff {cutoff} exceeds the cap {max} for {t}")));
    }
    Ok(cutoff)
}

impl CutoffArgs {
    pub fn resolve(&self) -> Result<(RootSystem, usize), UsageError> {
        let rs = self.t.root_system()?;
        let c = check_cutoff(&rs, self.cutoff)?;
        Ok((rs, c))
    }
}

impl ModuleArgs {
    pub fn resolve(&self) -> Result<(RootSystem, ModuleSpec, Option<usize>), UsageError> {
        let rs = self.t.root_system()?;
        let spec = ModuleSpec::from_str(&self.module).map_err(|e| usage(e.to_string()))?;
        if spec == ModuleSpec::DualVerma && self.cutoff.is_none() {
            return Err(usage("--cutoff is required for verma-dual"));
        }
        if spec != ModuleSpec::DualVerma {
            spec.labels(&rs).map_err(|e| usage(e.to_string()))?;
        }
        let cutoff = self.cutoff.map(|c| check_cutoff(&rs, c)).transpose()?;
        Ok((rs, spec, cutoff))
    }
}

pub fn parse_method<T: FromStr>(s: &str) -> Result<T, UsageError>
where
    T::Err: std::fmt::Display,
{
    T::from_str(s).map_err(|e| usage(e.to_string()))
}

pub fn fhat_method(s: &str) -> Result<FhatMethod, UsageError> {
    parse_method(s)
}

pub fn verify_method(s: &str) -> Result<VerifyMethod, UsageError> {
    parse_method(s)
}

pub fn parse_nu(s: &str, rank: usize) -> Result<Vec<i64>, UsageError> {
    let nu: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("invalid weight `{s}`")))?;
    if nu.len() != rank || nu.iter().any(|&x| x < 0) {
        return Err(usage(format!("`{s}` is not a nonnegative combination of {rank} simple roots")));
    }
    Ok(nu)
}

/// `q=3/2,z1=2,...`; every `z_i` of the rank must be present.
pub fn parse_point(s: &str, rank: usize) -> Result<NumericField, UsageError> {
    let mut q0: Option<BigRational> = None;
    let mut z0: Vec<Option<BigRational>> = vec![None; rank];
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| usage(format!("expected name=value, got `{part}`")))?;
        let v = parse_rational(v).map_err(|e| usage(e.to_string()))?;
        match k.trim() {
            "q" => q0 = Some(v),
            name => {
                let i: usize = name
                    .strip_prefix('z')
                    .and_then(|i| i.parse().ok())
                    .filter(|&i| (1..=rank).contains(&i))
                    .ok_or_else(|| usage(format!("unknown variable `{name}`")))?;
                z0[i - 1] = Some(v);
            }
        }
    }
    let q0 = q0.ok_or_else(|| usage("missing value for q"))?;
    let z0: Vec<BigRational> = z0
        .into_iter()
        .enumerate()
        .map(|(i, z)| z.ok_or_else(|| usage(format!("missing value for z{}", i + 1))))
        .collect::<Result<_, _>>()?;
    NumericField::new(q0, z0).map_err(|e| usage(e.to_string()))
}

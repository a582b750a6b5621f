use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fjseries::arith::{format_rational, is_squarefree, parse_rational, prime_divisors, primes_up_to};
use fjseries::classnumber::rank1_row;
use fjseries::congruence::{chi_t, closed_form_count, count_congruence_with, CountMethod};
use fjseries::families::rank_one_parameter;
use fjseries::fj::{convolution_check, vn_adjoint, FJCoefficientTable, ScalarProvider};
use fjseries::series::{
    assemble_main_theorem, evenrank_zeta_xi_factor, verify_evenrank_identity_with, verify_rank1_identity,
    IdentityReport, LocalFactor, LocalFactorView, OpaqueLFunction, ReportMismatch,
};
use fjseries::EvenLattice;

use crate::output::{Emitter, Format};
use crate::{Cli, Command, EvenRankArgs, Rank1Args, SeriesCommand};

type Outcome = Result<bool, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_lattice(path: &Path) -> Result<EvenLattice, String> {
    EvenLattice::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn lib<T>(r: fjseries::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn io<T>(r: std::io::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("writing output: {e}"))
}

fn bad_set(bad: &Option<Vec<u64>>, default: impl FnOnce() -> BTreeSet<u64>) -> BTreeSet<u64> {
    match bad {
        Some(v) => v.iter().copied().collect(),
        None => default(),
    }
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    identity: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    checked: u64,
    mismatches: usize,
    passed: bool,
}

#[derive(Serialize)]
struct FullReport<'a> {
    identity: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    checked: u64,
    mismatches: &'a [ReportMismatch],
    #[serde(skip_serializing_if = "<[u64]>::is_empty")]
    skipped: &'a [u64],
    local_counts: u64,
    passed: bool,
}

fn emit_report(out: &mut Emitter, report: &IdentityReport, seed: Option<u64>) -> Outcome {
    let passed = report.passed();
    match out.format() {
        Format::Csv => io(out.row(&ReportSummary {
            identity: &report.identity,
            seed,
            checked: report.checked,
            mismatches: report.mismatches.len(),
            passed,
        }))?,
        Format::Json => io(out.row(&FullReport {
            identity: &report.identity,
            seed,
            checked: report.checked,
            mismatches: &report.mismatches,
            skipped: &report.skipped,
            local_counts: report.local_counts,
            passed,
        }))?,
    }
    eprintln!(
        "{}: {} checks, {} mismatches{}",
        report.identity,
        report.checked,
        report.mismatches.len(),
        seed.map(|s| format!(", seed {s}")).unwrap_or_default()
    );
    Ok(passed)
}

pub fn run(cli: &Cli) -> Outcome {
    let mut out = Emitter::new(cli.format);
    let result = dispatch(&cli.command, &mut out);
    io(out.finish())?;
    result
}

fn dispatch(command: &Command, out: &mut Emitter) -> Outcome {
    match command {
        Command::Level(a) => level(&a.lattice, out),
        Command::Maximal(a) => maximal(&a.lattice, out),
        Command::Count { lattice, d_disc, d, method } => count(lattice, *d_disc, *d, *method, out),
        Command::EulerFactor { lattice, p, kmax } => euler_factor(lattice, *p, *kmax, out),
        Command::VerifyEuler { lattice, pmax, kmax, bad, method } => {
            verify_euler(&lattice.lattice, *pmax, *kmax, bad, *method, out)
        }
        Command::VerifyRank1(a) | Command::Series(SeriesCommand::VerifyRank1(a)) => verify_rank1(a, out),
        Command::VerifyEvenrank(a) | Command::Series(SeriesCommand::VerifyEvenrank(a)) => verify_evenrank(a, out),
        Command::Rank1 { tmax } => rank1(*tmax, out),
        Command::Adjoint { table } => adjoint(table, out),
        Command::CheckConvolution { lattice, weight, nmax, seed, d_disc, bad } => {
            check_convolution(&lattice.lattice, *weight, *nmax, *seed, *d_disc, bad, out)
        }
        Command::Assemble { lattice, weight, nmax, axi, lfunction, bad } => {
            assemble(&lattice.lattice, *weight, *nmax, axi, lfunction.as_deref(), bad, out)
        }
    }
}

fn level(path: &Path, out: &mut Emitter) -> Outcome {
    #[derive(Serialize)]
    struct Row {
        q: i64,
    }
    let lat = load_lattice(path)?;
    io(out.row(&Row { q: lat.level() }))?;
    eprintln!("level q = {} (n = {}, det = {})", lat.level(), lat.rank(), lat.det());
    Ok(true)
}

fn maximal(path: &Path, out: &mut Emitter) -> Outcome {
    #[derive(Serialize)]
    struct Row {
        maximal: bool,
        /// Space-separated `S^{-1} s` coordinates of a glue vector.
        witness: Option<String>,
    }
    let lat = load_lattice(path)?;
    let witness = lat
        .maximality_witness()
        .map(|x| x.iter().map(format_rational).collect::<Vec<_>>().join(" "));
    eprintln!("maximal: {}", witness.is_none());
    io(out.row(&Row { maximal: witness.is_none(), witness }))?;
    Ok(true)
}

fn count(lattice: &crate::LatticeArg, d_disc: Option<i64>, d: u64, method: CountMethod, out: &mut Emitter) -> Outcome {
    let lat = load_lattice(&lattice.lattice)?;
    let d_disc = d_disc.unwrap_or(-lat.level());
    let c = lib(count_congruence_with(&lat, d_disc, d, method))?;
    io(out.row(&c))?;
    eprintln!("n(xi; {d}) = {} for D = {d_disc} ({:?}, {} residues)", c.count, c.method, c.enumerated);
    Ok(true)
}

/// Generating function of `n(xi; p^k)` in `X = p^{-s}`, with `D = -q`.
fn zeta_xi_factor(lat: &EvenLattice, p: u64) -> fjseries::Result<LocalFactor> {
    match rank_one_parameter(lat) {
        Some(t) => LocalFactor::from_ints(p, &[1, 1], &[1, -(chi_t(t, p) as i64)]),
        None if lat.rank() == 1 => Err(fjseries::Error::UnsupportedFamily),
        None => evenrank_zeta_xi_factor(lat, p),
    }
}

fn euler_factor(lattice: &crate::LatticeArg, p: u64, kmax: usize, out: &mut Emitter) -> Outcome {
    #[derive(Serialize)]
    struct Row {
        p: u64,
        num: String,
        den: String,
        expansion: String,
    }
    let lat = load_lattice(&lattice.lattice)?;
    if p % 2 == 0 || !fjseries::arith::is_prime(p) || (2 * lat.level() * lat.det()) as u64 % p == 0 {
        return Err(format!("p = {p} must be an odd prime not dividing 2 q det(S)"));
    }
    let f = lib(zeta_xi_factor(&lat, p))?;
    let view = f.to_view();
    let join = |v: &[String]| v.join(" ");
    let expansion: Vec<String> = f.expand(kmax).iter().map(format_rational).collect();
    io(out.row(&Row { p, num: join(&view.num), den: join(&view.den), expansion: join(&expansion) }))?;
    eprintln!("local factor at {p}: ({}) / ({})", join(&view.num), join(&view.den));
    Ok(true)
}

fn verify_euler(
    path: &Path,
    pmax: u64,
    kmax: u32,
    bad: &Option<Vec<u64>>,
    method: CountMethod,
    out: &mut Emitter,
) -> Outcome {
    #[derive(Serialize)]
    struct Row {
        p: u64,
        k: u32,
        brute: u64,
        closed: String,
        #[serde(rename = "match")]
        matches: bool,
    }
    let lat = load_lattice(path)?;
    let d_disc = -lat.level();
    let bad = bad_set(bad, || lat.default_bad_primes(d_disc));
    let (mut rows, mut failed) = (0, 0);
    for p in primes_up_to(pmax).into_iter().filter(|p| !bad.contains(p)) {
        for k in 1..=kmax {
            let closed = lib(closed_form_count(&lat, p, k))?;
            let c = lib(count_congruence_with(&lat, d_disc, p.pow(k), method))?;
            let matches = c.count as u128 == closed;
            rows += 1;
            failed += !matches as u32;
            io(out.row(&Row { p, k, brute: c.count, closed: closed.to_string(), matches }))?;
        }
    }
    eprintln!("verify-euler: {rows} rows, {failed} mismatches");
    Ok(failed == 0)
}

fn verify_rank1(a: &Rank1Args, out: &mut Emitter) -> Outcome {
    if a.t < 1 || !is_squarefree(a.t as u64) {
        return Err(format!("t = {} must be a positive squarefree integer", a.t));
    }
    let bad = bad_set(&a.bad, || std::iter::once(2).chain(prime_divisors(a.t as u64)).collect());
    let report = lib(verify_rank1_identity(a.t, a.nmax, &bad))?;
    emit_report(out, &report, None)
}

fn verify_evenrank(a: &EvenRankArgs, out: &mut Emitter) -> Outcome {
    let lat = load_lattice(&a.lattice.lattice)?;
    let report = lib(verify_evenrank_identity_with(&lat, &a.primes, a.kmax, a.method))?;
    emit_report(out, &report, None)
}

fn rank1(tmax: i64, out: &mut Emitter) -> Outcome {
    let mut admissible = Vec::new();
    for t in (1..=tmax).filter(|&t| is_squarefree(t as u64)) {
        let row = lib(rank1_row(t))?;
        if row.admissible {
            admissible.push(t);
        }
        io(out.row(&row))?;
    }
    eprintln!("admissible t <= {tmax}: {admissible:?}");
    Ok(true)
}

fn adjoint(path: &Path, out: &mut Emitter) -> Outcome {
    #[derive(Serialize)]
    struct Row<'a> {
        #[serde(rename = "D")]
        d_disc: i64,
        r: String,
        value: &'a str,
    }
    let table = FJCoefficientTable::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let result = vn_adjoint(&table);
    let file = result.to_file();
    match out.format() {
        Format::Json => io(out.row(&file))?,
        Format::Csv => {
            for e in &file.entries {
                let r: Vec<String> = e.r.iter().map(i64::to_string).collect();
                io(out.row(&Row { d_disc: e.d_disc, r: r.join(" "), value: &e.value }))?;
            }
        }
    }
    eprintln!("V_N^* with N = {}: {} entries in, {} out", table.index(), table.len(), result.len());
    Ok(true)
}

fn check_convolution(
    path: &Path,
    weight: i64,
    nmax: u64,
    seed: u64,
    d_disc: Option<i64>,
    bad: &Option<Vec<u64>>,
    out: &mut Emitter,
) -> Outcome {
    let lat = load_lattice(path)?;
    let d_disc = d_disc.unwrap_or(-lat.level());
    let bad = bad_set(bad, || lat.default_bad_primes(d_disc));
    let provider = ScalarProvider::seeded(&lat, d_disc, nmax as usize, seed);
    let report = lib(convolution_check(&provider, &lat, d_disc, weight, nmax, &bad))?;
    emit_report(out, &report, Some(seed))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LFunctionFile {
    #[serde(default)]
    center_shift: Option<String>,
    factors: Vec<LocalFactorView>,
}

fn load_l_function(path: Option<&Path>, nmax: u64) -> Result<OpaqueLFunction, String> {
    let Some(path) = path else {
        return Ok(OpaqueLFunction::trivial(nmax));
    };
    let file: LFunctionFile =
        serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut l = OpaqueLFunction::trivial(nmax);
    if let Some(c) = &file.center_shift {
        l.center_shift = parse_rational(c).ok_or_else(|| format!("center_shift {c:?} is not a rational"))?;
    }
    for view in &file.factors {
        l.factors.insert(view.p, lib(LocalFactor::from_view(view))?);
    }
    Ok(l)
}

fn assemble(
    path: &Path,
    weight: i64,
    nmax: u64,
    axi: &str,
    lfunction: Option<&Path>,
    bad: &Option<Vec<u64>>,
    out: &mut Emitter,
) -> Outcome {
    #[derive(Serialize)]
    struct Row {
        n: u64,
        coefficient: String,
    }
    let lat = load_lattice(path)?;
    let a_xi = parse_rational(axi).ok_or_else(|| format!("A(xi) = {axi:?} is not a rational"))?;
    let bad = bad_set(bad, || lat.default_bad_primes(-lat.level()));
    let l = load_l_function(lfunction, nmax)?;
    let series = lib(assemble_main_theorem(&lat, &l, &a_xi, weight, nmax, &bad))?;
    for (i, c) in series.coeffs().iter().enumerate() {
        io(out.row(&Row { n: i as u64 + 1, coefficient: format_rational(c) }))?;
    }
    eprintln!("assembled series: {nmax} coefficients, bad primes {bad:?}");
    Ok(true)
}

//! Named cross-checks between closed forms and exhaustive computation,
//! grouped the way `verify` and `check-examples` run them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{pless_check, secret_sharing_ratio, Code, CodeError, Method, WeightDistribution};
use crate::config::{ConfigError, RunConfig};
use crate::cyclotomic::{self, CycError, SqrtConvention};
use crate::field::Fx;
use crate::ghw::{self, CountMethod, GhwError, GhwMethod};
use crate::qform::{self, FormSpec, QformError};
use crate::report::{Check, Report};
use crate::subspaces::{enumerate_subspaces, Budget, BudgetExceeded};

/// Failure of a check group: out of budget (skipped) or an error (failed).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("{0}")]
    Other(String),
}

impl From<CodeError> for SuiteError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::Budget(b) => SuiteError::Budget(b),
            other => SuiteError::Other(other.to_string()),
        }
    }
}

impl From<GhwError> for SuiteError {
    fn from(e: GhwError) -> Self {
        match e {
            GhwError::Budget(b) => SuiteError::Budget(b),
            other => SuiteError::Other(other.to_string()),
        }
    }
}

impl From<QformError> for SuiteError {
    fn from(e: QformError) -> Self {
        match e {
            QformError::Budget(b) => SuiteError::Budget(b),
            other => SuiteError::Other(other.to_string()),
        }
    }
}

impl From<CycError> for SuiteError {
    fn from(e: CycError) -> Self {
        SuiteError::Other(e.to_string())
    }
}

impl From<ConfigError> for SuiteError {
    fn from(e: ConfigError) -> Self {
        SuiteError::Other(e.to_string())
    }
}

pub type Checks = Result<Vec<Check>, SuiteError>;

/// Runs a group and files its outcome in `report`: checks are appended,
/// budget overruns are listed as skipped, other errors become failed checks.
pub fn record(report: &mut Report, group: &str, outcome: Checks) {
    match outcome {
        Ok(cs) => report.extend(cs),
        Err(SuiteError::Budget(b)) => report.skipped.push(format!("{group}: {b}")),
        Err(SuiteError::Other(msg)) => report.push(Check::new(group, "no error", msg, false)),
    }
}

/// Deliberate defects for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Faults {
    /// The form reports the opposite sign.
    pub flip_sign: bool,
    /// `(0,0)` is added to the defining set.
    pub origin_in_d: bool,
}

impl Faults {
    pub fn apply_form(&self, form: &FormSpec) -> FormSpec {
        if self.flip_sign {
            form.with_flipped_sign()
        } else {
            form.clone()
        }
    }

    pub fn apply(&self, code: &Code) -> Code {
        let c = if self.flip_sign {
            Code::new(code.form().with_flipped_sign(), code.alpha()).expect("flipping the sign keeps the form valid")
        } else {
            code.clone()
        };
        if self.origin_in_d {
            c.with_injected_origin()
        } else {
            c
        }
    }
}

/// Short identifier used in check names.
pub fn label(code: &Code) -> String {
    let f = code.field();
    format!("(p,e)=({},{}) eps={:+} alpha={:?}", f.p(), f.e(), code.form_sign(), f.coords(code.alpha()))
}

fn form_label(form: &FormSpec) -> String {
    let f = form.field();
    format!("(p,e)=({},{}) eps={:+}", f.p(), f.e(), form.profile().sign)
}

/// Solution counts of `f = a` on every subspace of dimension `<= max_dim`,
/// closed form against direct count.
pub fn subspace_count_sweep(form: &FormSpec, max_dim: usize, budget: &Budget) -> Checks {
    let f = form.field();
    let (p, e) = (f.p(), f.e());
    let mut cases = 0u64;
    let mut bad = Vec::new();
    for r in 0..=max_dim.min(e) {
        for h in enumerate_subspaces(p, e, r, budget)? {
            for a in 0..p {
                cases += 1;
                let formula = qform::count_on_subspace(form, &h, a, qform::CountMethod::Formula)?;
                let direct = qform::count_on_subspace(form, &h, a, qform::CountMethod::Oracle)?;
                if formula != direct && bad.len() < 5 {
                    bad.push(format!("dim {r} a={a}: {formula} vs {direct}"));
                }
            }
        }
    }
    let name = format!("subspace solution counts, formula = count, {} dim<={max_dim}", form_label(form));
    Ok(vec![Check::new(name, format!("{cases} agreements"), if bad.is_empty() { format!("{cases} agreements") } else { bad.join("; ") }, bad.is_empty())])
}

fn sweep_check(s: &cyclotomic::Sweep) -> Check {
    Check::new(s.name.clone(), format!("{} cases hold", s.cases), if s.passed() { s.summary() } else { format!("{}; first: {}", s.summary(), s.failures[0]) }, s.passed())
}

/// Closed form of `sum_x zeta^(f(x) - Tr(bx))` for every `b`, once with
/// `sqrt(p*) = g` (the convention the orbit sums need) and once with
/// `sqrt(p*) = eta(-1) g`.
pub fn weil_checks(form: &FormSpec) -> Checks {
    Ok(SqrtConvention::ALL.iter().map(|&c| sweep_check(&cyclotomic::weil_identity_sweep(form, c))).collect())
}

/// Galois-orbit sums under `sqrt(p*) = g`.
pub fn orbit_checks(primes: &[u32], r_max: u32) -> Checks {
    primes.iter().map(|&p| Ok(sweep_check(&cyclotomic::galois_orbit_sweep(p, r_max, SqrtConvention::Gauss)?))).collect()
}

pub fn gauss_checks(primes: &[u32]) -> Checks {
    primes.iter().map(|&p| Ok(sweep_check(&cyclotomic::gauss_law_sweep(p)?))).collect()
}

/// Length by formula and by count, and the zero-column scan.
pub fn structure_checks(code: &Code) -> Checks {
    let l = label(code);
    Ok(vec![
        Check::equal(format!("length p^(2e-1)-1, {l}"), code.length_formula(), code.defining_set().len() as u64),
        Check::holds(format!("no zero coordinate (dual distance >= 2), {l}"), code.dual_distance_at_least_2(), "scan of D"),
    ])
}

/// Per-codeword weights: case formula against counting over `D`.
pub fn codeword_checks(code: &Code, budget: &Budget) -> Checks {
    let weights = code.weights_enumerate(budget)?;
    let q = code.q();
    let mut bad = Vec::new();
    for (i, &w) in weights.iter().enumerate().skip(1) {
        let (u, v) = (Fx::from_index(i / q), Fx::from_index(i % q));
        let fw = code.codeword_weight(u, v, Method::Formula)?;
        if fw != w && bad.len() < 5 {
            bad.push(format!("(u,v)=({},{}) {:?}: formula {fw}, count {w}", i / q, i % q, code.weight_case(u, v)?));
        }
    }
    let total = weights.len() - 1;
    let zero = weights[1..].iter().filter(|&&w| w == 0).count();
    Ok(vec![
        Check::new(
            format!("codeword weights, formula = enumeration, {}", label(code)),
            format!("{total} agreements"),
            if bad.is_empty() { format!("{total} agreements") } else { bad.join("; ") },
            bad.is_empty(),
        ),
        Check::equal(format!("nonzero (u,v) give nonzero codewords, {}", label(code)), 0, zero),
    ])
}

/// Weight distribution by both methods plus the identities it must satisfy.
/// Returns the enumerated distribution for later cross-checks.
pub fn distribution_checks(code: &Code, budget: &Budget) -> Result<(Vec<Check>, WeightDistribution), SuiteError> {
    let l = label(code);
    let formula = code.weight_distribution(Method::Formula, budget)?;
    let counted = code.weight_distribution(Method::Enumerate, budget)?;
    let mut out = vec![Check::equal(format!("weight distribution, formula = enumeration, {l}"), formula.enumerator(), counted.enumerator())];
    for (tag, wd) in [("formula", &formula), ("enumeration", &counted)] {
        let pl = pless_check(wd);
        out.push(Check::new(
            format!("power moments ({tag}), {l}"),
            format!("count {} moment {}", pl.count.1, pl.moment.1),
            format!("count {} moment {}", pl.count.0, pl.moment.0),
            pl.passed(),
        ));
    }
    out.push(Check::equal(format!("dimension 2e, {l}"), 2 * code.e(), counted.k));
    out.push(Check::equal(format!("three nonzero weights, {l}"), 3, counted.nonzero().count()));
    if code.e() >= 3 {
        if let Some(r) = secret_sharing_ratio(&counted) {
            out.push(Check::holds(format!("p*w_min > (p-1)*w_max, {l}"), r.ratio_ok, format!("w_min {} w_max {}", r.w_min, r.w_max)));
        }
    }
    Ok((out, counted))
}

/// `N(H)` by counting on the dual and by the character-sum expression, over
/// every subspace of `F_p^(2e)` of dimension `<= max_dim`.
pub fn charsum_n_checks(code: &Code, max_dim: usize, budget: &Budget) -> Checks {
    let (p, m) = (code.p(), 2 * code.e());
    let mut cases = 0u64;
    let mut bad = Vec::new();
    for r in 0..=max_dim {
        for h in enumerate_subspaces(p, m, r, budget)? {
            cases += 1;
            let a = ghw::n_of_subspace(code, &h, CountMethod::Count)?;
            let b = ghw::n_of_subspace(code, &h, CountMethod::CharSum)?;
            if a != b && bad.len() < 5 {
                bad.push(format!("dim {r}: count {a}, charsum {b}"));
            }
        }
    }
    Ok(vec![Check::new(
        format!("N(H) count = character sum, dim<={max_dim}, {}", label(code)),
        format!("{cases} agreements"),
        if bad.is_empty() { format!("{cases} agreements") } else { bad.join("; ") },
        bad.is_empty(),
    )])
}

/// Closed-form hierarchy for all `r` with its invariants, and brute force
/// against it for the listed ranks.
pub fn ghw_checks(code: &Code, brute_ranks: &[usize], budget: &Budget) -> Checks {
    let l = label(code);
    let k = 2 * code.e();
    let all: Vec<usize> = (1..=k).collect();
    let formula = ghw::ghw_table(code, &all, GhwMethod::Formula, budget)?;
    let min_weight = code.weight_distribution(Method::Formula, budget)?.min_weight();
    let violations = formula.invariant_violations(min_weight);
    let mut out = vec![Check::new(
        format!("hierarchy invariants (monotone, d_1 = min weight, d_2e = n), {l}"),
        "none violated",
        if violations.is_empty() { "none violated".to_string() } else { violations.join("; ") },
        violations.is_empty(),
    )];
    for &r in brute_ranks {
        let b = ghw::ghw_brute(code, r, budget)?;
        out.push(Check::equal(format!("d_{r} brute force = formula, {l}"), formula.get(r).expect("all ranks present"), b.d_r));
        let recount = ghw::n_of_subspace(code, &b.witness, CountMethod::Count)?;
        out.push(Check::equal(format!("d_{r} witness recount, {l}"), b.max_n, recount));
    }
    Ok(out)
}

/// The explicit maximizing subspaces for `1 <= r <= e - e_0`.
pub fn witness_checks(code: &Code) -> Checks {
    let max = code.e() - ghw::e0(code);
    (1..=max)
        .map(|r| {
            let claimed = code.length_formula() + 1 - ghw::ghw_formula(code, r)?;
            Ok(match ghw::witness_construction(code, r) {
                Ok(w) => Check::equal(format!("constructed H_{r} attains max N, {}", label(code)), claimed, w.n),
                Err(GhwError::WitnessMismatch { claimed, counted }) => {
                    Check::equal(format!("constructed H_{r} attains max N, {}", label(code)), claimed, counted)
                }
                Err(e) => return Err(e.into()),
            })
        })
        .collect()
}

/// Hierarchies of the codes with defining set `{f = a}` against search.
pub fn reference_checks(form: &FormSpec, budget: &Budget) -> Checks {
    let f = form.field();
    let mut cases = 0;
    let mut bad = Vec::new();
    for a in 1..f.p() {
        for r in 1..=f.e() {
            match ghw::ghw_reference_da(form, a, r) {
                Ok(d) => {
                    cases += 1;
                    let b = ghw::ghw_reference_da_brute(form, a, r, budget)?;
                    if b != d {
                        bad.push(format!("a={a} r={r}: formula {d}, search {b}"));
                    }
                }
                Err(GhwError::Hypothesis(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(vec![Check::new(
        format!("level-set code hierarchies, formula = search, {}", form_label(form)),
        format!("{cases} agreements"),
        if bad.is_empty() { format!("{cases} agreements") } else { bad.join("; ") },
        bad.is_empty() && cases > 0,
    )])
}

/// Distribution (both methods) and hierarchy (formula, plus brute force at
/// `brute_ranks`) are the same for every alpha listed.
pub fn alpha_invariance_checks(form: &FormSpec, alphas: &[Fx], brute_ranks: &[usize], budget: &Budget) -> Checks {
    let mut seen: BTreeMap<&str, (String, String)> = BTreeMap::new();
    let mut bad = Vec::new();
    for &alpha in alphas {
        let code = Code::new(form.clone(), alpha)?;
        let mut record = |key: &'static str, value: String| match seen.get(key) {
            None => {
                seen.insert(key, (value, format!("{:?}", form.field().coords(alpha))));
            }
            Some((v, first)) if *v != value => bad.push(format!("{key} differs between alpha={first} and alpha={:?}", form.field().coords(alpha))),
            _ => {}
        };
        record("formula distribution", code.weight_distribution(Method::Formula, budget)?.enumerator());
        record("enumerated distribution", code.weight_distribution(Method::Enumerate, budget)?.enumerator());
        if code.e() >= 3 {
            let k = 2 * code.e();
            let d: Vec<u64> = (1..=k).map(|r| ghw::ghw_formula(&code, r)).collect::<Result<_, _>>()?;
            record("formula hierarchy", format!("{d:?}"));
        }
        let brute: Vec<u64> = brute_ranks.iter().map(|&r| ghw::ghw_brute(&code, r, budget).map(|b| b.d_r)).collect::<Result<_, _>>()?;
        record("brute-force hierarchy", format!("{brute:?}"));
    }
    Ok(vec![Check::new(
        format!("independence of alpha ({} values), {}", alphas.len(), form_label(form)),
        "identical",
        if bad.is_empty() { "identical".to_string() } else { bad.join("; ") },
        bad.is_empty() && alphas.len() >= 3,
    )])
}

/// Alphas used for invariance sweeps: `1`, `theta`, and two more powers.
pub fn sample_alphas(form: &FormSpec) -> Vec<Fx> {
    let f = form.field();
    let mut out = vec![f.one(), f.primitive()];
    for k in [5u64, 11] {
        let a = f.primitive_pow(k);
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

/// One worked example in the golden file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenExample {
    pub name: String,
    pub p: u32,
    pub e: usize,
    pub form: String,
    pub alpha: String,
    pub form_sign: i8,
    pub n: u64,
    pub k: usize,
    pub d: u64,
    /// `[weight, multiplicity]` for the nonzero weights.
    pub enumerator: Vec<[u64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Golden {
    pub example: Vec<GoldenExample>,
}

pub const DEFAULT_GOLDEN: &str = include_str!("../golden/examples.toml");

impl Golden {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new("golden file", e.to_string()))
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_GOLDEN).expect("bundled golden file parses")
    }
}

/// Weight-level differences between a distribution and a golden enumerator.
pub fn enumerator_diff(golden: &[[u64; 2]], wd: &WeightDistribution) -> Vec<String> {
    let want: BTreeMap<u64, u64> = golden.iter().map(|&[w, m]| (w, m)).collect();
    let got: BTreeMap<u64, u64> = wd.nonzero().map(|e| (e.weight, e.multiplicity)).collect();
    let mut weights: Vec<u64> = want.keys().chain(got.keys()).copied().collect();
    weights.sort_unstable();
    weights.dedup();
    weights
        .into_iter()
        .filter_map(|w| {
            let (a, b) = (want.get(&w).copied().unwrap_or(0), got.get(&w).copied().unwrap_or(0));
            (a != b).then(|| format!("weight {w}: expected {a}, got {b}"))
        })
        .collect()
}

/// Each golden example by formula and by enumeration: enumerator,
/// parameters `[n, k, d]`, computed form sign, and `d_1` from the hierarchy.
/// `modulus`, when given, replaces the default modulus for examples of the
/// matching degree.
pub fn example_checks(golden: &Golden, modulus: Option<&[u32]>, faults: Faults, budget: &Budget) -> Checks {
    let mut out = Vec::new();
    for ex in &golden.example {
        let cfg = RunConfig {
            p: ex.p,
            e: ex.e,
            modulus: modulus.filter(|m| m.len() == ex.e + 1).map(|m| m.to_vec()),
            form: ex.form.clone(),
            alpha: ex.alpha.clone(),
        };
        let code = faults.apply(&cfg.build()?);
        let name = &ex.name;
        out.push(Check::equal(format!("{name}: form sign"), ex.form_sign, code.form_sign()));
        for method in [Method::Formula, Method::Enumerate] {
            let wd = code.weight_distribution(method, budget)?;
            let tag = if method == Method::Formula { "formula" } else { "enumeration" };
            let diff = enumerator_diff(&ex.enumerator, &wd);
            let golden_text = WeightDistribution::from_histogram(ex.p, ex.n, ex.k, ex.enumerator.iter().map(|&[w, m]| (w, m)).collect()).enumerator();
            out.push(Check::new(
                format!("{name}: weight enumerator ({tag})"),
                golden_text,
                if diff.is_empty() { wd.enumerator() } else { diff.join("; ") },
                diff.is_empty(),
            ));
            let params = |n: u64, k: usize, d: u64| format!("[{n}, {k}, {d}]");
            out.push(Check::equal(
                format!("{name}: parameters ({tag})"),
                params(ex.n, ex.k, ex.d),
                params(wd.n, wd.k, wd.min_weight().unwrap_or(0)),
            ));
        }
        if ex.e >= 3 {
            out.push(Check::equal(format!("{name}: d_1 formula = minimum distance"), ex.d, ghw::ghw_formula(&code, 1)?));
        }
        out.push(Check::equal(format!("{name}: d_1 brute force = minimum distance"), ex.d, ghw::ghw_brute(&code, 1, budget)?.d_r));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// Parameter sets of the full sweep beyond `(3,3)`, with the brute-force
/// ranks and subspace dimensions used at each.
struct Plan {
    p: u32,
    e: usize,
    form: &'static str,
    alpha: &'static str,
    count_dim: usize,
    n_dim: usize,
    brute: &'static [usize],
    invariance_brute: &'static [usize],
}

const QUICK: Plan = Plan { p: 3, e: 3, form: "tr_x2", alpha: "1", count_dim: 3, n_dim: 2, brute: &[1, 2, 3, 4, 5, 6], invariance_brute: &[1, 2, 3, 4, 5, 6] };

const FULL: [Plan; 3] = [
    Plan { p: 5, e: 3, form: "tr_x2", alpha: "1", count_dim: 3, n_dim: 1, brute: &[1, 2, 5, 6], invariance_brute: &[1, 5, 6] },
    Plan { p: 3, e: 4, form: "tr_theta_x2", alpha: "1", count_dim: 2, n_dim: 1, brute: &[1, 2, 6, 7, 8], invariance_brute: &[1, 6, 7, 8] },
    Plan { p: 3, e: 4, form: "tr_x2", alpha: "theta", count_dim: 2, n_dim: 1, brute: &[1, 2, 6, 7, 8], invariance_brute: &[1, 6, 7, 8] },
];

fn run_plan(report: &mut Report, plan: &Plan, faults: Faults, budget: &Budget) {
    let cfg = RunConfig { p: plan.p, e: plan.e, modulus: None, form: plan.form.into(), alpha: plan.alpha.into() };
    let code = match cfg.build() {
        Ok(c) => faults.apply(&c),
        Err(e) => {
            report.push(Check::new(format!("build ({},{})", plan.p, plan.e), "valid configuration", e.to_string(), false));
            return;
        }
    };
    let form = code.form().clone();
    let tag = label(&code);
    record(report, &format!("character sums {tag}"), weil_checks(&form));
    record(report, &format!("subspace counts {tag}"), subspace_count_sweep(&form, plan.count_dim, budget));
    record(report, &format!("structure {tag}"), structure_checks(&code));
    record(report, &format!("codeword weights {tag}"), codeword_checks(&code, budget));
    record(report, &format!("distribution {tag}"), distribution_checks(&code, budget).map(|(c, _)| c));
    record(report, &format!("N(H) {tag}"), charsum_n_checks(&code, plan.n_dim, budget));
    record(report, &format!("hierarchy {tag}"), ghw_checks(&code, plan.brute, budget));
    record(report, &format!("witnesses {tag}"), witness_checks(&code));
    record(report, &format!("level-set hierarchies {tag}"), reference_checks(&form, budget));
    record(report, &format!("alpha invariance {tag}"), alpha_invariance_checks(&form, &sample_alphas(&form), plan.invariance_brute, budget));
}

/// `quick`: every sweep at `(3,3)` plus the prime-only cyclotomic sweeps.
/// `full`: additionally `(5,3)` and `(3,4)` with both signs.
pub fn verify(level: Level, faults: Faults, budget: &Budget) -> Report {
    let mut report = Report::new(format!("verify {}", if level == Level::Quick { "quick" } else { "full" }));
    record(&mut report, "gauss sums", gauss_checks(&[3, 5, 7, 11]));
    record(&mut report, "orbit sums", orbit_checks(&[3, 5, 7], 6));
    run_plan(&mut report, &QUICK, faults, budget);
    if level == Level::Full {
        for plan in &FULL {
            run_plan(&mut report, plan, faults, budget);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_file_parses() {
        let g = Golden::builtin();
        assert_eq!(g.example.len(), 3);
        assert_eq!(g.example[0].enumerator.iter().map(|e| e[1]).sum::<u64>(), 5u64.pow(6) - 1);
    }

    #[test]
    fn diff_reports_each_weight() {
        let wd = WeightDistribution::from_histogram(5, 3124, 6, BTreeMap::from([(2375, 240), (2500, 15224), (2625, 160)]));
        assert!(enumerator_diff(&[[2375, 240], [2500, 15224], [2625, 160]], &wd).is_empty());
        let d = enumerator_diff(&[[2375, 241], [2500, 15224]], &wd);
        assert_eq!(d, vec!["weight 2375: expected 241, got 240".to_string(), "weight 2625: expected 0, got 160".to_string()]);
    }

    #[test]
    fn record_files_outcomes() {
        let mut r = Report::new("t");
        record(&mut r, "ok", Ok(vec![Check::equal("x", 1, 1)]));
        record(&mut r, "big", Err(SuiteError::Budget(BudgetExceeded { what: "w".into(), cost: 10, cap: 1 })));
        assert_eq!(r.status(), crate::report::Status::BudgetExceeded);
        record(&mut r, "bad", Err(SuiteError::Other("boom".into())));
        assert_eq!(r.status(), crate::report::Status::Fail);
    }
}

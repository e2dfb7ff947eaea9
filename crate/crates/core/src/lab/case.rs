
use serde::{Deserialize, Serialize};

use super::checks::*;
use super::{InequalityReport, Refinement, ResultId, TrendReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::HomogeneousIntegrand;
use crate::recipe::{generate, FieldRecipe};
use crate::spectral::{self, EpsProfile};

/// Inequality checks pass when the ratio is at most this.
pub const BOUND_TOL: f64 = 1.02;
/// Relative drift allowed between `N` and `2N`.
pub const DRIFT_TOL: f64 = 0.10;
pub const IDENTITY_TOL: f64 = 0.02;
pub const CR_TOL: f64 = 0.03;
pub const REMARK5_TOL: f64 = 0.03;
pub const SHARPNESS_FRACTION: f64 = 0.85;
pub const NECESSITY_R2: f64 = 0.95;

/// One case of a suite. Which optional fields are required, and which are
/// allowed at all, depends on `result_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityCase {
    pub result_id: ResultId,
    pub n: usize,
    pub box_len: f64,
    pub pts_per_axis: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<FieldRecipe>,
    /// Solenoidal part of `f` for T4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solenoidal: Option<FieldRecipe>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<HomogeneousIntegrand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sep: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_out: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_profile: Option<EpsProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub refine: bool,
    pub probe: bool,
    /// Used for cases without their own seed.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseOutcome {
    Inequality(InequalityReport),
    Trend(TrendReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Gate {
    Pass,
    Fail(String),
    /// Probes and degenerate cases.
    Ungated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub index: usize,
    pub label: Option<String>,
    pub seed: u64,
    pub outcome: CaseOutcome,
    pub gate: Gate,
    pub wall_ms: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Recipe,
    Solenoidal,
    Phi,
    Q,
    Ladder,
    Sep,
    Annulus,
    EpsProfile,
    Calibration,
}

impl InequalityCase {
    pub fn new(result_id: ResultId, n: usize, box_len: f64, pts_per_axis: usize) -> Self {
        Self {
            result_id,
            n,
            box_len,
            pts_per_axis,
            label: None,
            seed: None,
            recipe: None,
            solenoidal: None,
            phi: None,
            q: None,
            ladder: None,
            sep: None,
            r_in: None,
            r_out: None,
            eps_profile: None,
            calibration_seed: None,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.box_len, self.pts_per_axis)
    }

    /// `(required, optional)` parameters.
    fn schema(&self) -> (&'static [Field], &'static [Field]) {
        use Field::*;
        match self.result_id {
            ResultId::T1 => (&[Recipe, Phi, Q], &[]),
            ResultId::T1Necessity => (&[Phi, Q, Ladder], &[Sep]),
            ResultId::T2 | ResultId::Lemma10x | ResultId::P1 => (&[Recipe, Q], &[]),
            ResultId::P2
            | ResultId::T3iii
            | ResultId::T3Identity
            | ResultId::Corollary
            | ResultId::CrIdentity
            | ResultId::CreIdentity
            | ResultId::P4 => (&[Recipe], &[]),
            ResultId::T3i => (&[Recipe], &[Ladder, EpsProfile]),
            ResultId::T3iiSharpness => (&[Ladder, Annulus], &[]),
            ResultId::T4 => (&[Recipe, Solenoidal], &[]),
            ResultId::Remark5 => (&[Recipe], &[Calibration]),
            ResultId::ConjProbe => (&[Phi, Ladder], &[Sep]),
        }
    }

    fn has(&self, f: Field) -> bool {
        match f {
            Field::Recipe => self.recipe.is_some(),
            Field::Solenoidal => self.solenoidal.is_some(),
            Field::Phi => self.phi.is_some(),
            Field::Q => self.q.is_some(),
            Field::Ladder => self.ladder.is_some(),
            Field::Sep => self.sep.is_some(),
            Field::Annulus => self.r_in.is_some() && self.r_out.is_some(),
            Field::EpsProfile => self.eps_profile.is_some(),
            Field::Calibration => self.calibration_seed.is_some(),
        }
    }

    fn any_of(&self, f: Field) -> bool {
        match f {
            Field::Annulus => self.r_in.is_some() || self.r_out.is_some(),
            other => self.has(other),
        }
    }

    /// Rejects missing and superfluous parameters.
    pub fn validate(&self, opts: &RunOptions) -> Result<()> {
        let name = |f: Field| match f {
            Field::Recipe => "recipe",
            Field::Solenoidal => "solenoidal",
            Field::Phi => "phi",
            Field::Q => "q",
            Field::Ladder => "ladder",
            Field::Sep => "sep",
            Field::Annulus => "r_in/r_out",
            Field::EpsProfile => "eps_profile",
            Field::Calibration => "calibration_seed",
        };
        let (required, optional) = self.schema();
        let id = self.result_id;
        if let Some(f) = required.iter().find(|f| !self.has(**f)) {
            return Err(Error::InvalidParameter(format!("{id} requires `{}`", name(*f))));
        }
        let all = [
            Field::Recipe,
            Field::Solenoidal,
            Field::Phi,
            Field::Q,
            Field::Ladder,
            Field::Sep,
            Field::Annulus,
            Field::EpsProfile,
            Field::Calibration,
        ];
        if let Some(f) = all.iter().find(|f| self.any_of(**f) && !required.contains(f) && !optional.contains(f)) {
            return Err(Error::InvalidParameter(format!("{id} does not take `{}`", name(*f))));
        }
        if id == ResultId::T4 && self.n != 3 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        if id == ResultId::ConjProbe && !opts.probe {
            return Err(Error::InvalidParameter(format!("{id} runs only in probe mode")));
        }
        if let Some(l) = &self.ladder {
            if l.len() < 3 {
                return Err(Error::LadderTooShort { min: 3, got: l.len() });
            }
        }
        self.grid()?;
        Ok(())
    }

    fn seeded(&self, r: &FieldRecipe, seed: u64) -> FieldRecipe {
        r.clone().seed(seed)
    }

    fn recipe_for(&self, seed: u64) -> FieldRecipe {
        self.seeded(self.recipe.as_ref().expect("validated"), seed)
    }

    /// Runs the case, at `N` and (with `opts.refine`) at `2N`.
    pub fn run(&self, index: usize, opts: &RunOptions) -> Result<CaseResult> {
        self.validate(opts)?;
        let start = Stopwatch::start();
        let seed = self.seed.unwrap_or(opts.seed);
        let grid = self.grid()?;
        let outcome = match self.result_id {
            ResultId::T1Necessity | ResultId::T3iiSharpness | ResultId::ConjProbe => {
                CaseOutcome::Trend(self.run_trend(&grid)?)
            }
            _ => {
                let mut rep = self.run_on(&grid, seed)?;
                if opts.refine {
                    let fine = self.run_on(&grid.refined()?, seed)?;
                    if let (Some(c), Some(f)) = (rep.ratio, fine.ratio) {
                        let mut out = fine;
                        out.refinement = Some(Refinement { coarse: c, fine: f });
                        rep = out;
                    } else {
                        rep = fine;
                    }
                }
                rep.seed = seed;
                CaseOutcome::Inequality(rep)
            }
        };
        let gate = gate(&outcome);
        Ok(CaseResult {
            index,
            label: self.label.clone(),
            seed,
            outcome,
            gate,
            wall_ms: start.elapsed_ms(),
        })
    }

    fn run_trend(&self, grid: &Grid) -> Result<TrendReport> {
        let ladder = self.ladder.as_deref().expect("validated");
        let sep = self.sep.unwrap_or(grid.padding_radius() * 0.625);
        match self.result_id {
            ResultId::T1Necessity => {
                theorem1_necessity_probe(grid, self.phi.as_ref().expect("validated"), self.q.expect("validated"), ladder, sep)
            }
            ResultId::ConjProbe => conjecture_probe(grid, self.phi.as_ref().expect("validated"), ladder, sep),
            _ => theorem3ii_sharpness(grid, self.r_in.expect("validated"), self.r_out.expect("validated"), ladder),
        }
    }

    fn run_on(&self, grid: &Grid, seed: u64) -> Result<InequalityReport> {
        let field = || generate(&self.recipe_for(seed), grid);
        let vector = || field()?.into_vector();
        let scalar = || field()?.into_scalar();
        // projection is idempotent, so already solenoidal recipes pass through
        let solenoidal = || spectral::leray_project(&vector()?);
        match self.result_id {
            ResultId::T1 => theorem1_check(&scalar()?, self.phi.as_ref().expect("validated"), self.q.expect("validated")),
            ResultId::T2 => theorem2_check(&solenoidal()?, self.q.expect("validated")),
            ResultId::Lemma10x => lemma10x_check(&solenoidal()?, self.q.expect("validated")),
            ResultId::P1 => prop1_check(&vector()?, self.q.expect("validated")),
            ResultId::P2 => prop2_check(&vector()?),
            ResultId::T3i => {
                let g = vector()?;
                let ladder = self.ladder.clone().unwrap_or_else(|| default_eps_ladder(grid));
                theorem3i_limit_check(&g, &ladder, self.eps_profile.unwrap_or_default())
            }
            ResultId::T3iii => theorem3iii_check(&vector()?),
            ResultId::T3Identity => theorem3_identity_check(&vector()?),
            ResultId::Corollary => corollary_check(&scalar()?),
            ResultId::CrIdentity => cr_identity_check(&vector()?),
            ResultId::CreIdentity => cre_identity_check(&scalar()?),
            ResultId::P4 => prop4_check(&vector()?),
            ResultId::T4 => {
                let g = vector()?;
                let s = generate(&self.seeded(self.solenoidal.as_ref().expect("validated"), seed.wrapping_add(1)), grid)?
                    .into_vector()?;
                theorem4_check(&theorem4_triple(&g, &spectral::leray_project(&s)?)?)
            }
            ResultId::Remark5 => {
                let cal_seed = self.calibration_seed.unwrap_or(seed.wrapping_add(1000));
                let cal = generate(&self.recipe_for(cal_seed), grid)?.into_vector()?;
                let c = remark5_calibrate(&cal)?;
                remark5_check(&vector()?, c)
            }
            ResultId::T1Necessity | ResultId::T3iiSharpness | ResultId::ConjProbe => unreachable!("trend cases"),
        }
    }
}

/// Pass/fail rule for one outcome.
pub fn gate(outcome: &CaseOutcome) -> Gate {
    match outcome {
        CaseOutcome::Inequality(r) => gate_report(r),
        CaseOutcome::Trend(t) => gate_trend(t),
    }
}

fn gate_report(r: &InequalityReport) -> Gate {
    if r.degenerate {
        return Gate::Ungated;
    }
    let Some(ratio) = r.ratio else { return Gate::Ungated };
    if !ratio.is_finite() {
        return Gate::Fail(format!("non-finite ratio {ratio}"));
    }
    let within = |key: &str, tol: f64| match r.extra(key) {
        Some(v) if v < tol => Gate::Pass,
        Some(v) => Gate::Fail(format!("{key} = {v:.3e} exceeds {tol}")),
        None => Gate::Fail(format!("missing {key}")),
    };
    match r.result_id {
        ResultId::T3Identity => match r.extra("scaled_diff") {
            Some(_) => within("scaled_diff", IDENTITY_TOL),
            None => within("rel_diff", IDENTITY_TOL),
        },
        ResultId::CrIdentity | ResultId::CreIdentity => within("rel_l2_diff", CR_TOL),
        ResultId::Remark5 => within("rel_diff", REMARK5_TOL),
        ResultId::T3iii | ResultId::Corollary | ResultId::P4 | ResultId::T4 | ResultId::T3i => {
            if ratio <= BOUND_TOL {
                Gate::Pass
            } else {
                Gate::Fail(format!("ratio {ratio:.6} above {BOUND_TOL}"))
            }
        }
        _ => match r.refinement {
            Some(rf) if rf.drift() >= DRIFT_TOL => {
                Gate::Fail(format!("ratio drifts {:.1}% from N to 2N", 100.0 * rf.drift()))
            }
            _ => Gate::Pass,
        },
    }
}

fn gate_trend(t: &TrendReport) -> Gate {
    let arm = &t.arms[0];
    match t.result_id {
        ResultId::T1Necessity => {
            let r2 = t.log_fit.map(|f| f.r_squared).unwrap_or(0.0);
            if !arm.strictly_increasing() {
                Gate::Fail("ratios not strictly increasing".into())
            } else if r2 <= NECESSITY_R2 {
                Gate::Fail(format!("log fit R^2 = {r2:.4}"))
            } else {
                Gate::Pass
            }
        }
        ResultId::T3iiSharpness => {
            let target = t.target.unwrap_or(f64::NAN);
            let best = arm.values.last().copied().unwrap_or(0.0);
            if !arm.strictly_increasing() {
                Gate::Fail("ratios not increasing along the ladder".into())
            } else if best < SHARPNESS_FRACTION * target {
                Gate::Fail(format!("best ratio {:.4} of target", best / target))
            } else {
                Gate::Pass
            }
        }
        _ => Gate::Ungated,
    }
}

/// Runs cases on `jobs` worker threads; results come back in case order.
pub fn run_suite(cases: &[InequalityCase], opts: &RunOptions, jobs: usize) -> Vec<Result<CaseResult>> {
    let jobs = jobs.max(1).min(cases.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<CaseResult>>> = (0..cases.len()).map(|_| None).collect();
    let done = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= cases.len() {
                    break;
                }
                let r = cases[i].run(i, opts);
                done.lock().expect("worker panicked").push((i, r));
            });
        }
    });
    for (i, r) in done.into_inner().expect("worker panicked") {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|r| r.expect("every case ran")).collect()
}

/// Column order of the aggregate CSV.
pub const CSV_HEADER: &str = "result_id,n,N,q_or_l,lhs,rhs,ratio,constant,seed,wall_ms";

/// C-style `%.{sig}g`.
pub fn format_g(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_g(v: Option<f64>) -> String {
    v.map(|x| format_g(x, 12)).unwrap_or_default()
}

impl CaseResult {
    /// CSV lines (without header); trends give one line per ladder entry
    /// with the ladder value in the `q_or_l` column.
    pub fn csv_rows(&self) -> Vec<String> {
        match &self.outcome {
            CaseOutcome::Inequality(r) => vec![format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.result_id,
                r.n,
                r.pts_per_axis,
                opt_g(r.q_or_l),
                format_g(r.lhs, 12),
                format_g(r.rhs, 12),
                opt_g(r.ratio),
                opt_g(r.constant),
                self.seed,
                self.wall_ms
            )],
            CaseOutcome::Trend(t) => {
                let arm = &t.arms[0];
                (0..arm.params.len())
                    .map(|k| {
                        format!(
                            "{},{},{},{},{},{},{},{},{},{}",
                            t.result_id,
                            t.n,
                            t.pts_per_axis,
                            format_g(arm.params[k], 12),
                            format_g(arm.lhs[k], 12),
                            format_g(arm.rhs[k], 12),
                            format_g(arm.values[k], 12),
                            opt_g(t.target),
                            self.seed,
                            self.wall_ms
                        )
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_g_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.1, "0.1"),
            (123456.789, "123456.789"),
            (1e-5, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (-2.5e12, "-2.5e+12"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0 * 1e-3, "0.000666666666667"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.079577471545947673, "0.0795774715459"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x, 12), want, "{x}");
        }
    }

    #[test]
    fn schema_rejects_mismatches() {
        let opts = RunOptions::default();
        let mut c = InequalityCase::new(ResultId::T3iii, 2, 16.0, 64);
        assert!(c.validate(&opts).is_err());
        c.recipe = Some(FieldRecipe::new(crate::RecipeKind::RandomBumps));
        assert!(c.validate(&opts).is_ok());
        c.q = Some(1.0);
        assert!(c.validate(&opts).is_err());
        let mut t4 = InequalityCase::new(ResultId::T4, 2, 16.0, 64);
        t4.recipe = c.recipe.clone();
        t4.solenoidal = c.recipe.clone();
        assert_eq!(t4.validate(&opts), Err(Error::UnsupportedDimension(2)));
        let mut probe = InequalityCase::new(ResultId::ConjProbe, 2, 6.4, 128);
        probe.phi = Some(HomogeneousIntegrand::QuadraticForm { coeffs: vec![1.0, 0.0, 0.0, -1.0] });
        probe.ladder = Some(vec![0.4, 0.2, 0.1]);
        assert!(probe.validate(&opts).is_err());
        assert!(probe.validate(&RunOptions { probe: true, ..opts }).is_ok());
    }
}

/// Wall clock for reports. There is no monotonic clock on wasm32, so the
/// browser build reports zero.
struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    fn start() -> Self {
        Self(std::time::Instant::now())
    }

    #[cfg(target_arch = "wasm32")]
    fn start() -> Self {
        Self()
    }

    #[cfg(not(target_arch = "wasm32"))]
    fn elapsed_ms(&self) -> u64 {
        self.0.elapsed().as_millis() as u64
    }

    #[cfg(target_arch = "wasm32")]
    fn elapsed_ms(&self) -> u64 {
        0
    }
}

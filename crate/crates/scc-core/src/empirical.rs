//! Estimation layer: stratified count data, risk-ratio coefficients with
//! delta-method covariances, and the empirical interaction contrasts.
//!
//! Confounder adjustment is by exhaustive stratification: every stratum
//! is tested separately and never pooled, since the underlying conditions
//! are existential over strata. Case-control data is analysed on the
//! risk-ratio scale under a declared rare-outcome assumption, with odds
//! ratios against the all-zero reference cell.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::{compose_assignment, PartialAssignment};
use crate::outcome::LiteralSet;
use crate::trees::{CoefficientVector, LiteralTree};

/// 97.5% standard normal quantile, for two-sided 95% intervals.
const Z_975: f64 = 1.959963984540054;

/// Study design of a counts file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    Cohort,
    CaseControl,
}

impl Design {
    pub fn label(&self) -> &'static str {
        match self {
            Design::Cohort => "cohort",
            Design::CaseControl => "case-control",
        }
    }
}

/// One observed cell: events/total for cohort data, cases/controls for
/// case-control data. Counts are f64 so a continuity correction can be
/// applied uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCount {
    pub events: f64,
    pub denom: f64,
}

/// Observed stratified count data over k binary exposures.
#[derive(Debug, Clone)]
pub struct StratifiedCounts {
    k: usize,
    exposure_names: Vec<String>,
    stratum_columns: Vec<String>,
    design: Design,
    cells: BTreeMap<String, BTreeMap<usize, CellCount>>,
}

impl StratifiedCounts {
    pub fn new(
        k: usize,
        exposure_names: Vec<String>,
        stratum_columns: Vec<String>,
        design: Design,
    ) -> Result<Self> {
        if exposure_names.len() != k {
            return Err(Error::contract("exposure name count must equal k"));
        }
        Ok(StratifiedCounts {
            k,
            exposure_names,
            stratum_columns,
            design,
            cells: BTreeMap::new(),
        })
    }

    pub fn insert_cell(
        &mut self,
        stratum: String,
        assignment: usize,
        events: f64,
        denom: f64,
    ) -> Result<()> {
        if assignment >= 1 << self.k {
            return Err(Error::contract(format!(
                "assignment index {assignment} out of range for k={}",
                self.k
            )));
        }
        if events < 0.0 || denom < 0.0 {
            return Err(Error::contract("counts must be nonnegative"));
        }
        let entry = self.cells.entry(stratum.clone()).or_default();
        if entry.insert(assignment, CellCount { events, denom }).is_some() {
            return Err(Error::contract(format!(
                "duplicate cell: stratum {stratum}, assignment index {assignment}"
            )));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn design(&self) -> Design {
        self.design
    }

    pub fn exposure_names(&self) -> &[String] {
        &self.exposure_names
    }

    pub fn stratum_columns(&self) -> &[String] {
        &self.stratum_columns
    }

    /// Stratum labels in canonical (sorted) order.
    pub fn strata(&self) -> Vec<String> {
        self.cells.keys().cloned().collect()
    }

    pub fn cell(&self, stratum: &str, assignment: usize) -> Option<CellCount> {
        self.cells.get(stratum).and_then(|m| m.get(&assignment)).copied()
    }

    fn stratum_cells(&self, stratum: &str) -> Result<&BTreeMap<usize, CellCount>> {
        self.cells.get(stratum).ok_or_else(|| Error::MissingCell {
            stratum: stratum.to_string(),
            assignment: "*".to_string(),
        })
    }

    fn assignment_label(&self, assignment: usize) -> String {
        (0..self.k)
            .map(|j| if assignment >> (self.k - 1 - j) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    fn require_cell(&self, stratum: &str, assignment: usize) -> Result<CellCount> {
        self.cell(stratum, assignment).ok_or_else(|| Error::MissingCell {
            stratum: stratum.to_string(),
            assignment: self.assignment_label(assignment),
        })
    }
}

/// A cohort cell mean with its binomial variance; `small_sample` flags
/// degenerate 0/1 means whose plug-in variance collapses to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMean {
    pub mean: f64,
    pub variance: f64,
    pub small_sample: bool,
}

/// Per-assignment outcome means for one cohort stratum. Means are never
/// pooled across strata.
pub fn cell_means(d: &StratifiedCounts, stratum: &str) -> Result<BTreeMap<usize, CellMean>> {
    if d.design() != Design::Cohort {
        return Err(Error::WrongDesign {
            expected: "cohort",
            got: d.design().label(),
        });
    }
    let mut out = BTreeMap::new();
    for (&assignment, cell) in d.stratum_cells(stratum)? {
        if cell.denom <= 0.0 {
            return Err(Error::MissingCell {
                stratum: stratum.to_string(),
                assignment: d.assignment_label(assignment),
            });
        }
        let mean = cell.events / cell.denom;
        out.insert(
            assignment,
            CellMean {
                mean,
                variance: mean * (1.0 - mean) / cell.denom,
                small_sample: cell.events == 0.0 || cell.events == cell.denom,
            },
        );
    }
    Ok(out)
}

/// Which scale a coefficient set lives on: risk ratios against the
/// reference cell (case-control) or raw outcome means (cohort).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefScale {
    RiskRatio,
    Mean,
}

/// Saturated-model coefficients over the subset lattice of the exposures,
/// with a dense covariance matrix.
///
/// Entries are indexed by the assignment index of the subset's indicator
/// (the assignment setting exactly that subset to 1), so index 0 is the
/// intercept: the constant 1 on the risk-ratio scale, the reference-cell
/// mean on the mean scale.
#[derive(Debug, Clone)]
pub struct ThetaCoefficients {
    k: usize,
    scale: CoefScale,
    values: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

impl ThetaCoefficients {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scale(&self) -> CoefScale {
        self.scale
    }

    /// Coefficient for the subset encoded by `index` (intercept at 0).
    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn covariance(&self) -> &[Vec<f64>] {
        &self.covariance
    }

    /// Reconstructs the risk ratio (or mean) for an assignment from the
    /// coefficients: the sum over subsets of the assignment's positive
    /// variables.
    pub fn reconstruct(&self, assignment: usize) -> f64 {
        let mut total = 0.0;
        let mut sub = assignment;
        loop {
            total += self.values[sub];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & assignment;
        }
        total
    }
}

fn mobius_sign(superset: usize, subset: usize) -> f64 {
    if (superset.count_ones() - subset.count_ones()).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Risk-ratio coefficients from one case-control stratum.
///
/// Odds ratios are taken against the all-zero reference cell and Möbius-
/// inverted into the saturated risk-ratio model (implicit intercept 1).
/// The covariance comes from the delta method on log odds ratios, whose
/// correlations share the reference-cell term. Zero cells are an error
/// unless a continuity correction is supplied, in which case it is added
/// to every count of the affected stratum.
#[allow(clippy::needless_range_loop)] // lattice masks are the semantics
pub fn theta_from_case_control(
    d: &StratifiedCounts,
    stratum: &str,
    continuity: Option<f64>,
) -> Result<ThetaCoefficients> {
    if d.design() != Design::CaseControl {
        return Err(Error::WrongDesign {
            expected: "case-control",
            got: d.design().label(),
        });
    }
    let k = d.k();
    let cells_n = 1usize << k;
    let mut cases = Vec::with_capacity(cells_n);
    let mut controls = Vec::with_capacity(cells_n);
    for idx in 0..cells_n {
        let cell = d.require_cell(stratum, idx)?;
        cases.push(cell.events);
        controls.push(cell.denom);
    }
    let any_zero = cases.iter().chain(controls.iter()).any(|&x| x == 0.0);
    if any_zero {
        match continuity {
            Some(delta) => {
                for x in cases.iter_mut().chain(controls.iter_mut()) {
                    *x += delta;
                }
            }
            None => {
                let idx = (0..cells_n)
                    .find(|&i| cases[i] == 0.0 || controls[i] == 0.0)
                    .expect("a zero cell exists");
                return Err(Error::ZeroCell {
                    stratum: stratum.to_string(),
                    assignment: d.assignment_label(idx),
                });
            }
        }
    }

    let ref_ratio = cases[0] / controls[0];
    let shared = 1.0 / cases[0] + 1.0 / controls[0];
    let mut ratios = vec![0.0; cells_n];
    ratios[0] = 1.0;
    for idx in 1..cells_n {
        ratios[idx] = (cases[idx] / controls[idx]) / ref_ratio;
    }

    // Covariance of the odds ratios (reference row/column are zero: the
    // reference ratio is identically 1).
    let mut cov_r = vec![vec![0.0; cells_n]; cells_n];
    for i in 1..cells_n {
        for j in 1..cells_n {
            let log_cov = if i == j {
                1.0 / cases[i] + 1.0 / controls[i] + shared
            } else {
                shared
            };
            cov_r[i][j] = ratios[i] * ratios[j] * log_cov;
        }
    }

    // Möbius inversion of the ratios into coefficients, and the matching
    // congruence transform of the covariance.
    let mut values = vec![0.0; cells_n];
    for set in 0..cells_n {
        let mut total = 0.0;
        let mut sub = set;
        loop {
            total += mobius_sign(set, sub) * ratios[sub];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & set;
        }
        values[set] = total;
    }
    // Upper triangle only, mirrored, so the matrix is exactly symmetric
    // despite floating summation order.
    let mut covariance = vec![vec![0.0; cells_n]; cells_n];
    for set_a in 1..cells_n {
        for set_b in set_a..cells_n {
            let mut acc = 0.0;
            let mut sub_a = set_a;
            loop {
                if sub_a != 0 {
                    let sign_a = mobius_sign(set_a, sub_a);
                    let mut sub_b = set_b;
                    loop {
                        if sub_b != 0 {
                            acc += sign_a * mobius_sign(set_b, sub_b) * cov_r[sub_a][sub_b];
                        }
                        if sub_b == 0 {
                            break;
                        }
                        sub_b = (sub_b - 1) & set_b;
                    }
                }
                if sub_a == 0 {
                    break;
                }
                sub_a = (sub_a - 1) & set_a;
            }
            covariance[set_a][set_b] = acc;
            covariance[set_b][set_a] = acc;
        }
    }

    Ok(ThetaCoefficients {
        k,
        scale: CoefScale::RiskRatio,
        values,
        covariance,
    })
}

/// Mean-scale coefficients from one cohort stratum: the Möbius transform
/// of the cell means, with independent binomial cell variances pushed
/// through the same transform. All 2^k cells must be present.
#[allow(clippy::needless_range_loop)] // lattice masks are the semantics
pub fn beta_from_cohort(d: &StratifiedCounts, stratum: &str) -> Result<ThetaCoefficients> {
    let k = d.k();
    let cells_n = 1usize << k;
    let means = cell_means(d, stratum)?;
    for idx in 0..cells_n {
        if !means.contains_key(&idx) {
            return Err(Error::MissingCell {
                stratum: stratum.to_string(),
                assignment: d.assignment_label(idx),
            });
        }
    }
    let mut values = vec![0.0; cells_n];
    let mut covariance = vec![vec![0.0; cells_n]; cells_n];
    for set in 0..cells_n {
        let mut total = 0.0;
        let mut sub = set;
        loop {
            total += mobius_sign(set, sub) * means[&sub].mean;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & set;
        }
        values[set] = total;
    }
    for set_a in 0..cells_n {
        for set_b in 0..cells_n {
            // Independent cells: covariance is the sum over shared cells.
            let mut acc = 0.0;
            let common = set_a & set_b;
            let mut sub = common;
            loop {
                if sub & set_a == sub && sub & set_b == sub {
                    acc += mobius_sign(set_a, sub) * mobius_sign(set_b, sub) * means[&sub].variance;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & common;
            }
            covariance[set_a][set_b] = acc;
        }
    }
    Ok(ThetaCoefficients {
        k,
        scale: CoefScale::Mean,
        values,
        covariance,
    })
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erf
/// approximation (absolute error below 1.5e-7).
pub fn normal_cdf(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    let (sign, z) = if z < 0.0 { (-1.0, -z) } else { (1.0, z) };
    let t = 1.0 / (1.0 + 0.3275911 * z);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erf = 1.0 - poly * (-z * z).exp();
    0.5 * (1.0 + sign * erf)
}

/// One empirical test condition: estimate, delta-method standard error,
/// 95% normal interval and a one-sided p-value for H0: contrast <= 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastResult {
    pub condition_id: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub positive: bool,
    pub p_one_sided: f64,
    pub assumptions: Vec<String>,
    pub warnings: Vec<String>,
}

impl ContrastResult {
    fn from_estimate(
        condition_id: String,
        estimate: f64,
        variance: f64,
        assumptions: Vec<String>,
        warnings: Vec<String>,
    ) -> Self {
        let std_error = variance.max(0.0).sqrt();
        let p_one_sided = if std_error > 0.0 {
            1.0 - normal_cdf(estimate / std_error)
        } else if estimate > 0.0 {
            0.0
        } else {
            1.0
        };
        ContrastResult {
            condition_id,
            estimate,
            std_error,
            ci_low: estimate - Z_975 * std_error,
            ci_high: estimate + Z_975 * std_error,
            positive: estimate > 0.0,
            p_one_sided,
            assumptions,
            warnings,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ContrastKind {
    Irreducibility,
    Singularity,
}

/// The conditioning cells and signs making up a contrast, as
/// (assignment index, coefficient) pairs.
fn contrast_cells(
    k: usize,
    b: &LiteralSet,
    bplus: &LiteralSet,
    tree: &LiteralTree,
    c2: &PartialAssignment,
    kind: ContrastKind,
) -> Result<Vec<(usize, f64)>> {
    if !bplus.is_subset_of(b) {
        return Err(Error::contract("bplus must be a subset of b"));
    }
    if tree.vertices() != bplus.literals() {
        return Err(Error::contract("tree must span exactly the literals of bplus"));
    }
    let covered: Vec<usize> = b.vars().into_iter().chain(c2.vars()).collect();
    {
        let mut sorted = covered.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != covered.len() || sorted.len() != k {
            return Err(Error::contract(
                "b and the context must cover every exposure exactly once",
            ));
        }
    }

    let assign = |zeroed: &[crate::outcome::Literal]| -> Result<usize> {
        let mut parts: Vec<(usize, bool)> = Vec::with_capacity(k);
        for lit in b.literals() {
            if zeroed.contains(lit) {
                parts.push((lit.var, lit.negated));
            } else {
                parts.push((lit.var, !lit.negated));
            }
        }
        parts.extend_from_slice(c2.pairs());
        Ok(compose_assignment(k, &parts)?.index())
    };

    let mut cells = vec![(assign(&[])?, 1.0)];
    match kind {
        ContrastKind::Irreducibility => {
            for lit in b.literals() {
                cells.push((assign(&[*lit])?, -1.0));
            }
        }
        ContrastKind::Singularity => {
            for lit in bplus.literals() {
                cells.push((assign(&[*lit])?, -1.0));
            }
            let bprime: Vec<_> = b
                .literals()
                .iter()
                .copied()
                .filter(|l| !bplus.contains(l))
                .collect();
            for mask in 1..1usize << bprime.len() {
                let zeroed: Vec<_> = bprime
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, l)| *l)
                    .collect();
                cells.push((assign(&zeroed)?, -1.0));
            }
        }
    }
    for (a, b_lit) in tree.edge_literals() {
        cells.push((assign(&[a, b_lit])?, 1.0));
    }
    Ok(cells)
}

fn cohort_estimate(
    d: &StratifiedCounts,
    stratum: &str,
    cells: &[(usize, f64)],
) -> Result<(f64, f64, Vec<String>)> {
    let mut estimate = 0.0;
    let mut variance = 0.0;
    let mut warnings = Vec::new();
    for &(idx, coeff) in cells {
        let cell = d.require_cell(stratum, idx)?;
        if cell.denom <= 0.0 {
            return Err(Error::MissingCell {
                stratum: stratum.to_string(),
                assignment: d.assignment_label(idx),
            });
        }
        let mean = cell.events / cell.denom;
        estimate += coeff * mean;
        variance += coeff * coeff * mean * (1.0 - mean) / cell.denom;
        if cell.events == 0.0 || cell.events == cell.denom {
            warnings.push(format!(
                "degenerate mean in cell {} (plug-in variance is zero)",
                d.assignment_label(idx)
            ));
        }
    }
    Ok((estimate, variance, warnings))
}

/// Expands conditioning cells into a coefficient vector over the subset
/// lattice: each cell mean is the sum of coefficients over the subsets of
/// its positive variables.
fn cells_to_lattice(k: usize, cells: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; 1 << k];
    for &(idx, coeff) in cells {
        let mut sub = idx;
        loop {
            v[sub] += coeff;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & idx;
        }
    }
    v
}

fn theta_estimate(theta: &ThetaCoefficients, lattice: &[f64]) -> (f64, f64) {
    let estimate: f64 = lattice
        .iter()
        .zip(theta.values())
        .map(|(v, t)| v * t)
        .sum();
    let mut variance = 0.0;
    for (i, vi) in lattice.iter().enumerate() {
        if *vi == 0.0 {
            continue;
        }
        for (j, vj) in lattice.iter().enumerate() {
            if *vj != 0.0 {
                variance += vi * vj * theta.covariance()[i][j];
            }
        }
    }
    (estimate, variance)
}

fn check_case_control_context(c2: &PartialAssignment) -> Result<()> {
    if c2.pairs().iter().any(|&(_, v)| v) {
        return Err(Error::Unsupported(
            "case-control contrasts support only an absent or all-zero context".to_string(),
        ));
    }
    Ok(())
}

fn base_assumptions(d: &StratifiedCounts, bplus: &LiteralSet) -> Vec<String> {
    let mut a = vec!["strata suffice to adjust for confounding".to_string()];
    if !bplus.is_empty() {
        a.push(format!(
            "positive monotonicity of {bplus} (declared; not verifiable from data)"
        ));
    }
    if d.design() == Design::CaseControl {
        a.push("rare outcome: odds ratios approximate risk ratios".to_string());
    }
    a
}

/// The irreducibility contrast at one stratum and context: the leave-one-
/// out contrast plus tree terms for the declared-monotone part. Cohort
/// data uses cell means directly; case-control data evaluates the same
/// linear functional on the risk-ratio scale.
pub fn irreducibility_contrast(
    d: &StratifiedCounts,
    b: &LiteralSet,
    bplus: &LiteralSet,
    tree: &LiteralTree,
    c2: &PartialAssignment,
    stratum: &str,
    continuity: Option<f64>,
) -> Result<ContrastResult> {
    let cells = contrast_cells(d.k(), b, bplus, tree, c2, ContrastKind::Irreducibility)?;
    let condition_id = format!(
        "irreducible|b={b}|bplus={bplus}|tree={tree}|c2={}|stratum={stratum}",
        c2.label()
    );
    let assumptions = base_assumptions(d, bplus);
    match d.design() {
        Design::Cohort => {
            let (estimate, variance, warnings) = cohort_estimate(d, stratum, &cells)?;
            Ok(ContrastResult::from_estimate(
                condition_id,
                estimate,
                variance,
                assumptions,
                warnings,
            ))
        }
        Design::CaseControl => {
            check_case_control_context(c2)?;
            let theta = theta_from_case_control(d, stratum, continuity)?;
            let lattice = cells_to_lattice(d.k(), &cells);
            let (estimate, variance) = theta_estimate(&theta, &lattice);
            Ok(ContrastResult::from_estimate(
                condition_id,
                estimate,
                variance,
                assumptions,
                Vec::new(),
            ))
        }
    }
}

/// The singularity contrast for a full-width conjunction: leave-one-out
/// over the monotone part, all nonempty zeroed subsets of the remainder,
/// plus tree terms.
pub fn singularity_contrast(
    d: &StratifiedCounts,
    b: &LiteralSet,
    bplus: &LiteralSet,
    tree: &LiteralTree,
    stratum: &str,
    continuity: Option<f64>,
) -> Result<ContrastResult> {
    if b.len() != d.k() {
        return Err(Error::contract("singularity contrast requires |b| = k"));
    }
    let empty = PartialAssignment::empty();
    let cells = contrast_cells(d.k(), b, bplus, tree, &empty, ContrastKind::Singularity)?;
    let condition_id = format!("singular|b={b}|bplus={bplus}|tree={tree}|stratum={stratum}");
    let assumptions = base_assumptions(d, bplus);
    match d.design() {
        Design::Cohort => {
            let (estimate, variance, warnings) = cohort_estimate(d, stratum, &cells)?;
            Ok(ContrastResult::from_estimate(
                condition_id,
                estimate,
                variance,
                assumptions,
                warnings,
            ))
        }
        Design::CaseControl => {
            let theta = theta_from_case_control(d, stratum, continuity)?;
            let lattice = cells_to_lattice(d.k(), &cells);
            let (estimate, variance) = theta_estimate(&theta, &lattice);
            Ok(ContrastResult::from_estimate(
                condition_id,
                estimate,
                variance,
                assumptions,
                Vec::new(),
            ))
        }
    }
}

/// The minimal-sufficient-cause contrast: the irreducibility contrast
/// evaluated at the all-zero context, under declared positive
/// monotonicity of the context variables. A positive result upgrades the
/// claim to a minimal sufficient cause for some individual.
pub fn msc_contrast(
    d: &StratifiedCounts,
    b: &LiteralSet,
    bplus: &LiteralSet,
    tree: &LiteralTree,
    stratum: &str,
    continuity: Option<f64>,
) -> Result<ContrastResult> {
    let c2_vars: Vec<usize> = (0..d.k()).filter(|v| !b.covers_var(*v)).collect();
    let zero = PartialAssignment::new(c2_vars.iter().map(|&v| (v, false)).collect())?;
    let mut result = irreducibility_contrast(d, b, bplus, tree, &zero, stratum, continuity)?;
    result.condition_id = result.condition_id.replace("irreducible|", "msc|");
    if !c2_vars.is_empty() {
        let names: Vec<String> = c2_vars.iter().map(|v| format!("X{}", v + 1)).collect();
        result.assumptions.push(format!(
            "positive monotonicity of context variables {} (declared)",
            names.join(",")
        ));
    }
    Ok(result)
}

/// Evaluates an integer coefficient vector against fitted coefficients:
/// estimate = sum m_S * coef_S (the intercept applies to index 0) and
/// variance by the quadratic form in the coefficient covariance.
///
/// The coefficient vector's conjunction must be the all-positive full set
/// so its subset lattice matches the fitted lattice.
pub fn linear_constraint_eval(
    theta: &ThetaCoefficients,
    m: &CoefficientVector,
) -> Result<ContrastResult> {
    let b = m.b();
    if b.len() != theta.k() || b.literals().iter().any(|l| l.negated) {
        return Err(Error::contract(
            "coefficient vector must be over the all-positive full-width conjunction",
        ));
    }
    // Positions in b are sorted by variable, so the subset mask over b
    // maps to the assignment index by reversing bit order.
    let k = theta.k();
    let mut lattice = vec![0.0; 1 << k];
    for mask in 0..1usize << k {
        let mut idx = 0usize;
        for (i, lit) in b.literals().iter().enumerate() {
            if mask >> i & 1 == 1 {
                idx |= 1 << (k - 1 - lit.var);
            }
        }
        lattice[idx] += m.get(mask) as f64;
    }
    let (estimate, variance) = theta_estimate(theta, &lattice);
    let condition_id = format!("linear-constraint|{}|scale={:?}", m.inequality(), theta.scale());
    Ok(ContrastResult::from_estimate(
        condition_id,
        estimate,
        variance,
        Vec::new(),
        Vec::new(),
    ))
}

/// Parametric-bootstrap cross-check of a case-control contrast's
/// standard error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub se: f64,
    pub resamples_used: usize,
    pub resamples_skipped: usize,
}

fn multinomial<R: Rng>(rng: &mut R, total: u64, probs: &[f64]) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = total;
    let mut prob_left = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            out[i] = remaining;
            break;
        }
        let q = (p / prob_left).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .expect("valid binomial parameters")
            .sample(rng);
        out[i] = draw;
        remaining -= draw;
        prob_left -= p;
    }
    out
}

/// Parametric bootstrap for the delta-method SE of a case-control
/// irreducibility/singularity contrast: cases and controls are resampled
/// as multinomials at their observed totals, the log odds-ratio
/// covariance is estimated from the resamples, and that covariance is
/// pushed through the same linearization as the analytic SE. Resamples
/// containing an empty cell are skipped and counted.
#[allow(clippy::needless_range_loop)] // covariance indices are the semantics
pub fn bootstrap_contrast_se(
    d: &StratifiedCounts,
    b: &LiteralSet,
    bplus: &LiteralSet,
    tree: &LiteralTree,
    stratum: &str,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapSummary> {
    if d.design() != Design::CaseControl {
        return Err(Error::Unsupported(
            "the bootstrap cross-check applies to case-control data".to_string(),
        ));
    }
    let k = d.k();
    let cells_n = 1usize << k;
    let mut cases = Vec::with_capacity(cells_n);
    let mut controls = Vec::with_capacity(cells_n);
    for idx in 0..cells_n {
        let cell = d.require_cell(stratum, idx)?;
        if cell.events == 0.0 || cell.denom == 0.0 {
            return Err(Error::ZeroCell {
                stratum: stratum.to_string(),
                assignment: d.assignment_label(idx),
            });
        }
        cases.push(cell.events);
        controls.push(cell.denom);
    }
    let total_cases: f64 = cases.iter().sum();
    let total_controls: f64 = controls.iter().sum();
    let p_cases: Vec<f64> = cases.iter().map(|&a| a / total_cases).collect();
    let p_controls: Vec<f64> = controls.iter().map(|&b| b / total_controls).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_ratios: Vec<Vec<f64>> = Vec::with_capacity(resamples);
    let mut skipped = 0usize;
    for _ in 0..resamples {
        let a = multinomial(&mut rng, total_cases.round() as u64, &p_cases);
        let c = multinomial(&mut rng, total_controls.round() as u64, &p_controls);
        if a.contains(&0) || c.contains(&0) {
            skipped += 1;
            continue;
        }
        let ref_ratio = a[0] as f64 / c[0] as f64;
        let row: Vec<f64> = (1..cells_n)
            .map(|i| ((a[i] as f64 / c[i] as f64) / ref_ratio).ln())
            .collect();
        log_ratios.push(row);
    }
    let used = log_ratios.len();
    if used < 2 {
        return Err(Error::Internal("bootstrap produced fewer than 2 usable resamples".to_string()));
    }

    // Sample covariance of the log odds ratios.
    let dim = cells_n - 1;
    let mut mean = vec![0.0; dim];
    for row in &log_ratios {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= used as f64;
    }
    let mut cov_log = vec![vec![0.0; dim]; dim];
    for row in &log_ratios {
        for i in 0..dim {
            for j in 0..dim {
                cov_log[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
            }
        }
    }
    for row in &mut cov_log {
        for v in row.iter_mut() {
            *v /= (used - 1) as f64;
        }
    }

    // Delta-transform at the observed ratios, then the same Möbius and
    // lattice steps as the analytic path.
    let ref_ratio = cases[0] / controls[0];
    let ratios: Vec<f64> = (0..cells_n)
        .map(|i| if i == 0 { 1.0 } else { (cases[i] / controls[i]) / ref_ratio })
        .collect();
    let mut cov_r = vec![vec![0.0; cells_n]; cells_n];
    for i in 1..cells_n {
        for j in 1..cells_n {
            cov_r[i][j] = ratios[i] * ratios[j] * cov_log[i - 1][j - 1];
        }
    }
    // The contrast is linear in the ratio cells, so its variance is the
    // quadratic form of the cell coefficients in the ratio covariance.
    let empty = PartialAssignment::empty();
    let cells = contrast_cells(k, b, bplus, tree, &empty, ContrastKind::Irreducibility)?;
    let mut variance = 0.0;
    for &(ci, wi) in &cells {
        for &(cj, wj) in &cells {
            if ci != 0 && cj != 0 {
                variance += wi * wj * cov_r[ci][cj];
            }
        }
    }
    Ok(BootstrapSummary {
        se: variance.max(0.0).sqrt(),
        resamples_used: used,
        resamples_skipped: skipped,
    })
}

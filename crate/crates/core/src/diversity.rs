//! Tabulated diversities, their axioms, induced metrics, and distortion.
//!
//! A diversity assigns a nonnegative value to every finite subset of a ground
//! set, vanishing on the empty set and singletons, and satisfying the
//! triangle inequality `δ(A∪B) + δ(B∪C) ≥ δ(A∪C)` for nonempty `B`. We allow
//! `δ(A) = 0` for larger sets as well (values routinely come out of LPs that
//! drive some entries to zero); strict positivity is an opt-in check.

use thiserror::Error;

use crate::ground::{GroundSet, Subset};

/// Default absolute tolerance for axiom checks. Tables frequently come from
/// floating-point LP solves, so exact comparisons are too brittle.
pub const EPS_DIV: f64 = 1e-9;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DiversityError {
    #[error("table has {got} entries, expected 2^{n} = {expected}")]
    WrongTableLength { got: usize, expected: usize, n: usize },
    #[error("table entry for {0:?} is not a finite number")]
    NonFinite(Subset),
    #[error("metric matrix is {got}x{got2}, expected {n}x{n}")]
    WrongMatrixShape { got: usize, got2: usize, n: usize },
    #[error("metric axiom violated: {0}")]
    NotAMetric(String),
    #[error("element map must cover every source element")]
    PartialMap,
}

/// A diversity given by its full table of `2^n` subset values.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedDiversity {
    ground: GroundSet,
    values: Vec<f64>,
}

impl TabulatedDiversity {
    /// Wrap a dense table. The only structural requirements are the length
    /// and finiteness; axioms are checked separately by [`Self::validate`].
    pub fn new(ground: GroundSet, values: Vec<f64>) -> Result<Self, DiversityError> {
        if values.len() != ground.table_len() {
            return Err(DiversityError::WrongTableLength {
                got: values.len(),
                expected: ground.table_len(),
                n: ground.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(DiversityError::NonFinite(Subset(pos as u32)));
        }
        Ok(TabulatedDiversity { ground, values })
    }

    /// Tabulate `f` over every subset, forcing the empty set and singletons
    /// to zero.
    pub fn tabulate(ground: GroundSet, mut f: impl FnMut(Subset) -> f64) -> Self {
        let values = ground
            .subsets()
            .map(|s| if s.len() <= 1 { 0.0 } else { f(s) })
            .collect();
        TabulatedDiversity { ground, values }
    }

    pub fn zero(ground: GroundSet) -> Self {
        let values = vec![0.0; ground.table_len()];
        TabulatedDiversity { ground, values }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn get(&self, s: Subset) -> f64 {
        self.values[s.0 as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        TabulatedDiversity {
            ground: self.ground.clone(),
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }

    /// Full axiom check: nonnegativity, zero on small sets, monotonicity over
    /// all nested pairs, and the triangle inequality over all triples
    /// `(A, B, C)` with `B` nonempty. Quadratic-to-cubic in the table size,
    /// intended for `n ≤ 8`.
    pub fn validate(&self, eps: f64) -> ValidationReport {
        self.validate_with(eps, false)
    }

    pub fn validate_with(&self, eps: f64, strict_positive: bool) -> ValidationReport {
        let mut report = ValidationReport::new();
        let table = 1u32 << self.ground.len();

        if self.get(Subset::EMPTY) != 0.0 {
            report.push(Violation::EmptySetNonZero { value: self.get(Subset::EMPTY) });
        }
        for i in 0..self.ground.len() {
            let v = self.get(Subset::singleton(i));
            if v != 0.0 {
                report.push(Violation::SingletonNonZero { set: Subset::singleton(i), value: v });
            }
        }
        for m in 0..table {
            let s = Subset(m);
            let v = self.get(s);
            if v < -eps {
                report.push(Violation::Negative { set: s, value: v });
            }
            if strict_positive && s.len() >= 2 && v <= eps {
                report.push(Violation::NotStrictlyPositive { set: s, value: v });
            }
        }

        // Monotonicity over covering pairs; chains give all nested pairs.
        for m in 0..table {
            let s = Subset(m);
            for i in 0..self.ground.len() {
                if s.contains(i) {
                    continue;
                }
                let sup = s.insert(i);
                if self.get(s) > self.get(sup) + eps {
                    report.push(Violation::Monotonicity {
                        sub: s,
                        sup,
                        sub_value: self.get(s),
                        sup_value: self.get(sup),
                    });
                    if report.truncated {
                        return report;
                    }
                }
            }
        }

        // Triangle inequality over all triples with B nonempty.
        for a in 0..table {
            for b in 1..table {
                let ab = a | b;
                for c in 0..table {
                    let lhs = self.values[ab as usize] + self.values[(b | c) as usize];
                    let rhs = self.values[(a | c) as usize];
                    if lhs + eps < rhs {
                        report.push(Violation::Triangle {
                            a: Subset(a),
                            b: Subset(b),
                            c: Subset(c),
                            lhs,
                            rhs,
                        });
                        if report.truncated {
                            return report;
                        }
                    }
                }
            }
        }
        report
    }

    /// Equivalent reformulation of the triangle axiom: monotonicity over
    /// covering pairs plus subadditivity `δ(Y∪Z) ≤ δ(Y) + δ(Z)` for
    /// overlapping `Y, Z`. Returns the same verdict as the full triple
    /// enumeration in `O(4^n)` instead of `O(8^n)`.
    ///
    /// Equivalence: the triangle instance `(A, B, C)` follows from
    /// subadditivity of the overlapping pair `(A∪B, B∪C)` and monotonicity of
    /// `A∪C ⊆ A∪B∪C`; conversely both families are triangle instances (take
    /// `B = {x}` with `x ∈ Y∩Z`).
    pub fn satisfies_axioms_reduced(&self, eps: f64) -> bool {
        let n = self.ground.len();
        let table = 1u32 << n;
        if self.get(Subset::EMPTY) != 0.0 {
            return false;
        }
        for i in 0..n {
            if self.get(Subset::singleton(i)) != 0.0 {
                return false;
            }
        }
        for m in 0..table {
            let v = self.values[m as usize];
            if v < -eps {
                return false;
            }
            for i in 0..n {
                if m & (1 << i) == 0 && v > self.values[(m | (1 << i)) as usize] + eps {
                    return false;
                }
            }
        }
        // Overlapping subadditivity: iterate y and its overlapping partners.
        for y in 1..table {
            for z in 1..table {
                if y & z == 0 {
                    continue;
                }
                let u = (y | z) as usize;
                if self.values[u] > self.values[y as usize] + self.values[z as usize] + eps {
                    return false;
                }
            }
        }
        true
    }

    /// `d(a,b) = δ({a,b})`. For a valid diversity the result always satisfies
    /// the metric axioms.
    pub fn induced_metric(&self) -> TabulatedMetric {
        let n = self.ground.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i * n + j] =
                        self.get(Subset::singleton(i).union(Subset::singleton(j)));
                }
            }
        }
        TabulatedMetric { ground: self.ground.clone(), d }
    }
}

/// One failed axiom instance, with its witnessing subsets.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptySetNonZero { value: f64 },
    SingletonNonZero { set: Subset, value: f64 },
    Negative { set: Subset, value: f64 },
    NotStrictlyPositive { set: Subset, value: f64 },
    Monotonicity { sub: Subset, sup: Subset, sub_value: f64, sup_value: f64 },
    Triangle { a: Subset, b: Subset, c: Subset, lhs: f64, rhs: f64 },
}

/// Outcome of a full axiom check. `ok` iff no violation was found; the list
/// is capped at [`ValidationReport::MAX_VIOLATIONS`] entries to keep reports
/// on garbage tables bounded (`truncated` records that the cap was hit).
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub truncated: bool,
}

impl ValidationReport {
    pub const MAX_VIOLATIONS: usize = 1000;

    fn new() -> Self {
        ValidationReport::default()
    }

    fn push(&mut self, v: Violation) {
        if self.violations.len() < Self::MAX_VIOLATIONS {
            self.violations.push(v);
        } else {
            self.truncated = true;
        }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A metric given by its full distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedMetric {
    ground: GroundSet,
    d: Vec<f64>, // row-major n*n
}

impl TabulatedMetric {
    pub fn new(ground: GroundSet, d: Vec<f64>, eps: f64) -> Result<Self, DiversityError> {
        let n = ground.len();
        if d.len() != n * n {
            return Err(DiversityError::WrongMatrixShape { got: d.len() / n.max(1), got2: n, n });
        }
        let m = TabulatedMetric { ground, d };
        m.check_axioms(eps)?;
        Ok(m)
    }

    fn check_axioms(&self, eps: f64) -> Result<(), DiversityError> {
        let n = self.ground.len();
        for i in 0..n {
            if self.get(i, i).abs() > eps {
                return Err(DiversityError::NotAMetric(format!(
                    "d({l},{l}) = {v} != 0",
                    l = self.ground.label(i),
                    v = self.get(i, i)
                )));
            }
            for j in 0..n {
                if self.get(i, j) < -eps {
                    return Err(DiversityError::NotAMetric(format!(
                        "d({},{}) < 0",
                        self.ground.label(i),
                        self.ground.label(j)
                    )));
                }
                if (self.get(i, j) - self.get(j, i)).abs() > eps {
                    return Err(DiversityError::NotAMetric(format!(
                        "d({},{}) != d({1},{0})",
                        self.ground.label(i),
                        self.ground.label(j)
                    )));
                }
                for k in 0..n {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) + eps {
                        return Err(DiversityError::NotAMetric(format!(
                            "triangle fails at ({},{},{})",
                            self.ground.label(i),
                            self.ground.label(j),
                            self.ground.label(k)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.ground.len() + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.d
    }
}

/// Expansion/shrinkage extremes of an element map between two diversities.
///
/// `expand` is the largest `δ₂(φ(A))/δ₁(A)` over subsets with at least two
/// elements, `shrink` the largest reciprocal ratio, and `distortion` their
/// product. Subsets where both values are zero carry no information and are
/// skipped; a zero on exactly one side makes the corresponding factor (and
/// the distortion) infinite.
#[derive(Clone, Debug)]
pub struct DistortionReport {
    pub expand: f64,
    pub shrink: f64,
    pub distortion: f64,
    pub expand_witness: Option<Subset>,
    pub shrink_witness: Option<Subset>,
}

/// Distortion of the element map `phi` (source index → destination index)
/// from `src` to `dst`, maximized exactly over all subsets of size ≥ 2.
pub fn distortion_between(
    src: &TabulatedDiversity,
    dst: &TabulatedDiversity,
    phi: &[usize],
) -> Result<DistortionReport, DiversityError> {
    if phi.len() != src.ground().len() {
        return Err(DiversityError::PartialMap);
    }
    let mut expand: Option<(f64, Subset)> = None;
    let mut shrink: Option<(f64, Subset)> = None;

    for s in src.ground().subsets() {
        if s.len() < 2 {
            continue;
        }
        let image = Subset::from_indices(s.iter().map(|i| phi[i]));
        let v1 = src.get(s);
        let v2 = dst.get(image);
        if v1 == 0.0 && v2 == 0.0 {
            continue;
        }
        let up = if v1 == 0.0 { f64::INFINITY } else { v2 / v1 };
        let down = if v2 == 0.0 { f64::INFINITY } else { v1 / v2 };
        if expand.is_none_or(|(e, _)| up > e) {
            expand = Some((up, s));
        }
        if shrink.is_none_or(|(e, _)| down > e) {
            shrink = Some((down, s));
        }
    }

    // Identically-zero pair: the map is vacuously isometric.
    let (Some((expand, ew)), Some((shrink, sw))) = (expand, shrink) else {
        return Ok(DistortionReport {
            expand: 1.0,
            shrink: 1.0,
            distortion: 1.0,
            expand_witness: None,
            shrink_witness: None,
        });
    };
    let distortion = if expand.is_infinite() || shrink.is_infinite() {
        f64::INFINITY
    } else {
        expand * shrink
    };
    Ok(DistortionReport {
        expand,
        shrink,
        distortion,
        expand_witness: Some(ew),
        shrink_witness: Some(sw),
    })
}

/// `δ(A) = |A| − 1`: the canonical example of a diversity that is far from
/// the cut cone. Used across the test suites.
pub fn count_diversity(ground: GroundSet) -> TabulatedDiversity {
    TabulatedDiversity::tabulate(ground, |s| (s.len() as f64) - 1.0)
}

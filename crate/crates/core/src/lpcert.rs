//! The trade-off linear program over the ratio variables, its dual
//! certificate, and the tight primal point.
//!
//! Primal: minimize `y` subject to 55 constraints `a·x >= b` and `x >= 0`.
//! Dual: maximize `b·λ` subject to `Aᵀλ <= e_y` and `λ >= 0`.
//! The dual rows are available from three independent sources that must
//! agree: the transpose of the primal matrix, a per-variable transcription,
//! and an integer-scaled transcription (multiplied through by 153).

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{self, int, ratio, Rational};

pub const NUM_VARS: usize = 43;
pub const NUM_CONSTRAINTS: usize = 55;
/// Common denominator of the stored certificate.
pub const CERT_SCALE: i64 = 153;

const Y: usize = 0;
const fn xi(i: usize) -> usize {
    i
}
const fn alpha(i: usize) -> usize {
    8 + i
}
const fn beta(i: usize) -> usize {
    16 + i
}
const fn gamma(i: usize) -> usize {
    24 + i
}
const DELTA: usize = 33;
const PI: usize = 34;
const fn tau(i: usize) -> usize {
    34 + i
}
const fn phi(i: usize) -> usize {
    39 + i
}

/// Variable names in storage order.
pub fn variable_names() -> Vec<String> {
    let mut names = vec!["y".to_string()];
    for family in ["xi", "alpha", "beta", "gamma"] {
        for i in 1..=8 {
            names.push(format!("{family}{i}"));
        }
    }
    names.push("delta".into());
    names.push("pi".into());
    for i in 1..=5 {
        names.push(format!("tau{i}"));
    }
    for i in 1..=3 {
        names.push(format!("phi{i}"));
    }
    names
}

/// `Σ coeffs[j]·x[j] >= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub tag: String,
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Constraint {
    fn new(tag: impl Into<String>, terms: &[(usize, Rational)], rhs: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); NUM_VARS];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        Self {
            tag: tag.into(),
            coeffs,
            rhs,
        }
    }

    pub fn lhs_at(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }
}

#[derive(Debug, Clone)]
pub struct PrimalLp {
    pub variables: Vec<String>,
    pub constraints: Vec<Constraint>,
}

fn neg(c: &Constraint, tag: String) -> Constraint {
    Constraint {
        tag,
        coeffs: c.coeffs.iter().map(|a| -a).collect(),
        rhs: -&c.rhs,
    }
}

/// The 55 constraints, tagged `C1`..`C55`.
pub fn build_primal() -> PrimalLp {
    let one = || int(1);
    let m1 = || int(-1);
    let mut cs: Vec<Constraint> = Vec::with_capacity(NUM_CONSTRAINTS);

    // C1: y >= 2/3 δ + 1/2 - 1/2 Σγ
    let mut t = vec![(Y, one()), (DELTA, ratio(-2, 3))];
    t.extend((1..=8).map(|i| (gamma(i), ratio(1, 2))));
    cs.push(Constraint::new("C1", &t, ratio(1, 2)));

    // C2: the second algorithm's bound
    let t = vec![
        (Y, one()),
        (PI, ratio(-2, 3)),
        (phi(1), ratio(-1, 12)),
        (phi(2), ratio(-1, 6)),
        (phi(3), ratio(-1, 4)),
        (tau(2), ratio(-1, 6)),
        (tau(3), ratio(-1, 4)),
        (tau(4), ratio(-1, 3)),
        (alpha(2), ratio(-1, 2)),
        (alpha(3), ratio(-1, 2)),
        (alpha(4), ratio(-1, 2)),
        (alpha(5), m1()),
        (alpha(7), ratio(-1, 2)),
        (beta(7), ratio(1, 4)),
        (xi(6), ratio(-1, 4)),
        (xi(8), ratio(-1, 4)),
    ];
    cs.push(Constraint::new("C2", &t, Rational::zero()));

    // C3: y >= 4/9 (2β5 + 2β6 + ξ7 + ξ8 + γ7 + γ8)
    let f = ratio(-4, 9);
    let t = vec![
        (Y, one()),
        (beta(5), &f * int(2)),
        (beta(6), &f * int(2)),
        (xi(7), f.clone()),
        (xi(8), f.clone()),
        (gamma(7), f.clone()),
        (gamma(8), f.clone()),
    ];
    cs.push(Constraint::new("C3", &t, Rational::zero()));

    // C4, C5: Σξ = 1
    let t: Vec<_> = (1..=8).map(|i| (xi(i), one())).collect();
    let c4 = Constraint::new("C4", &t, one());
    let c5 = neg(&c4, "C5".into());
    cs.push(c4);
    cs.push(c5);

    // C6-C13 and C14-C21: ξi = αi + βi
    let split: Vec<Constraint> = (1..=8)
        .map(|i| Constraint::new(format!("C{}", 5 + i), &[(xi(i), one()), (alpha(i), m1()), (beta(i), m1())], Rational::zero()))
        .collect();
    let split_neg: Vec<Constraint> = split.iter().enumerate().map(|(k, c)| neg(c, format!("C{}", 14 + k))).collect();
    cs.extend(split);
    cs.extend(split_neg);

    // C22, C23: π = Στ
    let mut t = vec![(PI, one())];
    t.extend((1..=5).map(|i| (tau(i), m1())));
    let c22 = Constraint::new("C22", &t, Rational::zero());
    let c23 = neg(&c22, "C23".into());
    cs.push(c22);
    cs.push(c23);

    // C24, C25: τ1 = Σφ
    let mut t = vec![(tau(1), one())];
    t.extend((1..=3).map(|i| (phi(i), m1())));
    let c24 = Constraint::new("C24", &t, Rational::zero());
    let c25 = neg(&c24, "C25".into());
    cs.push(c24);
    cs.push(c25);

    // C26-C29: αi >= βi for i in {1, 3, 4, 8}
    for (k, i) in [1, 3, 4, 8].into_iter().enumerate() {
        cs.push(Constraint::new(format!("C{}", 26 + k), &[(alpha(i), one()), (beta(i), m1())], Rational::zero()));
    }

    // C30, C31: τ3 = β7; C32, C33: τ4 = β5
    let c30 = Constraint::new("C30", &[(tau(3), one()), (beta(7), m1())], Rational::zero());
    let c31 = neg(&c30, "C31".into());
    let c32 = Constraint::new("C32", &[(tau(4), one()), (beta(5), m1())], Rational::zero());
    let c33 = neg(&c32, "C33".into());
    cs.extend([c30, c31, c32, c33]);

    // C34: β5 >= α5
    cs.push(Constraint::new("C34", &[(beta(5), one()), (alpha(5), m1())], Rational::zero()));

    // C35-C38: the four bounds on δ
    cs.push(Constraint::new(
        "C35",
        &[(DELTA, one()), (PI, m1()), (alpha(1), m1()), (beta(2), m1())],
        Rational::zero(),
    ));
    cs.push(Constraint::new(
        "C36",
        &[
            (DELTA, one()),
            (PI, m1()),
            (tau(1), one()),
            (tau(2), one()),
            (alpha(1), m1()),
            (gamma(2), m1()),
            (alpha(3), m1()),
            (alpha(4), m1()),
            (alpha(6), m1()),
        ],
        Rational::zero(),
    ));
    cs.push(Constraint::new(
        "C37",
        &[
            (DELTA, one()),
            (PI, m1()),
            (tau(1), one()),
            (alpha(1), m1()),
            (beta(2), m1()),
            (alpha(6), m1()),
        ],
        Rational::zero(),
    ));
    cs.push(Constraint::new(
        "C38",
        &[
            (DELTA, one()),
            (PI, m1()),
            (phi(3), one()),
            (tau(2), one()),
            (alpha(1), m1()),
            (gamma(2), m1()),
            (alpha(3), m1()),
            (alpha(4), m1()),
        ],
        Rational::zero(),
    ));

    // C39: π >= Σγ
    let mut t = vec![(PI, one())];
    t.extend((1..=8).map(|i| (gamma(i), m1())));
    cs.push(Constraint::new("C39", &t, Rational::zero()));

    // C40-C47: γi >= αi; C48-C55: γi >= βi
    for i in 1..=8 {
        cs.push(Constraint::new(format!("C{}", 39 + i), &[(gamma(i), one()), (alpha(i), m1())], Rational::zero()));
    }
    for i in 1..=8 {
        cs.push(Constraint::new(format!("C{}", 47 + i), &[(gamma(i), one()), (beta(i), m1())], Rational::zero()));
    }

    debug_assert_eq!(cs.len(), NUM_CONSTRAINTS);
    PrimalLp {
        variables: variable_names(),
        constraints: cs,
    }
}

fn term(c: &Rational, name: &str, first: bool) -> String {
    let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
    let mag = c.abs();
    let sep = if first && sign.is_empty() { "" } else { " " };
    if mag.is_one() {
        format!("{sign}{sep}{name}")
    } else {
        format!("{sign}{sep}{} {name}", rational::to_compact(&mag))
    }
}

impl PrimalLp {
    /// Plain-text form, one inequality per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("minimize y\nsubject to\n");
        for c in &self.constraints {
            let mut parts = Vec::new();
            for (j, a) in c.coeffs.iter().enumerate() {
                if !a.is_zero() {
                    parts.push(term(a, &self.variables[j], parts.is_empty()));
                }
            }
            let _ = writeln!(out, "  {}: {} >= {}", c.tag, parts.join(" "), rational::to_compact(&c.rhs));
        }
        let _ = writeln!(out, "bounds\n  all variables >= 0\nend");
        out
    }

    /// Dual rows by transposition: row `j` holds the coefficients of
    /// variable `j` across all constraints, with bound `1` for `y`, else `0`.
    pub fn dual_rows(&self) -> Vec<DualRow> {
        (0..NUM_VARS)
            .map(|j| DualRow {
                variable: self.variables[j].clone(),
                coeffs: self.constraints.iter().map(|c| c.coeffs[j].clone()).collect(),
                bound: if j == Y { Rational::one() } else { Rational::zero() },
            })
            .collect()
    }
}

/// `Σ coeffs[i]·λ[i] <= bound`, `coeffs` indexed from λ1 at position 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualRow {
    pub variable: String,
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
}

fn row(variable: &str, terms: &[(usize, Rational)], bound: Rational) -> DualRow {
    let mut coeffs = vec![Rational::zero(); NUM_CONSTRAINTS];
    for (k, c) in terms {
        coeffs[k - 1] += c;
    }
    DualRow {
        variable: variable.into(),
        coeffs,
        bound,
    }
}

/// The dual constraints as printed, one per primal variable.
pub fn printed_dual_rows() -> Vec<DualRow> {
    let p = |k: usize| (k, int(1));
    let m = |k: usize| (k, int(-1));
    let q = |k: usize, a: i64, b: i64| (k, ratio(a, b));
    let z = Rational::zero;
    let mut rows = vec![row("y", &[p(1), p(2), p(3)], int(1))];
    rows.push(row("xi1", &[p(4), m(5), p(6), m(14)], z()));
    rows.push(row("xi2", &[p(4), m(5), p(7), m(15)], z()));
    rows.push(row("xi3", &[p(4), m(5), p(8), m(16)], z()));
    rows.push(row("xi4", &[p(4), m(5), p(9), m(17)], z()));
    rows.push(row("xi5", &[p(4), m(5), p(10), m(18)], z()));
    rows.push(row("xi6", &[q(2, -1, 4), p(4), m(5), p(11), m(19)], z()));
    rows.push(row("xi7", &[q(3, -4, 9), p(4), m(5), p(12), m(20)], z()));
    rows.push(row("xi8", &[q(2, -1, 4), q(3, -4, 9), p(4), m(5), p(13), m(21)], z()));
    rows.push(row("alpha1", &[m(6), p(14), p(26), m(35), m(36), m(37), m(38), m(40)], z()));
    rows.push(row("alpha2", &[q(2, -1, 2), m(7), p(15), m(41)], z()));
    rows.push(row("alpha3", &[q(2, -1, 2), m(8), p(16), p(27), m(36), m(38), m(42)], z()));
    rows.push(row("alpha4", &[q(2, -1, 2), m(9), p(17), p(28), m(36), m(38), m(43)], z()));
    rows.push(row("alpha5", &[m(2), m(10), p(18), m(34), m(44)], z()));
    rows.push(row("alpha6", &[m(11), p(19), m(36), m(37), m(45)], z()));
    rows.push(row("alpha7", &[q(2, -1, 2), m(12), p(20), m(46)], z()));
    rows.push(row("alpha8", &[m(13), p(21), p(29), m(47)], z()));
    rows.push(row("beta1", &[m(6), p(14), m(26), m(48)], z()));
    rows.push(row("beta2", &[m(7), p(15), m(35), m(37), m(49)], z()));
    rows.push(row("beta3", &[m(8), p(16), m(27), m(50)], z()));
    rows.push(row("beta4", &[m(9), p(17), m(28), m(51)], z()));
    rows.push(row("beta5", &[q(3, -8, 9), m(10), p(18), m(32), p(33), p(34), m(52)], z()));
    rows.push(row("beta6", &[q(3, -8, 9), m(11), p(19), m(53)], z()));
    rows.push(row("beta7", &[q(2, 1, 4), m(12), p(20), m(30), p(31), m(54)], z()));
    rows.push(row("beta8", &[m(13), p(21), m(29), m(55)], z()));
    rows.push(row("gamma1", &[q(1, 1, 2), m(39), p(40), p(48)], z()));
    rows.push(row("gamma2", &[q(1, 1, 2), m(36), m(38), m(39), p(41), p(49)], z()));
    rows.push(row("gamma3", &[q(1, 1, 2), m(39), p(42), p(50)], z()));
    rows.push(row("gamma4", &[q(1, 1, 2), m(39), p(43), p(51)], z()));
    rows.push(row("gamma5", &[q(1, 1, 2), m(39), p(44), p(52)], z()));
    rows.push(row("gamma6", &[q(1, 1, 2), m(39), p(45), p(53)], z()));
    rows.push(row("gamma7", &[q(1, 1, 2), q(3, -4, 9), m(39), p(46), p(54)], z()));
    rows.push(row("gamma8", &[q(1, 1, 2), q(3, -4, 9), m(39), p(47), p(55)], z()));
    rows.push(row("delta", &[q(1, -2, 3), p(35), p(36), p(37), p(38)], z()));
    rows.push(row("pi", &[q(2, -2, 3), p(22), m(23), m(35), m(36), m(37), m(38), p(39)], z()));
    rows.push(row("tau1", &[m(22), p(23), p(24), m(25), p(36), p(37)], z()));
    rows.push(row("tau2", &[q(2, -1, 6), m(22), p(23), p(36), p(38)], z()));
    rows.push(row("tau3", &[q(2, -1, 4), m(22), p(23), p(30), m(31)], z()));
    rows.push(row("tau4", &[q(2, -1, 3), m(22), p(23), p(32), m(33)], z()));
    rows.push(row("tau5", &[m(22), p(23)], z()));
    rows.push(row("phi1", &[q(2, -1, 12), m(24), p(25)], z()));
    rows.push(row("phi2", &[q(2, -1, 6), m(24), p(25)], z()));
    rows.push(row("phi3", &[q(2, -1, 4), m(24), p(25), p(38)], z()));
    rows
}

/// The integer-scaled dual rows (coefficients cleared of denominators,
/// bounds multiplied by 153), in the same variable order.
pub fn scaled_dual_rows() -> Vec<(Vec<i64>, i64)> {
    let r = |terms: &[(usize, i64)], bound: i64| {
        let mut v = vec![0i64; NUM_CONSTRAINTS];
        for &(k, c) in terms {
            v[k - 1] += c;
        }
        (v, bound)
    };
    vec![
        r(&[(1, 1), (2, 1), (3, 1)], 153),
        r(&[(4, 1), (5, -1), (6, 1), (14, -1)], 0),
        r(&[(4, 1), (5, -1), (7, 1), (15, -1)], 0),
        r(&[(4, 1), (5, -1), (8, 1), (16, -1)], 0),
        r(&[(4, 1), (5, -1), (9, 1), (17, -1)], 0),
        r(&[(4, 1), (5, -1), (10, 1), (18, -1)], 0),
        r(&[(2, -1), (4, 4), (5, -4), (11, 4), (19, -4)], 0),
        r(&[(3, -4), (4, 9), (5, -9), (12, 9), (20, -9)], 0),
        r(&[(2, -9), (3, -16), (4, 36), (5, -36), (13, 36), (21, -36)], 0),
        r(&[(6, -1), (14, 1), (26, 1), (35, -1), (36, -1), (37, -1), (38, -1), (40, -1)], 0),
        r(&[(2, -1), (7, -2), (15, 2), (41, -2)], 0),
        r(&[(2, -1), (8, -2), (16, 2), (27, 2), (36, -2), (38, -2), (42, -2)], 0),
        r(&[(2, -1), (9, -2), (17, 2), (28, 2), (36, -2), (38, -2), (43, -2)], 0),
        r(&[(2, -1), (10, -1), (18, 1), (34, -1), (44, -1)], 0),
        r(&[(11, -1), (19, 1), (36, -1), (37, -1), (45, -1)], 0),
        r(&[(2, -1), (12, -2), (20, 2), (46, -2)], 0),
        r(&[(13, -1), (21, 1), (29, 1), (47, -1)], 0),
        r(&[(6, -1), (14, 1), (26, -1), (48, -1)], 0),
        r(&[(7, -1), (15, 1), (35, -1), (37, -1), (49, -1)], 0),
        r(&[(8, -1), (16, 1), (27, -1), (50, -1)], 0),
        r(&[(9, -1), (17, 1), (28, -1), (51, -1)], 0),
        r(&[(3, -8), (10, -9), (18, 9), (32, -9), (33, 9), (34, 9), (52, -9)], 0),
        r(&[(3, -8), (11, -9), (19, 9), (53, -9)], 0),
        r(&[(2, 1), (12, -4), (20, 4), (30, -4), (31, 4), (54, -4)], 0),
        r(&[(13, -1), (21, 1), (29, -1), (55, -1)], 0),
        r(&[(1, 1), (39, -2), (40, 2), (48, 2)], 0),
        r(&[(1, 1), (36, -2), (38, -2), (39, -2), (41, 2), (49, 2)], 0),
        r(&[(1, 1), (39, -2), (42, 2), (50, 2)], 0),
        r(&[(1, 1), (39, -2), (43, 2), (51, 2)], 0),
        r(&[(1, 1), (39, -2), (44, 2), (52, 2)], 0),
        r(&[(1, 1), (39, -2), (45, 2), (53, 2)], 0),
        r(&[(1, 9), (3, -8), (39, -18), (46, 18), (54, 18)], 0),
        r(&[(1, 9), (3, -8), (39, -18), (47, 18), (55, 18)], 0),
        r(&[(1, -2), (35, 3), (36, 3), (37, 3), (38, 3)], 0),
        r(&[(2, -2), (22, 3), (23, -3), (35, -3), (36, -3), (37, -3), (38, -3), (39, 3)], 0),
        r(&[(22, -1), (23, 1), (24, 1), (25, -1), (36, 1), (37, 1)], 0),
        r(&[(2, -1), (22, -6), (23, 6), (36, 6), (38, 6)], 0),
        r(&[(2, -1), (22, -4), (23, 4), (30, 4), (31, -4)], 0),
        r(&[(2, -1), (22, -3), (23, 3), (32, 3), (33, -3)], 0),
        r(&[(22, -1), (23, 1)], 0),
        r(&[(2, -1), (24, -12), (25, 12)], 0),
        r(&[(2, -1), (24, -6), (25, 6)], 0),
        r(&[(2, -1), (24, -4), (25, 4), (38, 4)], 0),
    ]
}

/// Differences between the three dual transcriptions; empty when all agree.
pub fn transcription_mismatches() -> Vec<String> {
    compare_transcriptions(&build_primal().dual_rows(), &printed_dual_rows(), &scaled_dual_rows())
}

fn compare_transcriptions(transposed: &[DualRow], printed: &[DualRow], scaled: &[(Vec<i64>, i64)]) -> Vec<String> {
    let mut out = Vec::new();
    if transposed.len() != NUM_VARS || printed.len() != NUM_VARS || scaled.len() != NUM_VARS {
        out.push(format!(
            "row counts differ: transposed {}, printed {}, scaled {}",
            transposed.len(),
            printed.len(),
            scaled.len()
        ));
        return out;
    }
    for ((t, p), (s, sb)) in transposed.iter().zip(printed).zip(scaled) {
        if t != p {
            out.push(format!("row ({}) differs between transposed and printed forms", p.variable));
        }
        // The scaled row must be a positive multiple of the printed one.
        let lead = p.coeffs.iter().position(|c| !c.is_zero());
        let factor = lead.map(|k| int(s[k]) / &p.coeffs[k]);
        let proportional = match &factor {
            Some(f) if f.is_positive() => {
                p.coeffs.iter().zip(s).all(|(c, &si)| c * f == int(si))
                    && int(*sb) == &p.bound * f * int(CERT_SCALE)
            }
            _ => false,
        };
        if !proportional {
            out.push(format!("row ({}) differs between printed and scaled forms", p.variable));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    /// λ1..λ55.
    pub lambda: Vec<Rational>,
}

/// Certificate values times 153, with a leading unused entry so that index
/// `i` holds λi.
pub const BUILTIN_LAMBDAS_SCALED: [i64; 56] = [
    0, 72, 72, 9, 54, 0, 0, 0, 0, 0, 0, 0, 0, 0, 54, 54, 54, 54, 54, 36, 50, 32, 0, 0, 0, 6, 54, 54, 54, 0, 18, 0,
    24, 0, 0, 30, 0, 6, 12, 96, 60, 18, 60, 60, 0, 30, 14, 32, 0, 18, 0, 0, 22, 28, 50, 32,
];

impl DualCertificate {
    pub fn builtin() -> Self {
        Self::from_scaled(&BUILTIN_LAMBDAS_SCALED[1..], CERT_SCALE)
    }

    pub fn zero() -> Self {
        Self {
            lambda: vec![Rational::zero(); NUM_CONSTRAINTS],
        }
    }

    pub fn from_scaled(values: &[i64], scale: i64) -> Self {
        Self {
            lambda: values.iter().map(|&v| ratio(v, scale)).collect(),
        }
    }

    /// Values multiplied by 153, when all of them are integers after scaling.
    pub fn scaled(&self) -> Option<Vec<i64>> {
        self.lambda
            .iter()
            .map(|l| {
                let s = l * int(CERT_SCALE);
                if s.is_integer() {
                    s.numer().to_string().parse().ok()
                } else {
                    None
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RowCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct DualReport {
    pub feasible: bool,
    pub objective: Rational,
    /// Per-row results for the 43 dual constraints, followed by λ >= 0.
    pub rows: Vec<RowCheck>,
    pub violated: Vec<String>,
    pub transcription_mismatches: Vec<String>,
}

/// Checks every dual constraint and non-negativity exactly and evaluates
/// `(1/2)λ1 + λ4 - λ5`.
pub fn verify_dual(cert: &DualCertificate) -> DualReport {
    let mut rows = Vec::new();
    let mut violated = Vec::new();
    if cert.lambda.len() != NUM_CONSTRAINTS {
        violated.push(format!("expected {NUM_CONSTRAINTS} values, got {}", cert.lambda.len()));
        return DualReport {
            feasible: false,
            objective: Rational::zero(),
            rows,
            violated,
            transcription_mismatches: transcription_mismatches(),
        };
    }
    for r in printed_dual_rows() {
        let lhs: Rational = r.coeffs.iter().zip(&cert.lambda).map(|(a, l)| a * l).sum();
        let pass = lhs <= r.bound;
        if !pass {
            violated.push(format!("({})", r.variable));
        }
        rows.push(RowCheck {
            name: format!("({})", r.variable),
            lhs: rational::to_pq(&lhs),
            rhs: rational::to_pq(&r.bound),
            pass,
        });
    }
    for (i, l) in cert.lambda.iter().enumerate() {
        let pass = !l.is_negative();
        if !pass {
            violated.push(format!("lambda{} >= 0", i + 1));
            rows.push(RowCheck {
                name: format!("lambda{} >= 0", i + 1),
                lhs: rational::to_pq(l),
                rhs: "0/1".into(),
                pass,
            });
        }
    }
    let objective = &cert.lambda[0] * ratio(1, 2) + &cert.lambda[3] - &cert.lambda[4];
    DualReport {
        feasible: violated.is_empty(),
        objective,
        rows,
        violated,
        transcription_mismatches: transcription_mismatches(),
    }
}

/// Values of the ratio variables (everything except `y`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpPoint {
    pub xi: [Rational; 8],
    pub alpha: [Rational; 8],
    pub beta: [Rational; 8],
    pub gamma: [Rational; 8],
    pub delta: Rational,
    pub pi: Rational,
    pub tau: [Rational; 5],
    pub phi: [Rational; 3],
}

impl Default for LpPoint {
    fn default() -> Self {
        let z = Rational::zero;
        Self {
            xi: std::array::from_fn(|_| z()),
            alpha: std::array::from_fn(|_| z()),
            beta: std::array::from_fn(|_| z()),
            gamma: std::array::from_fn(|_| z()),
            delta: z(),
            pi: z(),
            tau: std::array::from_fn(|_| z()),
            phi: std::array::from_fn(|_| z()),
        }
    }
}

impl LpPoint {
    /// The tight point: ξ1 = 1/68, ξ3 = 7/68, ξ8 = 15/17, α = β = γ = ξ/2,
    /// δ = 69/136, π = 1/2, τ2 = 7/136, τ5 = 61/136, all else zero.
    pub fn worst_case() -> Self {
        let mut p = Self::default();
        p.xi[0] = ratio(1, 68);
        p.xi[2] = ratio(7, 68);
        p.xi[7] = ratio(15, 17);
        for i in 0..8 {
            let half = &p.xi[i] * ratio(1, 2);
            p.alpha[i] = half.clone();
            p.beta[i] = half.clone();
            p.gamma[i] = half;
        }
        p.delta = ratio(69, 136);
        p.pi = ratio(1, 2);
        p.tau[1] = ratio(7, 136);
        p.tau[4] = ratio(61, 136);
        p
    }

    /// Full variable vector with the given `y`.
    pub fn to_vector(&self, y: &Rational) -> Vec<Rational> {
        let mut v = vec![y.clone()];
        for family in [&self.xi, &self.alpha, &self.beta, &self.gamma] {
            v.extend(family.iter().cloned());
        }
        v.push(self.delta.clone());
        v.push(self.pi.clone());
        v.extend(self.tau.iter().cloned());
        v.extend(self.phi.iter().cloned());
        v
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointViolation {
    pub tag: String,
    pub lhs: String,
    pub rhs: String,
    /// `lhs - rhs`, negative for a violation.
    pub slack: String,
}

/// Every violated constraint among C4..C55 and the sign constraints. The
/// first three constraints involve `y` and are left out.
pub fn check_point_feasible(pt: &LpPoint) -> Vec<PointViolation> {
    let lp = build_primal();
    let x = pt.to_vector(&Rational::zero());
    let mut out = Vec::new();
    for c in lp.constraints.iter().skip(3) {
        let lhs = c.lhs_at(&x);
        if lhs < c.rhs {
            out.push(PointViolation {
                tag: c.tag.clone(),
                lhs: rational::to_pq(&lhs),
                rhs: rational::to_pq(&c.rhs),
                slack: rational::to_pq(&(&lhs - &c.rhs)),
            });
        }
    }
    for (j, v) in x.iter().enumerate().skip(1) {
        if v.is_negative() {
            out.push(PointViolation {
                tag: format!("{} >= 0", lp.variables[j]),
                lhs: rational::to_pq(v),
                rhs: "0/1".into(),
                slack: rational::to_pq(v),
            });
        }
    }
    out
}

/// Smallest `y` allowed by constraint `k` (0-based, one of the first three).
fn y_bound(c: &Constraint, x: &[Rational]) -> Rational {
    &c.rhs - c.lhs_at(x)
}

#[derive(Debug, Clone)]
pub struct WorstCaseReport {
    pub feasible: bool,
    pub violations: Vec<PointViolation>,
    pub c1: Rational,
    pub c2: Rational,
    pub c3: Rational,
    /// Whether `max(c1, c2, c3) = 10/17`.
    pub attains_ratio: bool,
}

/// Feasibility of C4..C55 at `pt` and the three lower bounds on `y`.
pub fn verify_worst_case_point(pt: &LpPoint) -> WorstCaseReport {
    let lp = build_primal();
    let x = pt.to_vector(&Rational::zero());
    let c1 = y_bound(&lp.constraints[0], &x);
    let c2 = y_bound(&lp.constraints[1], &x);
    let c3 = y_bound(&lp.constraints[2], &x);
    let best = rational::max(&rational::max(&c1, &c2), &c3);
    let violations = check_point_feasible(pt);
    WorstCaseReport {
        feasible: violations.is_empty(),
        violations,
        attains_ratio: best == ratio(10, 17),
        c1,
        c2,
        c3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let lp = build_primal();
        assert_eq!(lp.constraints.len(), 55);
        assert_eq!(lp.variables.len(), 43);
        for (k, c) in lp.constraints.iter().enumerate() {
            assert_eq!(c.tag, format!("C{}", k + 1));
        }
    }

    #[test]
    fn c3_and_c39_coefficients() {
        let lp = build_primal();
        let c3 = &lp.constraints[2];
        assert_eq!(c3.coeffs[Y], int(1));
        assert_eq!(c3.coeffs[beta(5)], ratio(-8, 9));
        assert_eq!(c3.coeffs[beta(6)], ratio(-8, 9));
        for j in [xi(7), xi(8), gamma(7), gamma(8)] {
            assert_eq!(c3.coeffs[j], ratio(-4, 9));
        }
        assert_eq!(c3.coeffs.iter().filter(|c| !c.is_zero()).count(), 7);
        let c39 = &lp.constraints[38];
        assert_eq!(c39.coeffs[PI], int(1));
        for i in 1..=8 {
            assert_eq!(c39.coeffs[gamma(i)], int(-1));
        }
    }

    #[test]
    fn transcriptions_agree() {
        assert_eq!(transcription_mismatches(), Vec::<String>::new());
    }

    #[test]
    fn transcription_errors_detected() {
        let transposed = build_primal().dual_rows();
        let mut printed = printed_dual_rows();
        let mut scaled = scaled_dual_rows();
        printed[13].coeffs[43] = int(0);
        scaled[6].0[10] = 3;
        let found = compare_transcriptions(&transposed, &printed, &scaled);
        assert_eq!(found.len(), 3, "{found:?}");
        assert!(found[0].contains("xi6"));
        assert!(found[1].contains("alpha5") && found[1].contains("transposed"));
    }

    #[test]
    fn builtin_certificate() {
        let cert = DualCertificate::builtin();
        assert_eq!(cert.lambda[0], ratio(24, 51));
        assert_eq!(cert.lambda[19], ratio(50, 153));
        assert_eq!(cert.scaled().unwrap(), BUILTIN_LAMBDAS_SCALED[1..].to_vec());
        let r = verify_dual(&cert);
        assert!(r.feasible, "{:?}", r.violated);
        assert_eq!(r.objective, ratio(10, 17));
        assert_eq!(r.rows.len(), 43);
    }

    #[test]
    fn zero_certificate() {
        let r = verify_dual(&DualCertificate::zero());
        assert!(r.feasible);
        assert_eq!(r.objective, int(0));
    }

    #[test]
    fn corrupted_certificate() {
        let mut cert = DualCertificate::builtin();
        cert.lambda[0] = ratio(130, 153);
        let r = verify_dual(&cert);
        assert!(!r.feasible);
        assert_eq!(r.violated[0], "(y)");
        let row = &r.rows[0];
        assert_eq!(row.lhs, "211/153");
    }

    #[test]
    fn worst_case_point() {
        let r = verify_worst_case_point(&LpPoint::worst_case());
        assert!(r.feasible, "{:?}", r.violations);
        assert_eq!(r.c1, ratio(10, 17));
        assert_eq!(r.c2, ratio(10, 17));
        assert_eq!(r.c3, ratio(10, 17));
        assert!(r.attains_ratio);
    }

    #[test]
    fn perturbed_points() {
        let mut p = LpPoint::worst_case();
        p.delta = int(1);
        let r = verify_worst_case_point(&p);
        assert_eq!(r.c1, ratio(2, 3) + ratio(1, 4));
        assert!(!r.attains_ratio);

        let r = verify_worst_case_point(&LpPoint::default());
        assert!(!r.feasible);
        assert_eq!(r.violations[0].tag, "C4");

        let mut p = LpPoint::default();
        p.xi[4] = int(1);
        p.alpha[4] = ratio(3, 4);
        p.beta[4] = ratio(1, 4);
        assert!(check_point_feasible(&p).iter().any(|v| v.tag == "C34"));
    }

    #[test]
    fn weak_duality_consistent() {
        // Any feasible primal point has y >= b·λ for a feasible λ.
        let cert = DualCertificate::builtin();
        let pt = LpPoint::worst_case();
        let lp = build_primal();
        let x = pt.to_vector(&ratio(10, 17));
        let lhs: Rational = lp
            .constraints
            .iter()
            .zip(&cert.lambda)
            .map(|(c, l)| c.lhs_at(&x) * l)
            .sum();
        let rhs: Rational = lp.constraints.iter().zip(&cert.lambda).map(|(c, l)| &c.rhs * l).sum();
        assert!(lhs >= rhs);
        assert_eq!(rhs, ratio(10, 17));
    }

    #[test]
    fn text_form() {
        let text = build_primal().to_text();
        assert!(text.contains("C1: y + 1/2 gamma1 + 1/2 gamma2"));
        assert!(text.contains("C34: - alpha5 + beta5 >= 0"));
        assert_eq!(text.lines().filter(|l| l.trim_start().starts_with('C')).count(), 55);
    }
}

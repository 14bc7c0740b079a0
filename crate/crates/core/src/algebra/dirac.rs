//! Pauli matrices, the five-matrix Dirac set built from Kronecker products,
//! and the `A`, `C` matrices of the linearized Schrödinger operator
//! `θ = (A/c) E + B_i p_i + m c C`.

use nalgebra::{Matrix2 as FMatrix2, Matrix4 as FMatrix4};
use num_complex::Complex64;

use super::exact::ExactComplex;
use super::matrix::{anticommutator, kron, Matrix2, Matrix4};
use super::report::{ConditionReport, Residual};
use super::AlgebraError;
use crate::units::{C_LIGHT, HBAR};

/// σ₁, σ₂, σ₃ in the standard representation.
pub fn pauli(i: usize) -> Result<Matrix2, AlgebraError> {
    let m = match i {
        1 => Matrix2::from_int_pairs([[(0, 0), (1, 0)], [(1, 0), (0, 0)]]),
        2 => Matrix2::from_int_pairs([[(0, 0), (0, -1)], [(0, 1), (0, 0)]]),
        3 => Matrix2::from_int_pairs([[(1, 0), (0, 0)], [(0, 0), (-1, 0)]]),
        _ => return Err(AlgebraError::PauliIndex(i)),
    };
    Ok(m)
}

fn sigmas() -> [Matrix2; 3] {
    [1, 2, 3].map(|i| pauli(i).expect("index in range"))
}

/// `v · σ` for an exact 3-vector.
pub fn sigma_dot(v: &[ExactComplex; 3]) -> Matrix2 {
    sigmas()
        .iter()
        .zip(v)
        .fold(Matrix2::zero(), |acc, (s, &c)| acc + s.scale(c))
}

/// `v · σ` in floating point.
pub fn sigma_dot_f64(v: [f64; 3]) -> FMatrix2<Complex64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    FMatrix2::new(c(v[2], 0.0), c(v[0], -v[1]), c(v[0], v[1]), c(-v[2], 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RepKind {
    /// `B_i = σ₁⊗σ_i`, `B₄ = σ₃⊗𝟙` (Dirac's α and β).
    Original,
    /// `B_i = σ₃⊗σ_i`, `B₄ = σ₁⊗𝟙`; makes `A` and `C` single-block.
    Convenient,
    /// Matrices supplied by the caller, e.g. a deliberately broken set.
    Custom,
}

impl RepKind {
    pub fn label(&self) -> &'static str {
        match self {
            RepKind::Original => "original",
            RepKind::Convenient => "convenient",
            RepKind::Custom => "custom",
        }
    }
}

/// Sign in front of `i` when solving for `A` and `C` from `B₄`, `B₅`.
///
/// `Minus` is the printed convention `B₅ = -(i/2)(A/a - C/b)`, which gives
/// `A = a(B₄ + iB₅)` and `C = b(B₄ - iB₅)`. `Plus` flips both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ISign {
    #[default]
    Minus,
    Plus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiracRep {
    pub kind: RepKind,
    pub b: [Matrix4; 5],
    pub a: ExactComplex,
    pub b_param: ExactComplex,
    pub a_mat: Matrix4,
    pub c_mat: Matrix4,
    pub sign: ISign,
}

impl DiracRep {
    /// Builds `A` and `C` from five given `B` matrices and the constant `a`,
    /// with `b = -1/(2a)`. The `B` matrices are not checked.
    pub fn from_matrices(
        kind: RepKind,
        b: [Matrix4; 5],
        a: ExactComplex,
        sign: ISign,
    ) -> Result<Self, AlgebraError> {
        let two_a_inv = (ExactComplex::from(2) * a).inv().ok_or(AlgebraError::ZeroA)?;
        let b_param = -two_a_inv;
        let i = match sign {
            ISign::Minus => ExactComplex::I,
            ISign::Plus => -ExactComplex::I,
        };
        let i_b5 = b[4].scale(i);
        let a_mat = (b[3] + i_b5).scale(a);
        let c_mat = (b[3] - i_b5).scale(b_param);
        Ok(Self {
            kind,
            b,
            a,
            b_param,
            a_mat,
            c_mat,
            sign,
        })
    }

    pub fn b_matrix(&self, mu: usize) -> &Matrix4 {
        &self.b[mu - 1]
    }
}

fn first_four(kind: RepKind) -> [Matrix4; 4] {
    let [s1, s2, s3] = sigmas();
    let id = Matrix2::identity();
    match kind {
        RepKind::Original => [kron(&s1, &s1), kron(&s1, &s2), kron(&s1, &s3), kron(&s3, &id)],
        RepKind::Convenient | RepKind::Custom => {
            [kron(&s3, &s1), kron(&s3, &s2), kron(&s3, &s3), kron(&s1, &id)]
        }
    }
}

/// The Dirac set of the given kind with `B₅ = B₁B₂B₃B₄`, and `A`, `C` for
/// the constant `a` (printed sign convention).
pub fn dirac_rep(kind: RepKind, a: ExactComplex) -> Result<DiracRep, AlgebraError> {
    dirac_rep_with_sign(kind, a, ISign::Minus)
}

pub fn dirac_rep_with_sign(
    kind: RepKind,
    a: ExactComplex,
    sign: ISign,
) -> Result<DiracRep, AlgebraError> {
    if kind == RepKind::Custom {
        return Err(AlgebraError::CustomKind);
    }
    if a.is_zero() {
        return Err(AlgebraError::ZeroA);
    }
    let four = first_four(kind);
    let b5 = fifth_matrix(&four)?;
    let b = [four[0], four[1], four[2], four[3], b5];
    DiracRep::from_matrices(kind, b, a, sign)
}

/// `B₁B₂B₃B₄`, after checking the four inputs pairwise anticommute to `2δI`.
pub fn fifth_matrix(b: &[Matrix4; 4]) -> Result<Matrix4, AlgebraError> {
    let report = pairwise_report("input set", b);
    if let Some(bad) = report.failures().next() {
        return Err(AlgebraError::NotDiracSet(bad.name.clone()));
    }
    Ok(b[0] * b[1] * b[2] * b[3])
}

fn pairwise_report(title: &str, b: &[Matrix4]) -> ConditionReport {
    let mut report = ConditionReport::new(title);
    let two = ExactComplex::from(2);
    for mu in 0..b.len() {
        for nu in mu..b.len() {
            let target = if mu == nu {
                Matrix4::scalar(two)
            } else {
                Matrix4::zero()
            };
            report.push_exact(
                format!("{{B{},B{}}} = {}", mu + 1, nu + 1, if mu == nu { "2I" } else { "0" }),
                anticommutator(&b[mu], &b[nu]) - target,
            );
        }
    }
    report
}

/// All 15 unordered pairs `{B_μ, B_ν} = 2δ_μν I`.
pub fn check_dirac_algebra(b: &[Matrix4; 5]) -> ConditionReport {
    pairwise_report("Dirac algebra", b)
}

/// The coefficient conditions that make `θ² = p² - 2mE`.
///
/// The singularity of `A` and `C` is listed as informational rows.
pub fn check_linearization_conditions(rep: &DiracRep) -> ConditionReport {
    let mut report = ConditionReport::new(format!(
        "linearization conditions ({}, a = {}, b = {})",
        rep.kind.label(),
        rep.a,
        rep.b_param
    ));
    let (a, c) = (&rep.a_mat, &rep.c_mat);
    let two = ExactComplex::from(2);
    report.push_exact("A^2 = 0", *a * *a);
    report.push_exact("C^2 = 0", *c * *c);
    report.push_exact("AC + CA = -2I", anticommutator(a, c) + Matrix4::scalar(two));
    for i in 0..3 {
        report.push_exact(format!("{{A,B{}}} = 0", i + 1), anticommutator(a, &rep.b[i]));
    }
    for i in 0..3 {
        report.push_exact(format!("{{C,B{}}} = 0", i + 1), anticommutator(c, &rep.b[i]));
    }
    for i in 0..3 {
        for j in i..3 {
            let target = if i == j {
                Matrix4::scalar(two)
            } else {
                Matrix4::zero()
            };
            report.push_exact(
                format!("{{B{},B{}}} = {}", i + 1, j + 1, if i == j { "2I" } else { "0" }),
                anticommutator(&rep.b[i], &rep.b[j]) - target,
            );
        }
    }
    let det_a = a.determinant();
    let det_c = c.determinant();
    report.push_info("det A = 0", det_a.is_zero(), Residual::Scalar(det_a));
    report.push_info("det C = 0", det_c.is_zero(), Residual::Scalar(det_c));
    report
}

/// Plane-wave symbol `θ(k, ω) = (A/c) ħω + B_i ħk_i + m c C`.
pub fn theta_symbol(rep: &DiracRep, k: [f64; 3], omega: f64, mass: f64) -> FMatrix4<Complex64> {
    let mut theta = rep.a_mat.to_complex64() * Complex64::from(HBAR * omega / C_LIGHT);
    for (b, &ki) in rep.b.iter().zip(&k) {
        theta += b.to_complex64() * Complex64::from(HBAR * ki);
    }
    theta + rep.c_mat.to_complex64() * Complex64::from(mass * C_LIGHT)
}

/// Max entrywise `|θ² - (ħ²k² - 2mħω) I|`.
pub fn symbol_square_residual(rep: &DiracRep, k: [f64; 3], omega: f64, mass: f64) -> f64 {
    let theta = theta_symbol(rep, k, omega, mass);
    let k2: f64 = k.iter().map(|x| x * x).sum();
    let target = FMatrix4::<Complex64>::identity()
        * Complex64::from(HBAR * HBAR * k2 - 2.0 * mass * HBAR * omega);
    (theta * theta - target)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

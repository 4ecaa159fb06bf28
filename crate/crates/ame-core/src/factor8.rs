//! Six-gate decomposition of 4x4 matrices: one two-site gate per site pair,
//! in the fixed product order A~34 A~24 A~23 A~14 A~13 A~12 (the pair (1,2)
//! gate applied first), with the cofactor-based closed-form solution and its
//! six solubility conditions.

use thiserror::Error;

use crate::field::Field;
use crate::matrix::{CofactorTable, FFMatrix, MatrixError, Minor};

/// The six site pairs in application order (first applied first).
pub const PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Factor8Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("matrix is not superregular: vanishing minor at {0}")]
    NotSuperregular(Minor),
    #[error("condition {0} = 0 fails; no decomposition in this gate order")]
    ConditionFailed(&'static str),
}

/// One solubility condition: the named quantity must be nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub label: &'static str,
    /// The quantity that must not vanish (a difference of weighted minors or
    /// a minor itself).
    pub value: u32,
    pub holds: bool,
    /// The last three conditions follow from superregularity alone.
    pub implied_by_superregularity: bool,
}

/// All six conditions, evaluated before any division takes place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.holds)
    }
}

/// Evaluate the six conditions of the closed-form solution on a 4x4 matrix.
pub fn conditions8(g: &FFMatrix) -> Result<ConditionReport, Factor8Error> {
    let table = g.cofactors()?;
    Ok(conditions_from_table(g.field(), &table))
}

fn conditions_from_table(f: &Field, t: &CofactorTable) -> ConditionReport {
    let gap12 = f.sub(t.weighted_minor(1, 1), t.weighted_minor(1, 2));
    let gap34 = f.sub(t.weighted_minor(4, 4), t.weighted_minor(3, 4));
    let alternating = f.add(
        f.sub(t.weighted_minor(2, 4), t.weighted_minor(3, 4)),
        t.weighted_minor(4, 4),
    );
    let n12 = t.pair_det(1, 2);
    let n34 = t.pair_det(3, 4);
    let m11 = t.minor(1, 1);
    let cond = |label, value: u32, implied| Condition {
        label,
        value,
        holds: value != 0,
        implied_by_superregularity: implied,
    };
    ConditionReport {
        conditions: vec![
            cond("M11 - M12", gap12, false),
            cond("M44 - M34", gap34, false),
            cond("M24 - M34 + M44", alternating, false),
            cond("N12", n12, true),
            cond("N34", n34, true),
            cond("m11", m11, true),
        ],
    }
}

/// The six 2x2 gates of a k = 8 decomposition, keyed by site pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition8 {
    source: FFMatrix,
    gates: Vec<FFMatrix>,
    conditions: ConditionReport,
}

impl Decomposition8 {
    pub fn source(&self) -> &FFMatrix {
        &self.source
    }

    pub fn field(&self) -> &Field {
        self.source.field()
    }

    pub fn conditions(&self) -> &ConditionReport {
        &self.conditions
    }

    /// Gate for the pair (j, k), 1-based with j < k.
    pub fn gate(&self, pair: (usize, usize)) -> &FFMatrix {
        let idx = PAIRS.iter().position(|&p| p == pair).expect("valid pair");
        &self.gates[idx]
    }

    /// Gates with their pairs, in application order.
    pub fn gates(&self) -> impl Iterator<Item = ((usize, usize), &FFMatrix)> {
        PAIRS.iter().copied().zip(self.gates.iter())
    }

    /// The ordered embedded product A~34 A~24 A~23 A~14 A~13 A~12.
    pub fn recompose(&self) -> FFMatrix {
        let mut product = FFMatrix::identity(self.field().clone(), 4);
        // rightmost factor is the first pair, so multiply in reverse order
        for (pair, gate) in PAIRS.iter().rev().zip(self.gates.iter().rev()) {
            let embedded = FFMatrix::embed8(gate, *pair).expect("2x2 gate");
            product = product.mul(&embedded).unwrap();
        }
        product
    }

    /// True when the embedded product reproduces the source exactly.
    pub fn verified(&self) -> bool {
        self.recompose() == self.source
    }

    /// Superregularity flag per gate, in application order.
    pub fn gate_perfection_report(&self) -> Vec<((usize, usize), bool)> {
        self.gates()
            .map(|(pair, gate)| (pair, gate.all_minors_nonzero().unwrap_or(false)))
            .collect()
    }

    /// Pairs whose gate is the identity (droppable from a circuit).
    pub fn identity_gates(&self) -> Vec<(usize, usize)> {
        let id = FFMatrix::identity(self.field().clone(), 2);
        self.gates()
            .filter(|(_, gate)| **gate == id)
            .map(|(pair, _)| pair)
            .collect()
    }

    /// Construct from explicit gates (used by the JSON reader); the
    /// conditions are re-evaluated from the source.
    pub fn from_gates(source: FFMatrix, gates: Vec<FFMatrix>) -> Result<Self, Factor8Error> {
        if gates.len() != 6 {
            return Err(MatrixError::DataLength(gates.len(), 6, 1).into());
        }
        let conditions = conditions8(&source)?;
        Ok(Decomposition8 {
            source,
            gates,
            conditions,
        })
    }
}

/// Factor a superregular 4x4 matrix whose six conditions all hold.
pub fn factor8(g: &FFMatrix) -> Result<Decomposition8, Factor8Error> {
    if g.rows() != 4 || g.cols() != 4 {
        return Err(MatrixError::NotSquareOfSize(4, g.rows(), g.cols()).into());
    }
    if let Some(minor) = g.first_vanishing_minor()? {
        return Err(Factor8Error::NotSuperregular(minor));
    }
    let f = g.field().clone();
    let t = g.cofactors()?;
    let report = conditions_from_table(&f, &t);
    if let Some(failed) = report.first_failure() {
        return Err(Factor8Error::ConditionFailed(failed.label));
    }

    let e = |i: usize, j: usize| g.get(i - 1, j - 1);
    let mul = |a, b| f.mul(a, b);
    let sub = |a, b| f.sub(a, b);
    // every denominator is one of the six condition values or g11
    let div = |a: u32, b: u32| mul(a, f.inv(b).expect("condition checked"));
    let gap12 = sub(t.weighted_minor(1, 1), t.weighted_minor(1, 2));
    let gap34 = sub(t.weighted_minor(4, 4), t.weighted_minor(3, 4));
    let alternating = f.add(
        sub(t.weighted_minor(2, 4), t.weighted_minor(3, 4)),
        t.weighted_minor(4, 4),
    );
    let (n12, n34, m11) = (t.pair_det(1, 2), t.pair_det(3, 4), t.minor(1, 1));

    let a12 = [
        1,
        div(e(1, 2), e(1, 1)),
        div(t.minor(1, 2), m11),
        1,
    ];
    let a13 = [
        1,
        div(e(1, 3), e(1, 1)),
        div(mul(t.minor(1, 3), e(1, 1)), f.neg(gap12)),
        1,
    ];
    let a14 = [
        e(1, 1),
        e(1, 4),
        div(mul(e(1, 1), t.minor(1, 4)), alternating),
        1,
    ];
    let a23_12_num = mul(
        gap12,
        sub(mul(e(2, 3), alternating), mul(mul(e(1, 3), e(2, 4)), t.minor(1, 4))),
    );
    let a23_12_den = mul(mul(n12, alternating), m11);
    let a23_21_num = {
        let s1 = sub(
            mul(mul(e(1, 1), e(3, 2)), e(4, 4)),
            mul(mul(e(1, 2), e(3, 1)), e(4, 4)),
        );
        let s2 = sub(
            mul(mul(e(1, 2), e(3, 4)), e(4, 1)),
            mul(mul(e(1, 1), e(3, 4)), e(4, 2)),
        );
        mul(m11, f.add(s1, s2))
    };
    let a23 = [
        1,
        div(a23_12_num, a23_12_den),
        div(a23_21_num, mul(n34, gap12)),
        1,
    ];
    let a24 = [
        div(mul(m11, n12), gap12),
        e(2, 4),
        div(
            f.neg(mul(mul(m11, t.minor(2, 4)), n12)),
            mul(gap12, gap34),
        ),
        1,
    ];
    let a34 = [
        div(mul(n34, t.minor(4, 4)), gap34),
        e(3, 4),
        div(mul(n34, t.minor(3, 4)), gap34),
        e(4, 4),
    ];

    let gate = |d: [u32; 4]| FFMatrix::new(f.clone(), 2, 2, d.to_vec()).unwrap();
    Ok(Decomposition8 {
        source: g.clone(),
        gates: vec![
            gate(a12),
            gate(a13),
            gate(a14),
            gate(a23),
            gate(a24),
            gate(a34),
        ],
        conditions: report,
    })
}

/// Recomposition check for an arbitrary decomposition value.
pub fn verify8(d: &Decomposition8) -> bool {
    d.verified()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn gf7_example1() -> FFMatrix {
        let f7 = Field::prime(7).unwrap();
        FFMatrix::from_ints(
            f7,
            &[
                vec![1, 1, 1, 1],
                vec![1, 2, 3, 5],
                vec![1, 3, 2, 6],
                vec![1, 6, 5, 4],
            ],
        )
        .unwrap()
    }

    fn gate(f: &Field, d: [u32; 4]) -> FFMatrix {
        FFMatrix::new(f.clone(), 2, 2, d.to_vec()).unwrap()
    }

    #[test]
    fn gf7_example1_gates_and_roundtrip() {
        let g = gf7_example1();
        let f = g.field().clone();
        let d = factor8(&g).unwrap();
        assert_eq!(*d.gate((1, 2)), gate(&f, [1, 1, 6, 1]));
        assert_eq!(*d.gate((1, 3)), gate(&f, [1, 1, 6, 1]));
        assert_eq!(*d.gate((1, 4)), gate(&f, [1, 1, 5, 1]));
        assert_eq!(*d.gate((2, 3)), gate(&f, [1, 5, 4, 1]));
        assert_eq!(*d.gate((2, 4)), gate(&f, [4, 5, 3, 1]));
        assert_eq!(*d.gate((3, 4)), gate(&f, [1, 6, 2, 4]));
        assert!(verify8(&d));
        assert!(d
            .gate_perfection_report()
            .iter()
            .all(|&(_, perfect)| perfect));
        assert!(d.identity_gates().is_empty());
    }

    #[test]
    fn gf7_example2_has_identity_middle_gate() {
        let f7 = Field::prime(7).unwrap();
        let g = FFMatrix::from_ints(
            f7.clone(),
            &[
                vec![1, 1, 1, 1],
                vec![1, 3, 4, 5],
                vec![1, 4, 5, 3],
                vec![1, 5, 3, 4],
            ],
        )
        .unwrap();
        let d = factor8(&g).unwrap();
        assert_eq!(*d.gate((2, 3)), FFMatrix::identity(f7, 2));
        assert!(verify8(&d));
        let imperfect: Vec<_> = d
            .gate_perfection_report()
            .into_iter()
            .filter(|&(_, p)| !p)
            .map(|(pair, _)| pair)
            .collect();
        assert_eq!(imperfect, vec![(2, 3)]);
        assert_eq!(d.identity_gates(), vec![(2, 3)]);
    }

    #[test]
    fn gf8_cauchy_example() {
        let f8 = Field::new(2, 3, None).unwrap();
        let g = FFMatrix::cauchy(&f8, &[0, 6, 1, 4], &[5, 7, 3, 2]).unwrap();
        let d = factor8(&g).unwrap();
        assert_eq!(*d.gate((1, 2)), gate(&f8, [1, 2, 3, 1]));
        assert_eq!(*d.gate((1, 3)), gate(&f8, [1, 3, 5, 1]));
        assert_eq!(*d.gate((1, 4)), gate(&f8, [2, 5, 5, 1]));
        assert_eq!(*d.gate((2, 3)), gate(&f8, [1, 6, 6, 1]));
        assert_eq!(*d.gate((2, 4)), gate(&f8, [5, 7, 5, 1]));
        assert_eq!(*d.gate((3, 4)), gate(&f8, [1, 6, 6, 3]));
        assert!(verify8(&d));
    }

    #[test]
    fn gf11_example4_and_permuted_failure() {
        let f11 = Field::prime(11).unwrap();
        let g = FFMatrix::from_ints(
            f11.clone(),
            &[
                vec![1, 1, 1, 1],
                vec![1, 2, 3, 4],
                vec![1, 3, 2, 9],
                vec![1, 7, 8, 5],
            ],
        )
        .unwrap();
        let d = factor8(&g).unwrap();
        assert_eq!(*d.gate((2, 3)), gate(&f11, [1, 8, 0, 1]));
        assert!(verify8(&d));
        let imperfect: Vec<_> = d
            .gate_perfection_report()
            .into_iter()
            .filter(|&(_, p)| !p)
            .map(|(pair, _)| pair)
            .collect();
        assert_eq!(imperfect, vec![(2, 3)]);
        // not the identity this time
        assert!(d.identity_gates().is_empty());

        // moving the last row to the top keeps superregularity but breaks
        // the M34 != M44 condition (both weighted minors equal 10)
        let gp = g.permute_rows(&[3, 0, 1, 2]).unwrap();
        assert!(gp.all_minors_nonzero().unwrap());
        let t = gp.cofactors().unwrap();
        assert_eq!(t.weighted_minor(3, 4), 10);
        assert_eq!(t.weighted_minor(4, 4), 10);
        assert_eq!(
            factor8(&gp).unwrap_err(),
            Factor8Error::ConditionFailed("M44 - M34")
        );
        let report = conditions8(&gp).unwrap();
        assert!(!report.all_hold());
        assert_eq!(report.first_failure().unwrap().label, "M44 - M34");
    }

    #[test]
    fn identity_conditions_hold() {
        let f7 = Field::prime(7).unwrap();
        let id = FFMatrix::identity(f7, 4);
        let report = conditions8(&id).unwrap();
        // M11 = 1, M12 = 0, N12 = 1, m11 = 1
        assert!(report.all_hold());
        assert_eq!(report.conditions[0].value, 1);
        assert_eq!(report.conditions[3].value, 1);
        assert_eq!(report.conditions[5].value, 1);
        // but the identity is not superregular, so factor8 refuses it
        assert!(matches!(
            factor8(&id).unwrap_err(),
            Factor8Error::NotSuperregular(_)
        ));
    }

    #[test]
    fn perturbed_gate_breaks_verification() {
        let g = gf7_example1();
        let d = factor8(&g).unwrap();
        let mut gates: Vec<FFMatrix> = d.gates().map(|(_, g)| g.clone()).collect();
        let f = g.field();
        let old = gates[0].get(0, 1);
        gates[0].set(0, 1, f.add(old, 1));
        let tampered = Decomposition8::from_gates(g.clone(), gates).unwrap();
        assert!(!verify8(&tampered));
    }

    #[test]
    fn identity_gates_identity_source() {
        let f7 = Field::prime(7).unwrap();
        let id4 = FFMatrix::identity(f7.clone(), 4);
        let id2 = FFMatrix::identity(f7, 2);
        let d = Decomposition8::from_gates(id4, vec![id2.clone(); 6]).unwrap();
        assert!(verify8(&d));
    }
}

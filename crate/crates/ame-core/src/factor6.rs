//! Closed-form decompositions of 3x3 superregular matrices into three 2x2
//! gates, the solubility conditions, gauge transformations, and the
//! Yang-Baxter family.
//!
//! A forward decomposition writes G as the matrix product C~ B~ A~ of the
//! three embeddings from [`FFMatrix::embed6`] (A applied first). A backward
//! decomposition is the factorization with the opposite operator order. Its
//! gates are reported in the reflected site frame: they equal the forward
//! gates of the index-reversed matrix with the roles of A and C exchanged,
//! which is also how the closed-form entries below are normalized
//! (c11 = c22 = b22 = 1, b11 = g33, b12 = g31). Conjugating each gate by the
//! two-site swap returns them to the plain frame, which is what
//! [`Decomposition6::recompose`] does for verification.

use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::matrix::{FFMatrix, MatrixError, Minor, Slot};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Factor6Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("matrix is not superregular: vanishing minor at {0}")]
    NotSuperregular(Minor),
    #[error("{0:?} condition evaluates to zero; no {0:?} decomposition exists")]
    ConditionZero(Direction),
    #[error("gauge scale factors must be nonzero")]
    ZeroGauge,
    #[error("Yang-Baxter construction requires a21 != 0 and c12 != 0")]
    YbPivotZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// g11 g22 g33 + g12 g23 g31 - g11 g23 g32 - g12 g21 g33; a forward
/// decomposition exists for superregular G exactly when this is nonzero.
pub fn forward_condition(g: &FFMatrix) -> Result<FieldElement, Factor6Error> {
    let f = check3(g)?;
    let code = condition_code(g, [(0, 0, 1, 1, 2, 2), (0, 1, 1, 2, 2, 0)],
                              [(0, 0, 1, 2, 2, 1), (0, 1, 1, 0, 2, 2)]);
    Ok(f.element(code).unwrap())
}

/// g11 g22 g33 + g13 g21 g32 - g11 g23 g32 - g12 g21 g33; the analogous
/// obstruction for the backward decomposition.
pub fn backward_condition(g: &FFMatrix) -> Result<FieldElement, Factor6Error> {
    let f = check3(g)?;
    let code = condition_code(g, [(0, 0, 1, 1, 2, 2), (0, 2, 1, 0, 2, 1)],
                              [(0, 0, 1, 2, 2, 1), (0, 1, 1, 0, 2, 2)]);
    Ok(f.element(code).unwrap())
}

type Triple = (usize, usize, usize, usize, usize, usize);

fn condition_code(g: &FFMatrix, plus: [Triple; 2], minus: [Triple; 2]) -> u32 {
    let f = g.field();
    let term = |(r1, c1, r2, c2, r3, c3): Triple| {
        f.mul(f.mul(g.get(r1, c1), g.get(r2, c2)), g.get(r3, c3))
    };
    let pos = f.add(term(plus[0]), term(plus[1]));
    let neg = f.add(term(minus[0]), term(minus[1]));
    f.sub(pos, neg)
}

fn check3(g: &FFMatrix) -> Result<Field, Factor6Error> {
    if g.rows() != 3 || g.cols() != 3 {
        return Err(MatrixError::NotSquareOfSize(3, g.rows(), g.cols()).into());
    }
    Ok(g.field().clone())
}

/// A factorization of a 3x3 matrix into three 2x2 gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition6 {
    source: FFMatrix,
    direction: Direction,
    a: FFMatrix,
    b: FFMatrix,
    c: FFMatrix,
    /// Cumulative gauge scales (e1, e3) relative to the canonical solution.
    gauge: (u32, u32),
    condition_value: u32,
}

impl Decomposition6 {
    pub fn source(&self) -> &FFMatrix {
        &self.source
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn gate_a(&self) -> &FFMatrix {
        &self.a
    }

    pub fn gate_b(&self) -> &FFMatrix {
        &self.b
    }

    pub fn gate_c(&self) -> &FFMatrix {
        &self.c
    }

    pub fn gauge(&self) -> (u32, u32) {
        self.gauge
    }

    pub fn condition_value(&self) -> u32 {
        self.condition_value
    }

    pub fn field(&self) -> &Field {
        self.source.field()
    }

    /// Rebuild the 3x3 matrix from the gates.
    pub fn recompose(&self) -> FFMatrix {
        match self.direction {
            Direction::Forward => compose_forward(&self.a, &self.b, &self.c),
            Direction::Backward => {
                // gates are stated in the reflected frame; swap-conjugate back
                compose_backward(&swap_conj(&self.a), &swap_conj(&self.b), &swap_conj(&self.c))
            }
        }
    }

    /// True when the recomposition reproduces the source exactly.
    pub fn verified(&self) -> bool {
        self.recompose() == self.source
    }

    /// All gate entries nonzero and all gates nonsingular.
    pub fn gates_perfect(&self) -> bool {
        [&self.a, &self.b, &self.c]
            .iter()
            .all(|gate| gate.all_minors_nonzero().unwrap_or(false))
    }

    /// Rescale the factors by the diagonal gauge matrices with parameters
    /// e1 and e3; the recomposition is unchanged.
    pub fn gauge_transform(&self, e1: u32, e3: u32) -> Result<Decomposition6, Factor6Error> {
        let f = self.field().clone();
        if e1 == 0 || e3 == 0 || e1 >= f.order() || e3 >= f.order() {
            return Err(Factor6Error::ZeroGauge);
        }
        let e1_inv = f.inv(e1).unwrap();
        let e3_inv = f.inv(e3).unwrap();
        let scale_row1 = |m: &FFMatrix, s: u32| {
            let mut out = m.clone();
            out.set(0, 0, f.mul(m.get(0, 0), s));
            out.set(0, 1, f.mul(m.get(0, 1), s));
            out
        };
        let scale_col2 = |m: &FFMatrix, s: u32| {
            let mut out = m.clone();
            out.set(0, 1, f.mul(m.get(0, 1), s));
            out.set(1, 1, f.mul(m.get(1, 1), s));
            out
        };
        let scale_b = |m: &FFMatrix| {
            let mut out = m.clone();
            out.set(0, 0, f.mul(m.get(0, 0), e1));
            out.set(1, 0, f.mul(f.mul(m.get(1, 0), e1), e3_inv));
            out.set(1, 1, f.mul(m.get(1, 1), e3_inv));
            out
        };
        // the slot determines the rule: the A-slot gate loses e1 on its first
        // row, the C-slot gate gains e3 on its second column
        let (a, b, c) = match self.direction {
            Direction::Forward => (
                scale_row1(&self.a, e1_inv),
                scale_b(&self.b),
                scale_col2(&self.c, e3),
            ),
            Direction::Backward => (
                scale_col2(&self.a, e3),
                scale_b(&self.b),
                scale_row1(&self.c, e1_inv),
            ),
        };
        Ok(Decomposition6 {
            source: self.source.clone(),
            direction: self.direction,
            a,
            b,
            c,
            gauge: (f.mul(self.gauge.0, e1), f.mul(self.gauge.1, e3)),
            condition_value: self.condition_value,
        })
    }
}

/// Matrix product C~ B~ A~ of plainly embedded gates (A applied first).
pub fn compose_forward(a: &FFMatrix, b: &FFMatrix, c: &FFMatrix) -> FFMatrix {
    let ea = FFMatrix::embed6(a, Slot::A).expect("2x2 gate");
    let eb = FFMatrix::embed6(b, Slot::B).expect("2x2 gate");
    let ec = FFMatrix::embed6(c, Slot::C).expect("2x2 gate");
    ec.mul(&eb).unwrap().mul(&ea).unwrap()
}

/// Matrix product A~ B~ C~ of plainly embedded gates (C applied first).
pub fn compose_backward(a: &FFMatrix, b: &FFMatrix, c: &FFMatrix) -> FFMatrix {
    let ea = FFMatrix::embed6(a, Slot::A).expect("2x2 gate");
    let eb = FFMatrix::embed6(b, Slot::B).expect("2x2 gate");
    let ec = FFMatrix::embed6(c, Slot::C).expect("2x2 gate");
    ea.mul(&eb).unwrap().mul(&ec).unwrap()
}

/// Conjugate a 2x2 gate by the swap of its two sites (reverses rows and
/// columns).
fn swap_conj(gate: &FFMatrix) -> FFMatrix {
    gate.reversed()
}

fn require_superregular(g: &FFMatrix) -> Result<(), Factor6Error> {
    if let Some(minor) = g.first_vanishing_minor()? {
        return Err(Factor6Error::NotSuperregular(minor));
    }
    Ok(())
}

/// Forward decomposition of a superregular 3x3 matrix in the canonical gauge
/// a11 = a22 = b22 = 1. Fails with [`Factor6Error::ConditionZero`] exactly
/// when [`forward_condition`] vanishes.
pub fn factor_forward(g: &FFMatrix) -> Result<Decomposition6, Factor6Error> {
    let f = check3(g)?;
    require_superregular(g)?;
    let key = forward_condition(g)?.code();
    if key == 0 {
        return Err(Factor6Error::ConditionZero(Direction::Forward));
    }
    let e = |i: usize, j: usize| g.get(i - 1, j - 1);
    let mul = |a, b| f.mul(a, b);
    let sub = |a, b| f.sub(a, b);
    // all denominators below are minors of the superregular G, or the key
    // condition itself
    let div = |a: u32, b: u32| mul(a, f.inv(b).expect("superregular minor"));
    let m2233 = sub(mul(e(2, 2), e(3, 3)), mul(e(2, 3), e(3, 2)));

    let a12 = div(e(1, 2), e(1, 1));
    let a21 = div(sub(mul(e(2, 1), e(3, 3)), mul(e(2, 3), e(3, 1))), m2233);
    let b11 = e(1, 1);
    let b12 = e(1, 3);
    let b21 = div(mul(e(1, 1), sub(mul(e(2, 2), e(3, 1)), mul(e(2, 1), e(3, 2)))), key);
    let c11 = div(mul(sub(mul(e(1, 1), e(2, 2)), mul(e(1, 2), e(2, 1))), m2233), key);
    let c12 = e(2, 3);
    let c21 = div(mul(sub(mul(e(1, 1), e(3, 2)), mul(e(1, 2), e(3, 1))), m2233), key);
    let c22 = e(3, 3);

    let gate = |d: [u32; 4]| FFMatrix::new(f.clone(), 2, 2, d.to_vec()).unwrap();
    Ok(Decomposition6 {
        source: g.clone(),
        direction: Direction::Forward,
        a: gate([1, a12, a21, 1]),
        b: gate([b11, b12, b21, 1]),
        c: gate([c11, c12, c21, c22]),
        gauge: (1, 1),
        condition_value: key,
    })
}

/// Backward decomposition of a superregular 3x3 matrix in the canonical gauge
/// c11 = c22 = b22 = 1 (so b11 = g33 and b12 = g31). Fails with
/// [`Factor6Error::ConditionZero`] exactly when [`backward_condition`]
/// vanishes.
pub fn factor_backward(g: &FFMatrix) -> Result<Decomposition6, Factor6Error> {
    let f = check3(g)?;
    require_superregular(g)?;
    let key = backward_condition(g)?.code();
    if key == 0 {
        return Err(Factor6Error::ConditionZero(Direction::Backward));
    }
    let e = |i: usize, j: usize| g.get(i - 1, j - 1);
    let mul = |a, b| f.mul(a, b);
    let sub = |a, b| f.sub(a, b);
    let div = |a: u32, b: u32| mul(a, f.inv(b).expect("superregular minor"));
    let m2233 = sub(mul(e(2, 2), e(3, 3)), mul(e(2, 3), e(3, 2)));
    let m1122 = sub(mul(e(1, 1), e(2, 2)), mul(e(1, 2), e(2, 1)));

    let a11 = div(mul(m2233, m1122), key);
    let a12 = e(2, 1);
    let a21 = div(mul(sub(mul(e(1, 2), e(3, 3)), mul(e(1, 3), e(3, 2))), m1122), key);
    let a22 = e(1, 1);
    let b11 = e(3, 3);
    let b12 = e(3, 1);
    let b21 = div(mul(e(3, 3), sub(mul(e(1, 3), e(2, 2)), mul(e(1, 2), e(2, 3)))), key);
    let c12 = div(e(3, 2), e(3, 3));
    let c21 = div(sub(mul(e(1, 1), e(2, 3)), mul(e(1, 3), e(2, 1))), m1122);

    let gate = |d: [u32; 4]| FFMatrix::new(f.clone(), 2, 2, d.to_vec()).unwrap();
    Ok(Decomposition6 {
        source: g.clone(),
        direction: Direction::Backward,
        a: gate([a11, a12, a21, a22]),
        b: gate([b11, b12, b21, 1]),
        c: gate([1, c12, c21, 1]),
        gauge: (1, 1),
        condition_value: key,
    })
}

/// True when the embedded products in both orders agree:
/// A~ B~ C~ = C~ B~ A~.
pub fn yb_check(a: &FFMatrix, b: &FFMatrix, c: &FFMatrix) -> bool {
    compose_forward(a, b, c) == compose_backward(a, b, c)
}

/// The eight free parameters of the Yang-Baxter family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YbFreeParams {
    pub a11: u32,
    pub a21: u32,
    pub b11: u32,
    pub b12: u32,
    pub b21: u32,
    pub b22: u32,
    pub c12: u32,
    pub c22: u32,
}

/// A gate triple satisfying the Yang-Baxter relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YangBaxterTriple {
    pub a: FFMatrix,
    pub b: FFMatrix,
    pub c: FFMatrix,
}

impl YangBaxterTriple {
    /// The common composite A~ B~ C~ = C~ B~ A~.
    pub fn composite(&self) -> FFMatrix {
        compose_forward(&self.a, &self.b, &self.c)
    }

    pub fn holds(&self) -> bool {
        yb_check(&self.a, &self.b, &self.c)
    }
}

/// Solve the Yang-Baxter coefficient system for the four dependent entries
/// a12, c21, a22, c11, given the free parameters with a21 and c12 nonzero.
pub fn yb_build(field: &Field, p: YbFreeParams) -> Result<YangBaxterTriple, Factor6Error> {
    let f = field;
    for v in [p.a11, p.a21, p.b11, p.b12, p.b21, p.b22, p.c12, p.c22] {
        if v >= f.order() {
            return Err(MatrixError::from(crate::field::FieldError::CodeOutOfRange {
                code: v as i64,
                order: f.order(),
            })
            .into());
        }
    }
    if p.a21 == 0 || p.c12 == 0 {
        return Err(Factor6Error::YbPivotZero);
    }
    let slack = f.sub(1, f.mul(p.a11, p.c22));
    let a12 = f.mul(f.div(p.b12, p.c12).unwrap(), slack);
    let c21 = f.mul(f.div(p.b21, p.a21).unwrap(), slack);
    let a22 = f.sub(p.b22, f.div(f.mul(f.mul(p.a21, p.b12), p.c22), p.c12).unwrap());
    let c11 = f.sub(p.b11, f.div(f.mul(f.mul(p.a11, p.b21), p.c12), p.a21).unwrap());
    let gate = |d: [u32; 4]| FFMatrix::new(f.clone(), 2, 2, d.to_vec()).unwrap();
    Ok(YangBaxterTriple {
        a: gate([p.a11, a12, p.a21, a22]),
        b: gate([p.b11, p.b12, p.b21, p.b22]),
        c: gate([c11, p.c12, c21, p.c22]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn gf5_example2() -> FFMatrix {
        let f5 = Field::prime(5).unwrap();
        FFMatrix::from_ints(f5, &[vec![1, 1, 1], vec![1, 2, -2], vec![1, -2, -1]]).unwrap()
    }

    fn gf4_vandermonde() -> FFMatrix {
        let f4 = Field::new(2, 2, None).unwrap();
        FFMatrix::new(f4, 3, 3, vec![1, 1, 1, 1, 2, 3, 1, 3, 2]).unwrap()
    }

    #[test]
    fn conditions_on_fixtures() {
        let g = gf5_example2();
        assert_eq!(forward_condition(&g).unwrap().code(), 3); // -7 mod 5
        assert_eq!(backward_condition(&g).unwrap().code(), 3);

        let v = gf4_vandermonde();
        assert_eq!(forward_condition(&v).unwrap().code(), 0);
        assert_eq!(backward_condition(&v).unwrap().code(), 0);

        let f5 = Field::prime(5).unwrap();
        let id = FFMatrix::identity(f5, 3);
        assert_eq!(forward_condition(&id).unwrap().code(), 1);
    }

    #[test]
    fn condition_matches_parametrized_product_over_gf7() {
        // rows 1, w, w^2 with w = 3: condition = w(1-w)(w^2+w-1)
        let f7 = Field::prime(7).unwrap();
        let w = 3u32;
        let w2 = f7.mul(w, w);
        let g = FFMatrix::new(f7.clone(), 3, 3, vec![1, 1, 1, 1, w, w2, 1, w2, w]).unwrap();
        let expect = f7.mul(
            f7.mul(w, f7.sub(1, w)),
            f7.sub(f7.add(w2, w), 1),
        );
        assert_eq!(forward_condition(&g).unwrap().code(), expect);
        assert_eq!(backward_condition(&g).unwrap().code(), expect);
    }

    #[test]
    fn forward_factorization_of_example2() {
        let g = gf5_example2();
        let d = factor_forward(&g).unwrap();
        assert_eq!(d.gate_a().codes(), &[1, 1, 4, 1]);
        assert_eq!(d.gate_b().codes(), &[1, 1, 3, 1]);
        assert_eq!(d.gate_c().codes(), &[3, 3, 1, 4]);
        assert!(d.verified());
        assert!(d.gates_perfect());
        // a12 = g12 / g11
        assert_eq!(d.gate_a().get(0, 1), g.field().div(g.get(0, 1), g.get(0, 0)).unwrap());
    }

    #[test]
    fn backward_factorization_of_example2() {
        let g = gf5_example2();
        let d = factor_backward(&g).unwrap();
        // b11 = g33, b12 = g31, canonical gauge ones
        assert_eq!(d.gate_b().get(0, 0), g.get(2, 2));
        assert_eq!(d.gate_b().get(0, 1), g.get(2, 0));
        assert_eq!(d.gate_b().get(1, 1), 1);
        assert_eq!(d.gate_c().get(0, 0), 1);
        assert_eq!(d.gate_c().get(1, 1), 1);
        assert_eq!(d.gate_a().get(0, 1), g.get(1, 0));
        assert_eq!(d.gate_a().get(1, 1), g.get(0, 0));
        assert!(d.verified());
        assert!(d.gates_perfect());
    }

    #[test]
    fn gf4_vandermonde_has_no_decomposition_either_way() {
        let v = gf4_vandermonde();
        assert!(v.all_minors_nonzero().unwrap());
        assert_eq!(
            factor_forward(&v).unwrap_err(),
            Factor6Error::ConditionZero(Direction::Forward)
        );
        assert_eq!(
            factor_backward(&v).unwrap_err(),
            Factor6Error::ConditionZero(Direction::Backward)
        );
    }

    #[test]
    fn non_superregular_input_is_identified() {
        let f5 = Field::prime(5).unwrap();
        let g = FFMatrix::from_ints(f5, &[vec![1, 1, 1], vec![1, 0, 3], vec![1, 3, 4]]).unwrap();
        match factor_forward(&g).unwrap_err() {
            Factor6Error::NotSuperregular(minor) => {
                assert_eq!(minor.rows, vec![1]);
                assert_eq!(minor.cols, vec![1]);
            }
            other => panic!("expected NotSuperregular, got {other:?}"),
        }
    }

    #[test]
    fn backward_equals_reflected_forward_with_a_c_exchanged() {
        let g = gf5_example2();
        let bwd = factor_backward(&g).unwrap();
        let fwd_reflected = factor_forward(&g.reversed()).unwrap();
        assert_eq!(bwd.gate_a(), fwd_reflected.gate_c());
        assert_eq!(bwd.gate_b(), fwd_reflected.gate_b());
        assert_eq!(bwd.gate_c(), fwd_reflected.gate_a());
    }

    #[test]
    fn gauge_transform_preserves_recomposition() {
        let g = gf5_example2();
        for dir in [factor_forward(&g).unwrap(), factor_backward(&g).unwrap()] {
            for e1 in 1..5 {
                for e3 in 1..5 {
                    let t = dir.gauge_transform(e1, e3).unwrap();
                    assert_eq!(t.recompose(), g, "gauge ({e1},{e3})");
                    // inverting the scales restores the original gates
                    let f = g.field();
                    let back = t
                        .gauge_transform(f.inv(e1).unwrap(), f.inv(e3).unwrap())
                        .unwrap();
                    assert_eq!(back, dir);
                }
            }
        }
        let d = factor_forward(&g).unwrap();
        assert_eq!(d.gauge_transform(1, 1).unwrap(), d);
        assert_eq!(d.gauge_transform(0, 2).unwrap_err(), Factor6Error::ZeroGauge);
    }

    #[test]
    fn yang_baxter_example3() {
        let f5 = Field::prime(5).unwrap();
        let gate = |d: [u32; 4]| FFMatrix::new(f5.clone(), 2, 2, d.to_vec()).unwrap();
        let (a, b, c) = (gate([3, 4, 3, 1]), gate([4, 1, 1, 3]), gate([3, 1, 3, 4]));
        assert!(yb_check(&a, &b, &c));
        let expect =
            FFMatrix::from_ints(f5.clone(), &[vec![2, 1, 1], vec![2, 2, 3], vec![1, 4, 2]])
                .unwrap();
        assert_eq!(compose_forward(&a, &b, &c), expect);
        assert_eq!(compose_backward(&a, &b, &c), expect);

        // the same triple from its free parameters
        let triple = yb_build(
            &f5,
            YbFreeParams {
                a11: 3,
                a21: 3,
                b11: 4,
                b12: 1,
                b21: 1,
                b22: 3,
                c12: 1,
                c22: 4,
            },
        )
        .unwrap();
        assert_eq!(triple.a, a);
        assert_eq!(triple.b, b);
        assert_eq!(triple.c, c);
        assert!(triple.holds());
    }

    #[test]
    fn yb_identity_triple_holds() {
        let f5 = Field::prime(5).unwrap();
        let id = FFMatrix::identity(f5, 2);
        assert!(yb_check(&id, &id, &id));
    }

    #[test]
    fn yb_unit_product_forces_offdiagonal_zeros() {
        // a11 * c22 = 1 makes the slack factor vanish: a12 = c21 = 0
        let f5 = Field::prime(5).unwrap();
        let triple = yb_build(
            &f5,
            YbFreeParams {
                a11: 2,
                a21: 1,
                b11: 1,
                b12: 1,
                b21: 1,
                b22: 1,
                c12: 1,
                c22: 3,
            },
        )
        .unwrap();
        assert_eq!(triple.a.get(0, 1), 0);
        assert_eq!(triple.c.get(1, 0), 0);
        assert!(triple.holds());
    }

    #[test]
    fn yb_rejects_zero_pivots() {
        let f5 = Field::prime(5).unwrap();
        let params = YbFreeParams {
            a11: 1,
            a21: 0,
            b11: 1,
            b12: 1,
            b21: 1,
            b22: 1,
            c12: 1,
            c22: 1,
        };
        assert_eq!(yb_build(&f5, params).unwrap_err(), Factor6Error::YbPivotZero);
    }
}

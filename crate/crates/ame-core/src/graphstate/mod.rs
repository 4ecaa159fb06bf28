//! Controlled-Z graph states over prime dimensions: incidence matrices, the
//! balanced-minor entanglement criterion, gate counting, and two-site circuit
//! plans for both the graph-state and the tensor-network constructions.

pub mod state;

pub use state::{StateVector, UniformityEntry, UniformityReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use itertools::Itertools;

use crate::factor6::{Decomposition6, Direction};
use crate::factor8::Decomposition8;
use crate::field::Field;
use crate::matrix::{FFMatrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("graph states here require a prime dimension, got order {0} = {1}^{2}")]
    NonPrimeDimension(u32, u32, u32),
    #[error("incidence matrix must be symmetric")]
    NotSymmetric,
    #[error("incidence matrix must have a zero diagonal")]
    NonzeroDiagonal,
    #[error("site count must be even, got {0}")]
    OddSiteCount(usize),
    #[error("state needs {0} amplitudes, above the cap {1}")]
    DimensionCap(u64, u64),
    #[error("state norm {0} deviates from 1 beyond the tolerance")]
    Unnormalized(f64),
    #[error("decomposition does not recompose to its source; refusing to plan a circuit")]
    UnverifiedDecomposition,
    #[error("site index {0} out of range 1..={1}")]
    BadSite(usize, usize),
    #[error("malformed circuit JSON: {0}")]
    Json(String),
}

/// Symmetric zero-diagonal weight matrix ell_{i,j} over a prime field; the
/// weighted graph defining a controlled-Z state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    l: FFMatrix,
}

impl IncidenceMatrix {
    pub fn new(l: FFMatrix) -> Result<Self, GraphError> {
        let field = l.field();
        if field.degree() != 1 {
            return Err(GraphError::NonPrimeDimension(
                field.order(),
                field.characteristic(),
                field.degree(),
            ));
        }
        if !l.is_square() {
            return Err(MatrixError::NotSquare(l.rows(), l.cols()).into());
        }
        let k = l.rows();
        for i in 0..k {
            if l.get(i, i) != 0 {
                return Err(GraphError::NonzeroDiagonal);
            }
            for j in 0..i {
                if l.get(i, j) != l.get(j, i) {
                    return Err(GraphError::NotSymmetric);
                }
            }
        }
        Ok(IncidenceMatrix { l })
    }

    /// Build from an edge-weight list over GF(p), 1-based site pairs.
    pub fn from_edges(
        field: Field,
        k: usize,
        edges: &[(usize, usize, u32)],
    ) -> Result<Self, GraphError> {
        let mut l = FFMatrix::zeros(field, k, k);
        for &(i, j, w) in edges {
            if i == 0 || i > k {
                return Err(GraphError::BadSite(i, k));
            }
            if j == 0 || j > k || i == j {
                return Err(GraphError::BadSite(j, k));
            }
            l.set(i - 1, j - 1, w);
            l.set(j - 1, i - 1, w);
        }
        IncidenceMatrix::new(l)
    }

    /// The block incidence matrix [[0, G^T], [G, 0]] of a linear map G over a
    /// prime field.
    pub fn block_incidence(g: &FFMatrix) -> Result<Self, GraphError> {
        if !g.is_square() {
            return Err(MatrixError::NotSquare(g.rows(), g.cols()).into());
        }
        let field = g.field();
        if field.degree() != 1 {
            return Err(GraphError::NonPrimeDimension(
                field.order(),
                field.characteristic(),
                field.degree(),
            ));
        }
        let m = g.rows();
        let mut l = FFMatrix::zeros(field.clone(), 2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                l.set(i, m + j, g.get(j, i)); // G^T block
                l.set(m + i, j, g.get(i, j)); // G block
            }
        }
        IncidenceMatrix::new(l)
    }

    pub fn matrix(&self) -> &FFMatrix {
        &self.l
    }

    pub fn sites(&self) -> usize {
        self.l.rows()
    }

    pub fn dimension(&self) -> u32 {
        self.l.field().order()
    }

    /// True when for every balanced bipartition (A, B) the submatrix with
    /// rows from A and columns from B has nonzero determinant; the state is
    /// then maximally entangled across every balanced cut.
    pub fn property1_check(&self) -> Result<bool, GraphError> {
        Ok(self.first_property1_failure()?.is_none())
    }

    /// The first balanced bipartition whose cross minor vanishes, if any.
    /// Only subsets containing site 1 are scanned; L is symmetric so the
    /// complementary minor is the transpose.
    pub fn first_property1_failure(&self) -> Result<Option<Vec<usize>>, GraphError> {
        let k = self.sites();
        if k % 2 != 0 {
            return Err(GraphError::OddSiteCount(k));
        }
        for rest in (1..k).combinations(k / 2 - 1) {
            let mut a = vec![0usize];
            a.extend(rest);
            let b: Vec<usize> = (0..k).filter(|i| !a.contains(i)).collect();
            if self.l.submatrix(&a, &b).det_code() == 0 {
                return Ok(Some(a.iter().map(|i| i + 1).collect()));
            }
        }
        Ok(None)
    }

    /// Number of two-site controlled-Z gates: the nonzero weights above the
    /// diagonal.
    pub fn gate_count(&self) -> usize {
        let k = self.sites();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.l.get(i, j) != 0)
            .count()
    }

    /// A column with at least k/2 off-diagonal zeros, together with the
    /// vanishing balanced minor it forces. Such a witness proves that no
    /// incidence matrix below the (k/2)^2 gate bound satisfies the
    /// balanced-minor criterion.
    pub fn lower_bound_witness(&self) -> Option<SparseColumnWitness> {
        let k = self.sites();
        for col in 0..k {
            let zero_rows: Vec<usize> = (0..k)
                .filter(|&r| r != col && self.l.get(r, col) == 0)
                .collect();
            if zero_rows.len() >= k / 2 {
                let rows: Vec<usize> = zero_rows[..k / 2].to_vec();
                let cols: Vec<usize> = (0..k).filter(|i| !rows.contains(i)).collect();
                debug_assert!(cols.contains(&col));
                debug_assert_eq!(self.l.submatrix(&rows, &cols).det_code(), 0);
                return Some(SparseColumnWitness {
                    column: col + 1,
                    rows: rows.iter().map(|r| r + 1).collect(),
                    cols: cols.iter().map(|c| c + 1).collect(),
                });
            }
        }
        None
    }

    /// Circuit plan applying one controlled-Z power per nonzero weight.
    pub fn graph_circuit(&self) -> CircuitPlan {
        let k = self.sites();
        let mut gates = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let w = self.l.get(i, j);
                if w != 0 {
                    gates.push(PlannedGate {
                        kind: GateKind::ControlledZ { power: w },
                        sites: (i + 1, j + 1),
                    });
                }
            }
        }
        CircuitPlan {
            d: self.dimension(),
            k,
            gates,
        }
    }
}

/// Minimum number of two-site gates any graph-state construction of a
/// k-site maximally entangled state needs.
pub fn min_gate_bound(k: usize) -> usize {
    (k / 2) * (k / 2)
}

/// A column sparse enough to force a vanishing balanced minor (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseColumnWitness {
    pub column: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// One two-site gate in a plan; sites are 1-based, application order is list
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedGate {
    pub kind: GateKind,
    pub sites: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// Turns |v>|v> into the maximally entangled pair (1/sqrt D) sum |a>|a>.
    BellPair,
    /// Permutation gate of a 2x2 field matrix acting on the site values.
    TwoSite { name: String, matrix: FFMatrix },
    /// Diagonal controlled-Z power.
    ControlledZ { power: u32 },
}

/// Ordered two-site gate list preparing a state from a product state.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitPlan {
    pub d: u32,
    pub k: usize,
    pub gates: Vec<PlannedGate>,
}

impl CircuitPlan {
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Gates that are identity matrices contribute nothing and may be
    /// dropped.
    pub fn droppable_identity_gates(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter(|g| match &g.kind {
                GateKind::TwoSite { matrix, .. } => {
                    *matrix == FFMatrix::identity(matrix.field().clone(), 2)
                }
                _ => false,
            })
            .map(|g| g.sites)
            .collect()
    }

    pub fn effective_gate_count(&self) -> usize {
        self.gate_count() - self.droppable_identity_gates().len()
    }

    pub fn to_json(&self) -> String {
        let record = CircuitRecord {
            d: self.d,
            k: self.k,
            gates: self
                .gates
                .iter()
                .map(|g| {
                    let (kind, name, matrix, power) = match &g.kind {
                        GateKind::BellPair => ("bell_pair", None, None, None),
                        GateKind::TwoSite { name, matrix } => (
                            "two_site_gate",
                            Some(name.clone()),
                            Some(matrix.to_rows()),
                            None,
                        ),
                        GateKind::ControlledZ { power } => ("controlled_z", None, None, Some(*power)),
                    };
                    GateRecord {
                        kind: kind.to_string(),
                        sites: [g.sites.0, g.sites.1],
                        name,
                        matrix,
                        power,
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&record).expect("serializable")
    }

    /// Parse the circuit JSON; two-site gate matrices are read over the given
    /// field (prime field of order d when omitted in the record).
    pub fn from_json(text: &str, field: Option<Field>) -> Result<Self, GraphError> {
        let record: CircuitRecord =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        let field = match field {
            Some(f) => f,
            None => Field::prime(record.d).map_err(|e| GraphError::Json(e.to_string()))?,
        };
        let mut gates = Vec::new();
        for g in record.gates {
            let kind = match g.kind.as_str() {
                "bell_pair" => GateKind::BellPair,
                "controlled_z" => GateKind::ControlledZ {
                    power: g.power.ok_or_else(|| GraphError::Json("missing power".into()))?,
                },
                "two_site_gate" => {
                    let rows = g
                        .matrix
                        .ok_or_else(|| GraphError::Json("missing matrix".into()))?;
                    let data: Vec<u32> = rows.iter().flatten().copied().collect();
                    let matrix = FFMatrix::new(field.clone(), 2, 2, data)
                        .map_err(|e| GraphError::Json(e.to_string()))?;
                    GateKind::TwoSite {
                        name: g.name.unwrap_or_default(),
                        matrix,
                    }
                }
                other => return Err(GraphError::Json(format!("unknown gate kind `{other}`"))),
            };
            gates.push(PlannedGate {
                kind,
                sites: (g.sites[0], g.sites[1]),
            });
        }
        Ok(CircuitPlan {
            d: record.d,
            k: record.k,
            gates,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    d: u32,
    k: usize,
    gates: Vec<GateRecord>,
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    kind: String,
    sites: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    power: Option<u32>,
}

/// Six-gate plan for a verified k = 6 decomposition: three Bell pairs
/// (site i with i + 3), then the factor gates in application order.
pub fn tensor_network_circuit6(d: &Decomposition6) -> Result<CircuitPlan, GraphError> {
    if !d.verified() {
        return Err(GraphError::UnverifiedDecomposition);
    }
    let mut gates = vec![
        PlannedGate {
            kind: GateKind::BellPair,
            sites: (1, 4),
        },
        PlannedGate {
            kind: GateKind::BellPair,
            sites: (2, 5),
        },
        PlannedGate {
            kind: GateKind::BellPair,
            sites: (3, 6),
        },
    ];
    let two_site = |name: &str, matrix: FFMatrix, sites| PlannedGate {
        kind: GateKind::TwoSite {
            name: name.into(),
            matrix,
        },
        sites,
    };
    match d.direction() {
        Direction::Forward => {
            gates.push(two_site("A", d.gate_a().clone(), (1, 2)));
            gates.push(two_site("B", d.gate_b().clone(), (1, 3)));
            gates.push(two_site("C", d.gate_c().clone(), (2, 3)));
        }
        Direction::Backward => {
            // stored gates live in the reflected frame; emit plain-frame
            // matrices, C applied first
            gates.push(two_site("C", d.gate_c().reversed(), (2, 3)));
            gates.push(two_site("B", d.gate_b().reversed(), (1, 3)));
            gates.push(two_site("A", d.gate_a().reversed(), (1, 2)));
        }
    }
    Ok(CircuitPlan {
        d: d.field().order(),
        k: 6,
        gates,
    })
}

/// Ten-gate plan for a verified k = 8 decomposition: four Bell pairs
/// (site i with i + 4), then the six pair gates in application order.
pub fn tensor_network_circuit8(d: &Decomposition8) -> Result<CircuitPlan, GraphError> {
    if !d.verified() {
        return Err(GraphError::UnverifiedDecomposition);
    }
    let mut gates: Vec<PlannedGate> = (1..=4)
        .map(|i| PlannedGate {
            kind: GateKind::BellPair,
            sites: (i, i + 4),
        })
        .collect();
    for (pair, gate) in d.gates() {
        gates.push(PlannedGate {
            kind: GateKind::TwoSite {
                name: format!("A{}{}", pair.0, pair.1),
                matrix: gate.clone(),
            },
            sites: pair,
        });
    }
    Ok(CircuitPlan {
        d: d.field().order(),
        k: 8,
        gates,
    })
}

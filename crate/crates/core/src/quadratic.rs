//! Quadratic Lagrangians `ℒ = ½ a ẏẏ + b ẏ + c`, their Legendre map, the
//! σ-splitting of the kinetic matrix and the induced projectors.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::poly::{Polynomial, VarRole, VariableTable};
use crate::rational::{rat, Rational};

/// `ℒ = ½ aᵅᵝ ẏ_α ẏ_β + bᵅ ẏ_α + c` with constant symmetric `a`.
///
/// Composite indices are flattened as `α = λ·m + i`. For `n = 1` the
/// coefficients `b`, `c` may depend on `(t, q)`; for `n > 1` `b` must be constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticLagrangian {
    n: usize,
    m: usize,
    a: RatMatrix,
    b: Vec<Polynomial>,
    c: Polynomial,
    table: Arc<VariableTable>,
}

impl QuadraticLagrangian {
    pub fn new(n: usize, m: usize, a: RatMatrix, b: Vec<Polynomial>, c: Polynomial) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidConfig("n and m must be positive".into()));
        }
        let dim = n * m;
        if a.rows() != dim || a.cols() != dim {
            return Err(Error::DimensionMismatch {
                what: "kinetic matrix a",
                expected: dim,
                found: a.rows().max(a.cols()),
            });
        }
        a.check_symmetric()?;
        if b.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "vector b",
                expected: dim,
                found: b.len(),
            });
        }
        let table = if n == 1 {
            VariableTable::phase_space(m)
        } else {
            VariableTable::composite(n, m)
        };
        let momentum_free = |f: &Polynomial| {
            (0..table.len()).all(|i| {
                !matches!(table.role(i), VarRole::Momentum(_)) || !f.depends_on(i)
            })
        };
        for f in b.iter().chain(std::iter::once(&c)) {
            if **f.table() != *table {
                return Err(Error::TableMismatch);
            }
            if !momentum_free(f) {
                return Err(Error::InvalidConfig(
                    "b and c may depend only on t and q".into(),
                ));
            }
        }
        if n > 1 && b.iter().any(|f| !f.is_constant()) {
            return Err(Error::Unsupported(
                "field-theory coefficients b must be constant".into(),
            ));
        }
        Ok(Self {
            n,
            m,
            a,
            b,
            c,
            table,
        })
    }

    /// Mechanics (`n = 1`) with `b`, `c` given over the phase-space table.
    pub fn mechanics(a: RatMatrix, b: Vec<Polynomial>, c: Polynomial) -> Result<Self> {
        let m = a.rows();
        Self::new(1, m, a, b, c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Composite fibre dimension `n·m`.
    pub fn dim(&self) -> usize {
        self.n * self.m
    }

    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Polynomial] {
        &self.b
    }

    pub fn c(&self) -> &Polynomial {
        &self.c
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    /// Same Lagrangian with `b` replaced, e.g. by the corrected `b − R·b`.
    pub fn with_b(&self, b: Vec<Polynomial>) -> Result<Self> {
        Self::new(self.n, self.m, self.a.clone(), b, self.c.clone())
    }

    /// `ℒ(t, q, v)` for polynomial velocities `v` over any table containing `t, q`.
    pub fn lagrangian_at(&self, v: &[Polynomial]) -> Result<Polynomial> {
        let target = v
            .first()
            .map(|f| Arc::clone(f.table()))
            .ok_or(Error::DimensionMismatch {
                what: "velocity vector",
                expected: self.dim(),
                found: 0,
            })?;
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "velocity vector",
                expected: self.dim(),
                found: v.len(),
            });
        }
        let av = mat_poly_vec(&self.a, v);
        let b: Vec<Polynomial> = self.b.iter().map(|f| f.embed(&target)).collect::<Result<_>>()?;
        let kinetic = dot(v, &av).scale(&rat(1, 2));
        Ok(&(&kinetic + &dot(&b, v)) + &self.c.embed(&target)?)
    }

    fn base_point(&self, t: &Rational, q: &[Rational]) -> Result<Vec<Rational>> {
        if q.len() != self.m {
            return Err(Error::DimensionMismatch {
                what: "configuration q",
                expected: self.m,
                found: q.len(),
            });
        }
        let mut pt = vec![Rational::zero(); self.table.len()];
        pt[0] = t.clone();
        for (i, x) in q.iter().enumerate() {
            pt[self.table.position(i).expect("position")] = x.clone();
        }
        Ok(pt)
    }

    /// `b(t, q)` evaluated exactly.
    pub fn b_at(&self, t: &Rational, q: &[Rational]) -> Result<Vec<Rational>> {
        let pt = self.base_point(t, q)?;
        Ok(self.b.iter().map(|f| f.evaluate(&pt)).collect())
    }
}

/// σ₀ (Moore–Penrose inverse of `a`) plus an optional kernel-valued σ₁.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaSplitting {
    #[serde(skip)]
    a: RatMatrix,
    pub sigma0: RatMatrix,
    pub sigma1: RatMatrix,
    pub rank: usize,
}

impl SigmaSplitting {
    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    /// `σ = σ₀ + σ₁`.
    pub fn sigma(&self) -> RatMatrix {
        &self.sigma0 + &self.sigma1
    }

    /// Validates and stores σ₁.
    pub fn attach_sigma1(&self, sigma1: RatMatrix) -> Result<Self> {
        sigma1.check_symmetric()?;
        if sigma1.rows() != self.a.rows() {
            return Err(Error::DimensionMismatch {
                what: "σ₁",
                expected: self.a.rows(),
                found: sigma1.rows(),
            });
        }
        if !(&self.a * &sigma1).is_zero() {
            return Err(Error::KernelCondition);
        }
        Ok(Self {
            sigma1,
            ..self.clone()
        })
    }
}

/// Exact σ₀ via full-rank factorization `a = B·C`:
/// `σ₀ = Cᵀ(CCᵀ)⁻¹(BᵀB)⁻¹Bᵀ`.
pub fn compute_sigma0(a: &RatMatrix) -> Result<SigmaSplitting> {
    a.check_symmetric()?;
    let n = a.rows();
    let rref = a.rref();
    let rank = rref.pivots.len();
    let sigma0 = if rank == 0 {
        RatMatrix::zeros(n, n)
    } else {
        let c = rref.matrix.top_rows(rank);
        let b = a.select_columns(&rref.pivots);
        let ct = c.transpose();
        let bt = b.transpose();
        let cct_inv = (&c * &ct).inverse().expect("full row rank");
        let btb_inv = (&bt * &b).inverse().expect("full column rank");
        &(&(&ct * &cct_inv) * &btb_inv) * &bt
    };
    Ok(SigmaSplitting {
        a: a.clone(),
        sigma0,
        sigma1: RatMatrix::zeros(n, n),
        rank,
    })
}

/// `P = a·σ₀` and `R = 1 − P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Projectors {
    pub p: RatMatrix,
    pub r: RatMatrix,
}

impl Projectors {
    /// Arbitrary pair, unchecked. Used to build deliberately broken differentials.
    pub fn from_raw(p: RatMatrix, r: RatMatrix) -> Self {
        Self { p, r }
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    /// Whether `P² = P`, `R² = R`, `PR = RP = 0` and `P + R = 1` hold exactly.
    pub fn identities_hold(&self) -> bool {
        let n = self.dim();
        &self.p * &self.p == self.p
            && &self.r * &self.r == self.r
            && (&self.p * &self.r).is_zero()
            && (&self.r * &self.p).is_zero()
            && &self.p + &self.r == RatMatrix::identity(n)
    }

    /// Whether there are no constraints (`R = 0`).
    pub fn is_regular(&self) -> bool {
        self.r.is_zero()
    }
}

pub fn projectors(l: &QuadraticLagrangian, s: &SigmaSplitting) -> Result<Projectors> {
    if s.a != l.a {
        return Err(Error::ProvenanceMismatch);
    }
    Ok(projectors_of(s))
}

pub fn projectors_of(s: &SigmaSplitting) -> Projectors {
    let p = &s.a * &s.sigma0;
    let r = &RatMatrix::identity(p.rows()) - &p;
    Projectors { p, r }
}

/// `p = a·ẏ + b(t, q)`.
pub fn legendre_map(
    l: &QuadraticLagrangian,
    t: &Rational,
    q: &[Rational],
    ydot: &[Rational],
) -> Result<Vec<Rational>> {
    let ay = l.a.mul_vec(ydot)?;
    let b = l.b_at(t, q)?;
    Ok(ay.into_iter().zip(b).map(|(x, y)| x + y).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VelocitySplit {
    #[serde(serialize_with = "ser_rats")]
    pub s: Vec<Rational>,
    #[serde(serialize_with = "ser_rats")]
    pub f: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentumSplit {
    #[serde(serialize_with = "ser_rats")]
    pub rp: Vec<Rational>,
    #[serde(serialize_with = "ser_rats")]
    pub pp: Vec<Rational>,
}

/// `F = σ(a ẏ + b)`, `S = ẏ − F`.
pub fn split_velocity(
    l: &QuadraticLagrangian,
    s: &SigmaSplitting,
    t: &Rational,
    q: &[Rational],
    ydot: &[Rational],
) -> Result<VelocitySplit> {
    let lp = legendre_map(l, t, q, ydot)?;
    let f = s.sigma().mul_vec(&lp)?;
    let s_part = ydot.iter().zip(&f).map(|(y, x)| y - x).collect();
    Ok(VelocitySplit { s: s_part, f })
}

pub fn split_momentum(pr: &Projectors, p: &[Rational]) -> Result<MomentumSplit> {
    Ok(MomentumSplit {
        rp: pr.r.mul_vec(p)?,
        pp: pr.p.mul_vec(p)?,
    })
}

/// `Γ = −σ₀·b + φ` with `a·Γ + b = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelConnection {
    pub gamma: Vec<Polynomial>,
    pub offset: Vec<Polynomial>,
}

pub fn kernel_connection(
    l: &QuadraticLagrangian,
    s: &SigmaSplitting,
    phi: Option<&[Polynomial]>,
) -> Result<KernelConnection> {
    if s.a != l.a {
        return Err(Error::ProvenanceMismatch);
    }
    let pr = projectors_of(s);
    let residual = mat_poly_vec(&pr.r, &l.b);
    if residual.iter().any(|f| !f.is_zero()) {
        let corrected_b = l.b.iter().zip(&residual).map(|(b, r)| b - r).collect();
        return Err(Error::ZeroSectionViolation {
            residual,
            corrected_b,
        });
    }
    let zero = Polynomial::zero(&l.table);
    let offset: Vec<Polynomial> = match phi {
        Some(phi) => {
            if phi.len() != l.dim() {
                return Err(Error::DimensionMismatch {
                    what: "soldering offset",
                    expected: l.dim(),
                    found: phi.len(),
                });
            }
            let phi: Vec<Polynomial> = phi.iter().map(|f| f.embed(&l.table)).collect::<Result<_>>()?;
            if mat_poly_vec(&l.a, &phi).iter().any(|f| !f.is_zero()) {
                return Err(Error::SolderingViolation("a·φ = 0"));
            }
            if !dot(&phi, &l.b).is_zero() {
                return Err(Error::SolderingViolation("φ·b = 0"));
            }
            phi
        }
        None => vec![zero; l.dim()],
    };
    let sb = mat_poly_vec(&s.sigma0, &l.b);
    let gamma = sb.iter().zip(&offset).map(|(x, f)| f - x).collect();
    Ok(KernelConnection { gamma, offset })
}

/// Matrix times a vector of polynomials.
pub fn mat_poly_vec(m: &RatMatrix, v: &[Polynomial]) -> Vec<Polynomial> {
    assert_eq!(m.cols(), v.len(), "matrix-vector dimensions");
    let table = v.first().expect("nonempty vector").table();
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .filter(|(c, _)| !c.is_zero())
                .fold(Polynomial::zero(table), |acc, (c, f)| {
                    if c.is_one() {
                        &acc + f
                    } else {
                        &acc + &f.scale(c)
                    }
                })
        })
        .collect()
}

/// `Σ uᵢ vᵢ`.
pub fn dot(u: &[Polynomial], v: &[Polynomial]) -> Polynomial {
    assert_eq!(u.len(), v.len(), "dot product dimensions");
    let table = u.first().expect("nonempty vector").table();
    u.iter()
        .zip(v)
        .fold(Polynomial::zero(table), |acc, (x, y)| &acc + &(x * y))
}

/// The momenta `p_α` of a table as polynomials.
pub fn momentum_vector(table: &Arc<VariableTable>) -> Vec<Polynomial> {
    (0..table.momenta())
        .map(|i| Polynomial::var(table, table.momentum(i).expect("momentum")))
        .collect()
}

pub(crate) fn ser_rats<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

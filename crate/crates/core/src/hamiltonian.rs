//! Hamiltonian forms `ℋ = Γ·p + ½ pσ₀p + pσ₁p − c′` attached to a quadratic
//! Lagrangian, their Hamiltonian maps and association checks.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, VariableTable};
use crate::quadratic::{
    dot, kernel_connection, mat_poly_vec, momentum_vector, projectors_of, KernelConnection,
    Projectors, QuadraticLagrangian, SigmaSplitting,
};
use crate::rational::{rat, Rational};

/// The triple a Hamiltonian form was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub lagrangian: QuadraticLagrangian,
    pub splitting: SigmaSplitting,
    pub connection: KernelConnection,
    /// The potential `c′ = c − ½ b·σ₀·b`.
    pub c_prime: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianData {
    pub h: Polynomial,
    pub provenance: Option<Arc<Provenance>>,
}

impl HamiltonianData {
    /// A bare Hamiltonian density with no generating Lagrangian.
    pub fn from_polynomial(h: Polynomial) -> Self {
        Self {
            h,
            provenance: None,
        }
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        self.h.table()
    }

    /// `(Γ, ℋ̃_Γ = ℋ − p·Γ)` for forms of quadratic provenance.
    pub fn frame_split(&self) -> Option<(Vec<Polynomial>, Polynomial)> {
        let prov = self.provenance.as_ref()?;
        let gamma = prov.connection.gamma.clone();
        let p = momentum_vector(self.h.table());
        let energy = &self.h - &dot(&p, &gamma);
        Some((gamma, energy))
    }
}

/// `ℋ = Γ·p + ½ p·σ₀·p + p·σ₁·p − c′`.
pub fn build_h_sigma_gamma(
    l: &QuadraticLagrangian,
    s: &SigmaSplitting,
    gamma: &KernelConnection,
) -> Result<HamiltonianData> {
    if s.a() != l.a() {
        return Err(Error::ProvenanceMismatch);
    }
    let table = l.table();
    let ag = mat_poly_vec(l.a(), &gamma.gamma);
    if ag.iter().zip(l.b()).any(|(x, b)| !(x + b).is_zero()) {
        return Err(Error::SolderingViolation("a·Γ + b = 0"));
    }
    let p = momentum_vector(table);
    let half = rat(1, 2);
    let c_prime = l.c() - &dot(l.b(), &mat_poly_vec(&s.sigma0, l.b())).scale(&half);
    let h = &(&(&dot(&gamma.gamma, &p) + &dot(&p, &mat_poly_vec(&s.sigma0, &p)).scale(&half))
        + &dot(&p, &mat_poly_vec(&s.sigma1, &p)))
        - &c_prime;
    Ok(HamiltonianData {
        h,
        provenance: Some(Arc::new(Provenance {
            lagrangian: l.clone(),
            splitting: s.clone(),
            connection: gamma.clone(),
            c_prime,
        })),
    })
}

/// Convenience: σ₀ with the given σ₁ and the connection `−σ₀b + φ`.
pub fn hamiltonian_for(
    l: &QuadraticLagrangian,
    s: &SigmaSplitting,
    phi: Option<&[Polynomial]>,
) -> Result<HamiltonianData> {
    let gamma = kernel_connection(l, s, phi)?;
    build_h_sigma_gamma(l, s, &gamma)
}

/// `Φ_α = ∂ℋ/∂p_α`.
pub fn hamiltonian_map(h: &HamiltonianData) -> Vec<Polynomial> {
    let table = h.table();
    (0..table.momenta())
        .map(|i| h.h.partial(table.momentum(i).expect("momentum")))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Association {
    Associated,
    Weak,
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociationReport {
    /// `L̂∘Ĥ∘L̂ = L̂` as a polynomial identity.
    pub legendre_identity: bool,
    /// `ℋ = p·Φ − ℒ(Φ)` as a polynomial identity.
    pub energy_identity: bool,
    /// The same relation at every on-constraint sample.
    pub energy_on_samples: bool,
    pub samples_used: usize,
    pub association: Association,
}

/// Checks the association relations for a form of quadratic provenance.
///
/// `samples` are exact points `(t, q, p)` in table order; those off the
/// constraint surface `R·p = 0` are skipped.
pub fn check_weak_association(
    h: &HamiltonianData,
    l: &QuadraticLagrangian,
    s: &SigmaSplitting,
    samples: &[Vec<Rational>],
) -> Result<AssociationReport> {
    if s.a() != l.a() {
        return Err(Error::ProvenanceMismatch);
    }
    if l.n() != 1 {
        return Err(Error::Unsupported("association checks need n = 1".into()));
    }
    let m = l.m();
    let phi = hamiltonian_map(h);

    // p → a·qd + b on the vertical table, then a·Φ + b − (a·qd + b).
    let vv = VariableTable::vertical(m);
    let qd: Vec<Polynomial> = (0..m)
        .map(|i| Polynomial::var(&vv, vv.position_vertical(i).expect("qd")))
        .collect();
    let b_vv: Vec<Polynomial> = l.b().iter().map(|f| f.embed(&vv)).collect::<Result<_>>()?;
    let image: Vec<Polynomial> = mat_poly_vec(l.a(), &qd)
        .iter()
        .zip(&b_vv)
        .map(|(x, y)| x + y)
        .collect();
    let v_table = h.table();
    let images: Vec<Polynomial> = (0..v_table.len())
        .map(|i| match v_table.role(i) {
            crate::poly::VarRole::Momentum(k) => image[k].clone(),
            _ => Polynomial::var_named(&vv, v_table.name(i)).expect("shared variable"),
        })
        .collect();
    let phi_on_image: Vec<Polynomial> = phi
        .iter()
        .map(|f| f.compose(&vv, &images))
        .collect::<Result<_>>()?;
    let legendre_identity = mat_poly_vec(l.a(), &phi_on_image)
        .iter()
        .zip(&b_vv)
        .zip(&image)
        .all(|((x, b), y)| (&(x + b) - y).is_zero());

    let p = momentum_vector(v_table);
    let defect = &(&h.h - &dot(&p, &phi)) + &l.lagrangian_at(&phi)?;
    let energy_identity = defect.is_zero();

    let pr = projectors_of(s);
    let mut used = 0;
    let mut on_samples = true;
    for pt in samples {
        if pt.len() != v_table.len() {
            return Err(Error::DimensionMismatch {
                what: "sample point",
                expected: v_table.len(),
                found: pt.len(),
            });
        }
        let pv: Vec<Rational> = (0..m).map(|i| pt[v_table.momentum(i).expect("p")].clone()).collect();
        if pr.r.mul_vec(&pv)?.iter().any(|x| !x.is_zero()) {
            continue;
        }
        used += 1;
        if !defect.evaluate(pt).is_zero() {
            on_samples = false;
        }
    }
    let association = if legendre_identity && energy_identity {
        Association::Associated
    } else if legendre_identity && on_samples && used > 0 {
        Association::Weak
    } else {
        Association::None
    };
    Ok(AssociationReport {
        legendre_identity,
        energy_identity,
        energy_on_samples: on_samples,
        samples_used: used,
        association,
    })
}

/// `L_H = p·qd − ℋ(t, q, p)` over the vertical table.
pub fn build_l_h(h: &HamiltonianData) -> Result<Polynomial> {
    let table = h.table();
    let m = table.positions();
    if table.momenta() != m {
        return Err(Error::Unsupported("L_H needs n = 1".into()));
    }
    let vv = VariableTable::vertical(m);
    let pq: Polynomial = (0..m).fold(Polynomial::zero(&vv), |acc, i| {
        let p = Polynomial::var(&vv, vv.momentum(i).expect("p"));
        let qd = Polynomial::var(&vv, vv.position_vertical(i).expect("qd"));
        &acc + &(&p * &qd)
    });
    Ok(&pq - &h.h.embed(&vv)?)
}

/// `H_N = ℋ(p → P·p)`.
pub fn constrained_hamiltonian(h: &HamiltonianData, pr: &Projectors) -> Result<Polynomial> {
    if h.provenance.is_none() {
        return Err(Error::Unsupported(
            "constrained Hamiltonian needs a form built from a quadratic Lagrangian".into(),
        ));
    }
    let table = h.table();
    let p = momentum_vector(table);
    if pr.dim() != p.len() {
        return Err(Error::DimensionMismatch {
            what: "projectors",
            expected: p.len(),
            found: pr.dim(),
        });
    }
    let pp = mat_poly_vec(&pr.p, &p);
    let images: Vec<Polynomial> = (0..table.len())
        .map(|i| match table.role(i) {
            crate::poly::VarRole::Momentum(k) => pp[k].clone(),
            _ => Polynomial::var(table, i),
        })
        .collect();
    h.h.compose(table, &images)
}

/// `ℋ + f`, the density of `H − f dt`.
pub fn modified_hamiltonian(h: &HamiltonianData, f: &Polynomial) -> Result<HamiltonianData> {
    Ok(HamiltonianData {
        h: h.h.try_add(&f.embed(h.table())?)?,
        provenance: None,
    })
}

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;


use super::VariableTable;
use crate::error::{Error, Result};
use crate::rational::{Coefficient, GaussianRational, Rational};

/// Exponent vector, one entry per variable of the table.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial with exact coefficients.
///
/// Zero coefficients are never stored and every exponent vector has the
/// length of the variable table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<C: Coefficient = Rational> {
    table: Arc<VariableTable>,
    terms: BTreeMap<Monomial, C>,
}

pub type Polynomial = Poly<Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring operation on polynomials over the same table.
pub fn poly_arith<C: Coefficient>(f: &Poly<C>, g: &Poly<C>, op: ArithOp) -> Result<Poly<C>> {
    match op {
        ArithOp::Add => f.try_add(g),
        ArithOp::Sub => f.try_sub(g),
        ArithOp::Mul => f.try_mul(g),
    }
}

/// Graded order: total degree first, then lexicographic on the exponent vector.
pub fn graded_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// All exponent vectors over `nvars` variables with total degree exactly `degree`.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            cur[i] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    if nvars == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(0, degree, &mut vec![0; nvars], &mut out);
    out
}

/// All exponent vectors with total degree at most `degree`, by increasing degree.
pub fn monomials_up_to(nvars: usize, degree: u32) -> Vec<Monomial> {
    (0..=degree).flat_map(|d| monomials_of_degree(nvars, d)).collect()
}

impl<C: Coefficient> Poly<C> {
    pub fn zero(table: &Arc<VariableTable>) -> Self {
        Self {
            table: Arc::clone(table),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Arc<VariableTable>, c: C) -> Self {
        let mut p = Self::zero(table);
        p.add_term(vec![0; table.len()], c);
        p
    }

    pub fn one(table: &Arc<VariableTable>) -> Self {
        Self::constant(table, C::one())
    }

    pub fn var(table: &Arc<VariableTable>, idx: usize) -> Self {
        let mut exps = vec![0; table.len()];
        exps[idx] = 1;
        Self::monomial(table, exps, C::one())
    }

    pub fn var_named(table: &Arc<VariableTable>, name: &str) -> Result<Self> {
        Ok(Self::var(table, table.index_of(name)?))
    }

    pub fn monomial(table: &Arc<VariableTable>, exps: Monomial, c: C) -> Self {
        assert_eq!(exps.len(), table.len(), "exponent vector length");
        let mut p = Self::zero(table);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(
        table: &Arc<VariableTable>,
        terms: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Self {
        let mut p = Self::zero(table);
        for (m, c) in terms {
            assert_eq!(m.len(), table.len(), "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, exps: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn coefficient(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&vec![0; self.table.len()])
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m[idx] > 0)
    }

    /// Largest term under [`graded_cmp`].
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().max_by(|a, b| graded_cmp(a.0, b.0))
    }

    fn same_table(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.table, &other.table) || self.table == other.table {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_table(other)?;
        let mut out = Self::zero(&self.table);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        Self {
            table: Arc::clone(&self.table),
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.table);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to the variable at `idx`.
    pub fn partial(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m[idx];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[idx] -= 1;
            out.add_term(dm, c.clone() * C::from_rational(Rational::from_integer(e.into())));
        }
        out
    }

    pub fn partial_named(&self, name: &str) -> Result<Self> {
        Ok(self.partial(self.table.index_of(name)?))
    }

    /// Exact evaluation at a point given in table order.
    pub fn evaluate(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.table.len(), "evaluation point length");
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m) {
                for _ in 0..e {
                    v = v * x.clone();
                }
            }
            acc = acc + v;
        }
        acc
    }

    /// Substitutes every variable `j` by `images[j]`, a polynomial over `target`.
    pub fn compose(&self, target: &Arc<VariableTable>, images: &[Poly<C>]) -> Result<Self> {
        if images.len() != self.table.len() {
            return Err(Error::DimensionMismatch {
                what: "substitution images",
                expected: self.table.len(),
                found: images.len(),
            });
        }
        let mut out = Self::zero(target);
        let mut powers: Vec<Vec<Poly<C>>> = images.iter().map(|p| vec![Self::one(target), p.clone()]).collect();
        for (m, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (j, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().try_mul(&images[j])?;
                    powers[j].push(next);
                }
                term = term.try_mul(&powers[j][e as usize])?;
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over another table, matching variables by name.
    pub fn embed(&self, target: &Arc<VariableTable>) -> Result<Self> {
        let map: Vec<Option<usize>> = (0..self.table.len())
            .map(|i| target.index_of(self.table.name(i)).ok())
            .collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut tm = vec![0; target.len()];
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::UnknownVariable(self.table.name(i).to_string()))?;
                tm[j] = e;
            }
            out.add_term(tm, c.clone());
        }
        Ok(out)
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(&self.table, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    fn write_monomial(&self, m: &[u32], out: &mut String) -> bool {
        let mut wrote = false;
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if wrote {
                out.push('*');
            }
            out.push_str(self.table.name(i));
            if e > 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
            wrote = true;
        }
        wrote
    }

    /// Terms in descending graded order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| graded_cmp(b.0, a.0));
        v
    }
}

impl Polynomial {
    pub fn to_gaussian(&self) -> Poly<GaussianRational> {
        self.map_coefficients(|c| GaussianRational::from_rational(c.clone()))
    }

    /// Evaluation in floating point.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.table().len(), "evaluation point length");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(point)
                    .fold(crate::rational::to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }
}

impl<C: Coefficient> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let (neg, mag) = c.render();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut mono = String::new();
            let has_vars = self.write_monomial(m, &mut mono);
            match (mag, has_vars) {
                (Some(mag), true) => {
                    out.push_str(&mag);
                    out.push('*');
                    out.push_str(&mono);
                }
                (Some(mag), false) => out.push_str(&mag),
                (None, true) => out.push_str(&mono),
                (None, false) => out.push('1'),
            }
        }
        f.write_str(&out)
    }
}

impl<C: Coefficient> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        self.try_add(rhs).expect("polynomial addition across tables")
    }
}

impl<C: Coefficient> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        self.try_sub(rhs).expect("polynomial subtraction across tables")
    }
}

impl<C: Coefficient> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        self.try_mul(rhs).expect("polynomial multiplication across tables")
    }
}

impl<C: Coefficient> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coefficient> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: Poly<C>) -> Poly<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: Poly<C>) -> Poly<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Mul for Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Poly<C>) -> Poly<C> {
        &self * &rhs
    }
}

impl<C: Coefficient> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(name: &str) -> Polynomial {
        Polynomial::var_named(&VariableTable::phase_space(2), name).unwrap()
    }

    #[test]
    fn cancellation() {
        let s = &(&v("q1") + &v("p1")) + &(&v("q1") - &v("p1"));
        assert_eq!(s, v("q1").scale(&int(2)));
        assert_eq!(s.num_terms(), 1);
    }

    #[test]
    fn monomial_product() {
        let prod = &v("q1") * &v("p2");
        assert_eq!(prod.to_string(), "q1*p2");
    }

    #[test]
    fn difference_of_squares() {
        let one = Polynomial::one(v("q1").table());
        let lhs = &(&v("q1") + &one) * &(&v("q1") - &one);
        let rhs = &(&v("q1") * &v("q1")) - &one;
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "q1^2 - 1");
    }

    #[test]
    fn mismatched_tables() {
        let a = Polynomial::var_named(&VariableTable::phase_space(1), "q1").unwrap();
        let b = Polynomial::var_named(&VariableTable::phase_space(2), "q1").unwrap();
        assert!(matches!(
            poly_arith(&a, &b, ArithOp::Add),
            Err(Error::TableMismatch)
        ));
    }

    #[test]
    fn partials() {
        let f = &(&v("q1") * &v("q1")) * &v("p2");
        assert_eq!(f.partial_named("q1").unwrap(), (&v("q1") * &v("p2")).scale(&int(2)));
        assert_eq!(f.partial_named("p2").unwrap(), &v("q1") * &v("q1"));
        let g = &v("q1") * &v("p1");
        assert!(g.partial_named("t").unwrap().is_zero());
        assert!(g.partial_named("x").is_err());
    }

    #[test]
    fn display_signs_and_fractions() {
        let f = &v("q1").scale(&rat(-3, 2)) + &Polynomial::constant(v("q1").table(), rat(1, 3));
        assert_eq!(f.to_string(), "-3/2*q1 + 1/3");
        assert_eq!(Polynomial::zero(v("q1").table()).to_string(), "0");
    }

    #[test]
    fn compose_and_embed() {
        let t = v("q1").table().clone();
        // q1 -> q1 + 1, everything else fixed
        let mut images: Vec<Polynomial> = (0..t.len()).map(|i| Polynomial::var(&t, i)).collect();
        images[1] = &v("q1") + &Polynomial::one(&t);
        let f = &v("q1") * &v("q1");
        let g = f.compose(&t, &images).unwrap();
        assert_eq!(g.to_string(), "q1^2 + 2*q1 + 1");
        let big = VariableTable::extended(2);
        let e = g.embed(&big).unwrap();
        assert_eq!(e.table().len(), 6);
        assert_eq!(e.to_string(), "q1^2 + 2*q1 + 1");
        let pt = Polynomial::var_named(&big, "pt").unwrap();
        assert!(pt.embed(&t).is_err());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_up_to(4, 2).len(), 15);
        assert_eq!(monomials_of_degree(5, 3).len(), 35);
        assert_eq!(monomials_of_degree(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn evaluation() {
        let f = &(&v("q1") * &v("q1")) * &v("p2");
        let pt = vec![int(0), int(3), int(0), int(0), rat(1, 2)];
        assert_eq!(f.evaluate(&pt), rat(9, 2));
        assert_eq!(f.eval_f64(&[0.0, 3.0, 0.0, 0.0, 0.5]), 4.5);
    }
}

//! Exact sparse row reduction and truncated-span ideal membership.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{graded_cmp, monomials_up_to, Monomial, Polynomial, VariableTable};
use crate::rational::Rational;

pub type SparseVec<K> = BTreeMap<K, Rational>;

/// Fully reduced row-echelon basis of a subspace of sparse vectors.
///
/// Every row has its largest key as pivot with coefficient 1, and no row
/// contains another row's pivot. Reduction modulo the span is therefore
/// canonical.
#[derive(Clone, Debug, Default)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

fn axpy<K: Ord + Clone>(v: &mut SparseVec<K>, c: &Rational, row: &SparseVec<K>) {
    for (k, x) in row {
        let entry = v.entry(k.clone()).or_insert_with(Rational::zero);
        *entry -= c * x;
        if entry.is_zero() {
            v.remove(k);
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` modulo the span.
    pub fn reduce(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        let hits: Vec<K> = v.keys().filter(|k| self.rows.contains_key(*k)).cloned().collect();
        for k in hits {
            if let Some(c) = v.get(&k).cloned() {
                axpy(&mut v, &c, &self.rows[&k]);
            }
        }
        v
    }

    pub fn contains(&self, v: SparseVec<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let mut r = self.reduce(v);
        let Some((pivot, lead)) = r.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        if !lead.is_one() {
            let inv = lead.recip();
            for x in r.values_mut() {
                *x *= &inv;
            }
        }
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&pivot).cloned() {
                axpy(row, &c, &r);
            }
        }
        self.rows.insert(pivot, r);
        true
    }
}

/// Monomial key ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedKey(pub Monomial);

impl PartialOrd for GradedKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GradedKey {
    fn cmp(&self, other: &Self) -> Ordering {
        graded_cmp(&self.0, &other.0)
    }
}

fn to_sparse(f: &Polynomial) -> SparseVec<GradedKey> {
    f.terms().map(|(m, c)| (GradedKey(m.clone()), c.clone())).collect()
}

fn from_sparse(table: &Arc<VariableTable>, v: SparseVec<GradedKey>) -> Polynomial {
    Polynomial::from_terms(table, v.into_iter().map(|(k, c)| (k.0, c)))
}

/// The span of `g · x^μ` over generators `g` and monomials with `deg(g·x^μ) ≤ D`.
///
/// Membership in this span implies membership in the ideal; the converse
/// holds only up to the truncation degree.
#[derive(Clone, Debug)]
pub struct TruncatedIdeal {
    table: Arc<VariableTable>,
    generators: Vec<Polynomial>,
    degree: u32,
    span: Echelon<GradedKey>,
}

impl TruncatedIdeal {
    pub fn new(table: &Arc<VariableTable>, generators: &[Polynomial], degree: u32) -> Result<Self> {
        let mut ideal = Self {
            table: Arc::clone(table),
            generators: Vec::new(),
            degree,
            span: Echelon::new(),
        };
        for g in generators {
            ideal.add_generator(g)?;
        }
        Ok(ideal)
    }

    /// Extends the generating set; returns whether the span grew.
    pub fn add_generator(&mut self, g: &Polynomial) -> Result<bool> {
        if **g.table() != *self.table {
            return Err(Error::TableMismatch);
        }
        let dg = g.degree();
        if dg > self.degree {
            return Err(Error::DegreeOverflow {
                degree: dg,
                cap: self.degree,
            });
        }
        let mut grew = false;
        for mono in monomials_up_to(self.table.len(), self.degree - dg) {
            let m = Polynomial::monomial(&self.table, mono, Rational::one());
            grew |= self.span.insert(to_sparse(&(&m * g)));
        }
        self.generators.push(g.clone());
        Ok(grew)
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    /// Dimension of the truncated span.
    pub fn span_dim(&self) -> usize {
        self.span.rank()
    }

    fn check(&self, f: &Polynomial) -> Result<()> {
        if **f.table() != *self.table {
            return Err(Error::TableMismatch);
        }
        if f.degree() > self.degree {
            return Err(Error::DegreeOverflow {
                degree: f.degree(),
                cap: self.degree,
            });
        }
        Ok(())
    }

    /// Canonical remainder of `f` modulo the truncated span.
    pub fn reduce(&self, f: &Polynomial) -> Result<Polynomial> {
        self.check(f)?;
        Ok(from_sparse(&self.table, self.span.reduce(to_sparse(f))))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        self.check(f)?;
        Ok(self.span.contains(to_sparse(f)))
    }
}

/// Whether `f` lies in the span of `{g·x^μ : deg ≤ D}`.
pub fn ideal_member(f: &Polynomial, generators: &[Polynomial], degree: u32) -> Result<bool> {
    TruncatedIdeal::new(f.table(), generators, degree)?.contains(f)
}

/// Exact solution of `A x = b` for a sparse system, if one exists.
/// Columns are indexed by `usize`, rows by the keys `K`.
pub fn solve_sparse<K: Ord + Clone>(
    columns: &[SparseVec<K>],
    rhs: &SparseVec<K>,
) -> Option<Vec<Rational>> {
    // Row-reduce the augmented column system by treating each equation key as a row.
    let mut keys: Vec<K> = columns.iter().flat_map(|c| c.keys().cloned()).collect();
    keys.extend(rhs.keys().cloned());
    keys.sort();
    keys.dedup();
    let n = columns.len();
    let mut rows: Vec<Vec<Rational>> = keys
        .iter()
        .map(|k| {
            let mut row: Vec<Rational> = columns
                .iter()
                .map(|c| c.get(k).cloned().unwrap_or_else(Rational::zero))
                .collect();
            row.push(rhs.get(k).cloned().unwrap_or_else(Rational::zero));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= y * &f;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::int;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &VariableTable::phase_space(2)).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(ideal_member(&p("q1*p2"), &[p("p2")], 3).unwrap());
        assert!(!ideal_member(&p("p1"), &[p("p2")], 3).unwrap());
        assert!(ideal_member(&p("0"), &[p("p2")], 3).unwrap());
        assert!(matches!(
            ideal_member(&p("p1^4"), &[p("p2")], 3),
            Err(Error::DegreeOverflow { degree: 4, cap: 3 })
        ));
    }

    #[test]
    fn canonical_remainder() {
        let ideal = TruncatedIdeal::new(p("p2").table(), &[p("p2 - q1")], 3).unwrap();
        let a = ideal.reduce(&p("p2 + t")).unwrap();
        let b = ideal.reduce(&p("q1 + t")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn echelon_rank() {
        let mut e: Echelon<usize> = Echelon::new();
        let v = |xs: &[(usize, i64)]| xs.iter().map(|&(k, x)| (k, int(x))).collect::<SparseVec<usize>>();
        assert!(e.insert(v(&[(0, 1), (1, 2)])));
        assert!(e.insert(v(&[(1, 1)])));
        assert!(!e.insert(v(&[(0, 3), (1, -4)])));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn sparse_solve() {
        let col = |xs: &[(usize, i64)]| xs.iter().map(|&(k, x)| (k, int(x))).collect::<SparseVec<usize>>();
        let cols = vec![col(&[(0, 1), (1, 1)]), col(&[(1, 1)])];
        let x = solve_sparse(&cols, &col(&[(0, 2), (1, 5)])).unwrap();
        assert_eq!(x, vec![int(2), int(3)]);
        assert!(solve_sparse(&cols, &col(&[(2, 1)])).is_none());
    }
}

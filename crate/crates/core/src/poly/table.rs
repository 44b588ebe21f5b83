use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// What a coordinate means. Indices are zero-based; names are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VarRole {
    Time,
    Position(usize),
    Momentum(usize),
    /// Vertical velocity `qd_i`.
    PositionVertical(usize),
    /// Vertical momentum `pd_i`.
    MomentumVertical(usize),
    /// The coordinate `pt` conjugate to time on the full cotangent bundle.
    TimeMomentum,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Variable {
    pub name: String,
    pub role: VarRole,
}

/// Ordered list of base variables. Indices are stable for the table's lifetime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    vars: Vec<Variable>,
    by_name: HashMap<String, usize>,
    by_role: HashMap<VarRole, usize>,
}

impl VariableTable {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        let mut by_name = HashMap::new();
        let mut by_role = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if by_name.insert(v.name.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate variable name `{}`",
                    v.name
                )));
            }
            if by_role.insert(v.role, i).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate variable role {:?}",
                    v.role
                )));
            }
        }
        Ok(Self {
            vars,
            by_name,
            by_role,
        })
    }

    fn build(m: usize, momenta: usize, pt: bool, verticals: bool) -> Arc<Self> {
        let mut vars = vec![Variable {
            name: "t".into(),
            role: VarRole::Time,
        }];
        vars.extend((0..m).map(|i| Variable {
            name: format!("q{}", i + 1),
            role: VarRole::Position(i),
        }));
        vars.extend((0..momenta).map(|i| Variable {
            name: format!("p{}", i + 1),
            role: VarRole::Momentum(i),
        }));
        if verticals {
            vars.extend((0..m).map(|i| Variable {
                name: format!("qd{}", i + 1),
                role: VarRole::PositionVertical(i),
            }));
            vars.extend((0..m).map(|i| Variable {
                name: format!("pd{}", i + 1),
                role: VarRole::MomentumVertical(i),
            }));
        }
        if pt {
            vars.push(Variable {
                name: "pt".into(),
                role: VarRole::TimeMomentum,
            });
        }
        Arc::new(Self::new(vars).expect("generated names are unique"))
    }

    /// `(t, q1..qm, p1..pm)`: the momentum phase space of mechanics.
    pub fn phase_space(m: usize) -> Arc<Self> {
        Self::build(m, m, false, false)
    }

    /// `(t, q1..qm, p1..pM)` with `M = n·m` composite momenta, flattened `α = λ·m + i`.
    pub fn composite(n: usize, m: usize) -> Arc<Self> {
        Self::build(m, n * m, false, false)
    }

    /// Phase space plus `pt`: the full cotangent bundle.
    pub fn extended(m: usize) -> Arc<Self> {
        Self::build(m, m, true, false)
    }

    /// Phase space plus verticals `qd_i`, `pd_i`.
    pub fn vertical(m: usize) -> Arc<Self> {
        Self::build(m, m, false, true)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.vars[idx].name
    }

    pub fn role(&self, idx: usize) -> VarRole {
        self.vars[idx].role
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn lookup(&self, role: VarRole) -> Option<usize> {
        self.by_role.get(&role).copied()
    }

    pub fn time(&self) -> Option<usize> {
        self.lookup(VarRole::Time)
    }

    pub fn position(&self, i: usize) -> Option<usize> {
        self.lookup(VarRole::Position(i))
    }

    pub fn momentum(&self, i: usize) -> Option<usize> {
        self.lookup(VarRole::Momentum(i))
    }

    pub fn time_momentum(&self) -> Option<usize> {
        self.lookup(VarRole::TimeMomentum)
    }

    pub fn position_vertical(&self, i: usize) -> Option<usize> {
        self.lookup(VarRole::PositionVertical(i))
    }

    pub fn momentum_vertical(&self, i: usize) -> Option<usize> {
        self.lookup(VarRole::MomentumVertical(i))
    }

    /// Number of `q` coordinates.
    pub fn positions(&self) -> usize {
        self.count(|r| matches!(r, VarRole::Position(_)))
    }

    pub fn momenta(&self) -> usize {
        self.count(|r| matches!(r, VarRole::Momentum(_)))
    }

    fn count(&self, pred: impl Fn(VarRole) -> bool) -> usize {
        self.vars.iter().filter(|v| pred(v.role)).count()
    }
}

impl fmt::Display for VariableTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.vars.iter().map(|v| v.name.as_str()).collect();
        write!(f, "({})", names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_tables() {
        let v = VariableTable::phase_space(2);
        assert_eq!(v.to_string(), "(t, q1, q2, p1, p2)");
        let t = VariableTable::extended(1);
        assert_eq!(t.to_string(), "(t, q1, p1, pt)");
        let vv = VariableTable::vertical(1);
        assert_eq!(vv.to_string(), "(t, q1, p1, qd1, pd1)");
        assert_eq!(vv.momentum_vertical(0), Some(4));
        assert_eq!(VariableTable::composite(2, 2).momenta(), 4);
    }

    #[test]
    fn duplicate_names_rejected() {
        let v = Variable {
            name: "x".into(),
            role: VarRole::Time,
        };
        let w = Variable {
            name: "x".into(),
            role: VarRole::Position(0),
        };
        assert!(VariableTable::new(vec![v, w]).is_err());
    }

    #[test]
    fn unknown_lookup() {
        let v = VariableTable::phase_space(1);
        assert!(matches!(v.index_of("q7"), Err(Error::UnknownVariable(_))));
    }
}

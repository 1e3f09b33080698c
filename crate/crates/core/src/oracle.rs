//! Word-problem oracles behind a common trait, so that Cayley balls and
//! Dehn-function tables can be driven by whichever decision procedure fits
//! the presentation.

use thiserror::Error;

use crate::abelian::AbelianizationMap;
use crate::coset::{enumerate_cosets, CosetTable};
use crate::dehn::DehnSolver;
use crate::presentation::Presentation;
use crate::torus::{TorusGen, TorusGroup};
use crate::words::{free_reduce, free_wp, invert, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct OracleError(pub String);

pub trait WordOracle {
    fn name(&self) -> &'static str;

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError>;

    fn equal(&self, u: &Word, v: &Word) -> Result<bool, OracleError> {
        self.is_trivial(&u.concat(&invert(v)))
    }

    /// `false` when a "nontrivial" answer rests on an unchecked assumption.
    fn is_exact(&self) -> bool;

    /// A key that is equal for two words iff they are equal in the group,
    /// when the oracle has a normal form.
    fn canonical(&self, _w: &Word) -> Option<String> {
        None
    }

    /// Caveat to surface next to verdicts from an inexact oracle.
    fn assumption(&self) -> Option<&'static str> {
        None
    }
}

/// The free group: free reduction decides everything.
#[derive(Clone, Debug, Default)]
pub struct FreeOracle;

impl WordOracle for FreeOracle {
    fn name(&self) -> &'static str {
        "free"
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(free_wp(w))
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn canonical(&self, w: &Word) -> Option<String> {
        Some(format!("{:?}", free_reduce(w).letters()))
    }
}

/// Regular action on a complete coset table of the trivial subgroup.
#[derive(Clone, Debug)]
pub struct CosetOracle {
    table: CosetTable,
}

impl CosetOracle {
    pub fn new(table: CosetTable) -> Result<Self, OracleError> {
        if table.group_order().is_none() {
            return Err(OracleError("coset oracle needs a complete table of the trivial subgroup".into()));
        }
        Ok(CosetOracle { table })
    }

    pub fn enumerate(p: &Presentation, max_cosets: usize) -> Result<Self, OracleError> {
        let table = enumerate_cosets(p, &[], max_cosets).map_err(|e| OracleError(e.to_string()))?;
        if !table.is_complete() {
            return Err(OracleError(format!("coset enumeration overflowed at {max_cosets} cosets")));
        }
        CosetOracle::new(table)
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    fn element(&self, w: &Word) -> Result<usize, OracleError> {
        self.table.trace(0, w).ok_or_else(|| OracleError("word leaves the coset table".into()))
    }
}

impl WordOracle for CosetOracle {
    fn name(&self) -> &'static str {
        "coset"
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        self.table.wp_finite(w).map_err(|e| OracleError(e.to_string()))
    }

    fn equal(&self, u: &Word, v: &Word) -> Result<bool, OracleError> {
        Ok(self.element(u)? == self.element(v)?)
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn canonical(&self, w: &Word) -> Option<String> {
        self.element(w).ok().map(|c| c.to_string())
    }
}

/// Normal forms in `G(k,l)`, or in `C_k * C_l` when the presentation has no
/// `t`.
#[derive(Clone, Debug)]
pub struct TorusOracle {
    group: TorusGroup,
    roles: Vec<TorusGen>,
    free_product: bool,
}

impl TorusOracle {
    /// Generators are matched to `t`, `u`, `v` by name.
    pub fn new(p: &Presentation, k: u32, l: u32) -> Result<Self, OracleError> {
        let group = TorusGroup::new(k, l).map_err(|e| OracleError(e.to_string()))?;
        let roles = p
            .generators()
            .names()
            .iter()
            .map(|n| TorusGen::from_name(n).ok_or_else(|| OracleError(format!("generator '{n}' is not t, u or v"))))
            .collect::<Result<Vec<_>, _>>()?;
        let free_product = !roles.contains(&TorusGen::T);
        Ok(TorusOracle { group, roles, free_product })
    }

    /// Recognizes `< t, u, v | t = u^k = v^l >` and `< u, v | u^k, v^l >`
    /// (up to generator order) and returns `(k, l)`.
    pub fn detect(p: &Presentation) -> Option<(u32, u32)> {
        let names = p.generators().names();
        let has_t = p.generators().index("t").is_some();
        let (u, v) = (p.generators().index("u")?, p.generators().index("v")?);
        if names.len() != if has_t { 3 } else { 2 } {
            return None;
        }
        let sums = |g: usize| -> Vec<u32> {
            p.relators().iter().map(|r| r.exponent_sum(g).unsigned_abs() as u32).filter(|&e| e >= 2).collect()
        };
        let (ks, ls) = (sums(u), sums(v));
        for &k in &ks {
            for &l in &ls {
                let Ok(oracle) = TorusOracle::new(p, k, l) else { continue };
                let holds = p.relators().iter().all(|r| oracle.is_trivial(r).unwrap_or(false));
                if holds && TorusOracle::presents_same(p, k, l) {
                    return Some((k, l));
                }
            }
        }
        None
    }

    /// Every defining relator of the model presentation is, up to rotation
    /// and inversion, a relator of `p`.
    fn presents_same(p: &Presentation, k: u32, l: u32) -> bool {
        let Ok(oracle) = TorusOracle::new(p, k, l) else { return false };
        let group = oracle.group;
        let target = if oracle.free_product { group.free_product_presentation() } else { group.presentation() };
        // Map target relators into p's alphabet by name.
        let rendered: Vec<String> = target.relator_strings();
        let pulled: Option<Vec<Word>> = rendered.iter().map(|s| p.parse_word(s).ok()).collect();
        let Some(pulled) = pulled else { return false };
        let closure = crate::presentation::relator_closure(p);
        pulled.iter().all(|r| {
            let (core, _) = crate::words::cyclic_reduce(r);
            closure.contains(&core)
        })
    }

    pub fn group(&self) -> TorusGroup {
        self.group
    }
}

impl WordOracle for TorusOracle {
    fn name(&self) -> &'static str {
        "torus-nf"
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        let nf = self.group.normalize_with(w, &self.roles).map_err(|e| OracleError(e.to_string()))?;
        Ok(if self.free_product { nf.project().is_identity() } else { nf.is_identity() })
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn canonical(&self, w: &Word) -> Option<String> {
        let nf = self.group.normalize_with(w, &self.roles).ok()?;
        Some(if self.free_product { nf.project().to_string() } else { nf.to_string() })
    }
}

/// Dehn's algorithm: "trivial" is always right, "nontrivial" assumes the
/// presentation is a Dehn presentation.
#[derive(Clone, Debug)]
pub struct DehnOracle {
    solver: DehnSolver,
}

impl DehnOracle {
    pub fn new(p: &Presentation) -> Self {
        DehnOracle { solver: DehnSolver::new(p) }
    }

    pub fn solver(&self) -> &DehnSolver {
        &self.solver
    }
}

pub const DEHN_ASSUMPTION: &str = "nontrivial verdicts assume the presentation is a Dehn presentation";

impl WordOracle for DehnOracle {
    fn name(&self) -> &'static str {
        "dehn"
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(self.solver.reduce(w).final_word.is_empty())
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn assumption(&self) -> Option<&'static str> {
        Some(DEHN_ASSUMPTION)
    }
}

/// The abelianization map; decides the word problem only for abelian groups.
#[derive(Clone, Debug)]
pub struct AbelianOracle {
    map: AbelianizationMap,
    exact: bool,
}

impl AbelianOracle {
    /// `group_is_abelian` is the caller's claim; without it, only
    /// "nontrivial" verdicts are certain.
    pub fn new(p: &Presentation, group_is_abelian: bool) -> Self {
        AbelianOracle { map: AbelianizationMap::new(p), exact: group_is_abelian }
    }

    pub fn map(&self) -> &AbelianizationMap {
        &self.map
    }
}

impl WordOracle for AbelianOracle {
    fn name(&self) -> &'static str {
        "abelian"
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(self.map.is_trivial(w))
    }

    fn is_exact(&self) -> bool {
        self.exact
    }

    fn canonical(&self, w: &Word) -> Option<String> {
        self.exact.then(|| format!("{:?}", self.map.image(w)))
    }

    fn assumption(&self) -> Option<&'static str> {
        (!self.exact).then_some("trivial verdicts only hold in the abelianization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_oracle() {
        let p = Presentation::free(&["a", "b"]).unwrap();
        let o = FreeOracle;
        assert!(o.is_trivial(&p.parse_word("a b b^-1 a^-1").unwrap()).unwrap());
        assert!(!o.is_trivial(&p.parse_word("a b a^-1 b^-1").unwrap()).unwrap());
        assert!(o.equal(&p.parse_word("a b b^-1").unwrap(), &p.parse_word("a").unwrap()).unwrap());
    }

    #[test]
    fn coset_oracle() {
        let p: Presentation = "< s1, s2 | s1^3, s2^5, (s1 s2)^2 >".parse().unwrap();
        let o = CosetOracle::enumerate(&p, 1000).unwrap();
        assert!(o.equal(&p.parse_word("s1^2").unwrap(), &p.parse_word("s1^-1").unwrap()).unwrap());
        assert!(!o.is_trivial(&p.parse_word("s2").unwrap()).unwrap());
        let free = Presentation::free(&["a"]).unwrap();
        assert!(CosetOracle::enumerate(&free, 10).is_err());
    }

    #[test]
    fn torus_detection() {
        let g = TorusGroup::new(3, 2).unwrap();
        assert_eq!(TorusOracle::detect(&g.presentation()), Some((3, 2)));
        assert_eq!(TorusOracle::detect(&g.free_product_presentation()), Some((3, 2)));
        let p: Presentation = "< u, v | u^4, v^3 >".parse().unwrap();
        assert_eq!(TorusOracle::detect(&p), Some((4, 3)));
        let q: Presentation = "< u, v | u^4 >".parse().unwrap();
        assert_eq!(TorusOracle::detect(&q), None);
        let r: Presentation = "< a, b | a^3, b^2 >".parse().unwrap();
        assert_eq!(TorusOracle::detect(&r), None);
    }

    #[test]
    fn torus_oracle_by_name() {
        let p: Presentation = "< v, u, t | t = u^3 = v^2 >".parse().unwrap();
        let o = TorusOracle::new(&p, 3, 2).unwrap();
        assert!(o.is_trivial(&p.parse_word("u u u v^-2").unwrap()).unwrap());
        assert!(!o.is_trivial(&p.parse_word("u v").unwrap()).unwrap());
        let fp: Presentation = "< u, v | u^3, v^2 >".parse().unwrap();
        let o = TorusOracle::new(&fp, 3, 2).unwrap();
        assert!(o.is_trivial(&fp.parse_word("u^3").unwrap()).unwrap());
        assert!(!o.is_trivial(&fp.parse_word("u v u v").unwrap()).unwrap());
    }

    #[test]
    fn dehn_oracle_flags_its_assumption() {
        let p: Presentation = "< a | a^3 >".parse().unwrap();
        let o = DehnOracle::new(&p);
        assert!(!o.is_exact());
        assert!(o.assumption().is_some());
        assert!(o.is_trivial(&p.parse_word("a^6").unwrap()).unwrap());
    }

    #[test]
    fn abelian_oracle_on_ladder_group() {
        // Z with generators 1 and 2
        let p: Presentation = "< a, b | a^2 b^-1 >".parse().unwrap();
        let o = AbelianOracle::new(&p, true);
        assert!(o.equal(&p.parse_word("a a").unwrap(), &p.parse_word("b").unwrap()).unwrap());
        assert!(!o.is_trivial(&p.parse_word("a").unwrap()).unwrap());
    }
}

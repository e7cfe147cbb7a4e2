//! Reaction networks: parsing, stoichiometry, motifs, and reductions.
//!
//! A network is an ordered list of species and an ordered list of reactions
//! between integer-coefficient complexes. Reaction order and species order
//! are semantic: they fix the rows and columns of the stoichiometric matrix
//! `N = β − α` and the reactant matrix `B = α`, and downstream objects
//! (extreme-ray matrices, convex-parameter Jacobians, certificates) are
//! reported in these orderings.
//!
//! The [`motif`] submodule locates `y ⇌ Y → y'` subnetworks, checks the
//! structural assumptions under which deleting the backward reaction `Y → y`
//! preserves the reduced characteristic polynomials up to a parameter
//! transport, and produces the reduced and normal-form networks.

mod parse;
pub mod motif;

pub use motif::{
    check_assumptions, find_motifs, motif_normal_form, remove_backward, AssumptionCheck,
    AssumptionReport, Motif, NormalMaps,
};

use crate::matrix::IMat;
use num_bigint::BigInt;

/// Errors in network parsing and validation.
#[derive(Debug, thiserror::Error)]
pub enum NetError {
    /// Malformed network text.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        /// 1-based line.
        line: usize,
        /// 1-based column.
        col: usize,
        /// What went wrong.
        msg: String,
    },
    /// A species was declared twice.
    #[error("species `{name}` declared more than once")]
    DuplicateSpecies {
        /// The repeated name.
        name: String,
    },
    /// A reaction label was used twice.
    #[error("reaction label `{label}` used more than once")]
    DuplicateLabel {
        /// The repeated label.
        label: String,
    },
    /// A reaction used a species missing from the explicit species list.
    #[error("line {line}: species `{name}` is not in the declared species list")]
    UndeclaredSpecies {
        /// 1-based line.
        line: usize,
        /// The unknown name.
        name: String,
    },
    /// The network has no reactions.
    #[error("network has no reactions")]
    Empty,
    /// A referenced reaction index was out of range.
    #[error("reaction index {index} out of range ({len} reactions)")]
    ReactionIndex {
        /// Offending index.
        index: usize,
        /// Number of reactions.
        len: usize,
    },
    /// A motif handle did not match the network it was used with.
    #[error("motif does not belong to this network: {reason}")]
    ForeignMotif {
        /// Why the motif was rejected.
        reason: String,
    },
}

/// A multiset of species with nonnegative integer coefficients, stored
/// densely (one slot per species of the ambient network).
pub type Complex = Vec<u32>;

/// One irreversible reaction `reactant → product`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    /// Reactant complex `α_·`.
    pub reactant: Complex,
    /// Product complex `β_·`.
    pub product: Complex,
    /// Unique label, e.g. `k4`.
    pub label: String,
}

impl Reaction {
    /// True when `species` has equal coefficients on both sides.
    pub fn is_catalyst(&self, species: usize) -> bool {
        self.reactant[species] == self.product[species]
    }
}

/// A mass-action reaction network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    species: Vec<String>,
    reactions: Vec<Reaction>,
}

impl Network {
    /// Parses the reaction DSL; see the crate-level docs and `fixtures/` for
    /// examples of the format.
    pub fn parse(input: &str) -> Result<Self, NetError> {
        parse::parse_network(input)
    }

    /// Builds a network from parts (used by tests and programmatic callers).
    pub fn from_parts(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self, NetError> {
        if reactions.is_empty() {
            return Err(NetError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for s in &species {
            if !seen.insert(s.clone()) {
                return Err(NetError::DuplicateSpecies { name: s.clone() });
            }
        }
        let mut labels = std::collections::HashSet::new();
        for r in &reactions {
            assert_eq!(r.reactant.len(), species.len(), "complex width mismatch");
            assert_eq!(r.product.len(), species.len(), "complex width mismatch");
            if !labels.insert(r.label.clone()) {
                return Err(NetError::DuplicateLabel {
                    label: r.label.clone(),
                });
            }
        }
        Ok(Network { species, reactions })
    }

    /// Number of species `n`.
    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    /// Number of reactions `r`.
    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    /// Species names in row order.
    pub fn species(&self) -> &[String] {
        &self.species
    }

    /// Index of a species name.
    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    /// Reactions in column order.
    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Reaction labels in column order.
    pub fn labels(&self) -> Vec<&str> {
        self.reactions.iter().map(|r| r.label.as_str()).collect()
    }

    /// Index of a reaction label.
    pub fn reaction_index(&self, label: &str) -> Option<usize> {
        self.reactions.iter().position(|r| r.label == label)
    }

    /// The stoichiometric matrix `N = β − α` (species × reactions).
    pub fn stoichiometric_matrix(&self) -> IMat {
        IMat::from_fn(self.n_species(), self.n_reactions(), |i, j| {
            let r = &self.reactions[j];
            BigInt::from(r.product[i]) - BigInt::from(r.reactant[i])
        })
    }

    /// The reactant-coefficient matrix `B = α` (species × reactions).
    pub fn reactant_matrix(&self) -> IMat {
        IMat::from_fn(self.n_species(), self.n_reactions(), |i, j| {
            BigInt::from(self.reactions[j].reactant[i])
        })
    }

    /// True when `species` has equal coefficients on both sides of every
    /// reaction (a global catalyst: its concentration never changes).
    pub fn is_global_catalyst(&self, species: usize) -> bool {
        self.reactions.iter().all(|r| r.is_catalyst(species))
    }

    /// Renders one complex, e.g. `S0 + 2*K` or `0`.
    pub fn complex_text(&self, complex: &[u32]) -> String {
        let mut parts = Vec::new();
        for (i, &c) in complex.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c == 1 {
                parts.push(self.species[i].clone());
            } else {
                parts.push(format!("{c}*{}", self.species[i]));
            }
        }
        if parts.is_empty() {
            "0".to_owned()
        } else {
            parts.join(" + ")
        }
    }

    /// Renders one reaction, e.g. `S0 + K -> KS0  [k1]`.
    pub fn reaction_text(&self, j: usize) -> String {
        let r = &self.reactions[j];
        format!(
            "{} -> {}  [{}]",
            self.complex_text(&r.reactant),
            self.complex_text(&r.product),
            r.label
        )
    }

    /// Multi-line human-readable listing of the network.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "species ({}): {}\n",
            self.n_species(),
            self.species.join(", ")
        ));
        out.push_str(&format!("reactions ({}):\n", self.n_reactions()));
        for j in 0..self.n_reactions() {
            out.push_str(&format!("  {}\n", self.reaction_text(j)));
        }
        out
    }

    /// Returns the network with the listed reaction removed; order and
    /// labels of the remaining reactions are preserved.
    pub fn without_reaction(&self, index: usize) -> Result<Self, NetError> {
        if index >= self.n_reactions() {
            return Err(NetError::ReactionIndex {
                index,
                len: self.n_reactions(),
            });
        }
        let mut reactions = self.reactions.clone();
        reactions.remove(index);
        Network::from_parts(self.species.clone(), reactions)
    }

    /// Returns the network with species and reactions permuted.
    ///
    /// `species_order[new] = old` and `reaction_order[new] = old`; both must
    /// be permutations.
    pub fn permuted(&self, species_order: &[usize], reaction_order: &[usize]) -> Self {
        assert_eq!(species_order.len(), self.n_species());
        assert_eq!(reaction_order.len(), self.n_reactions());
        let species: Vec<String> = species_order
            .iter()
            .map(|&o| self.species[o].clone())
            .collect();
        let reactions: Vec<Reaction> = reaction_order
            .iter()
            .map(|&o| {
                let r = &self.reactions[o];
                Reaction {
                    reactant: species_order.iter().map(|&s| r.reactant[s]).collect(),
                    product: species_order.iter().map(|&s| r.product[s]).collect(),
                    label: r.label.clone(),
                }
            })
            .collect();
        Network { species, reactions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Network {
        Network::parse(
            "species: A, B, C\n\
             A + B <=> C @ k1, k2\n\
             C -> 2*B @ k3\n",
        )
        .unwrap()
    }

    #[test]
    fn matrices_from_reactions() {
        let net = toy();
        assert_eq!(net.n_species(), 3);
        assert_eq!(net.n_reactions(), 3);
        let n = net.stoichiometric_matrix();
        let expect = IMat::from_i64_rows(&[&[-1, 1, 0], &[-1, 1, 2], &[1, -1, -1]]);
        assert_eq!(n, expect);
        let b = net.reactant_matrix();
        let expect_b = IMat::from_i64_rows(&[&[1, 0, 0], &[1, 0, 0], &[0, 1, 1]]);
        assert_eq!(b, expect_b);
    }

    #[test]
    fn labels_and_lookup() {
        let net = toy();
        assert_eq!(net.labels(), vec!["k1", "k2", "k3"]);
        assert_eq!(net.reaction_index("k2"), Some(1));
        assert_eq!(net.species_index("C"), Some(2));
        assert_eq!(net.reaction_text(0), "A + B -> C  [k1]");
        assert_eq!(net.reaction_text(2), "C -> 2*B  [k3]");
    }

    #[test]
    fn catalyst_detection() {
        let net = Network::parse(
            "species: E, S, P\n\
             S + E -> P + E @ k1\n\
             P -> S @ k2\n",
        )
        .unwrap();
        let e = net.species_index("E").unwrap();
        assert!(net.is_global_catalyst(e));
        assert!(!net.is_global_catalyst(net.species_index("S").unwrap()));
    }

    #[test]
    fn removal_preserves_order() {
        let net = toy();
        let reduced = net.without_reaction(1).unwrap();
        assert_eq!(reduced.labels(), vec!["k1", "k3"]);
        assert_eq!(reduced.n_reactions(), 2);
        assert!(net.without_reaction(9).is_err());
    }

    #[test]
    fn permutation_round_trip() {
        let net = toy();
        let sp = [2, 0, 1];
        let rp = [1, 2, 0];
        let p = net.permuted(&sp, &rp);
        assert_eq!(p.species(), &["C", "A", "B"]);
        assert_eq!(p.labels(), vec!["k2", "k3", "k1"]);
        // N transforms by the same permutations.
        let n = net.stoichiometric_matrix();
        let pn = p.stoichiometric_matrix();
        for (new_s, &old_s) in sp.iter().enumerate() {
            for (new_r, &old_r) in rp.iter().enumerate() {
                assert_eq!(pn.at(new_s, new_r), n.at(old_s, old_r));
            }
        }
    }
}

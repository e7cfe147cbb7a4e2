//! Built-in reaction networks.
//!
//! Every network the library is exercised against ships here as a text
//! fixture in the reaction DSL understood by [`crate::net::Network::parse`].
//! The DSL text is the single source of truth: matrices, rays, and
//! coefficients are always regenerated from it, never copied by hand.

use crate::net::{NetError, Network};

/// A named built-in network with its DSL source text.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    /// Stable lookup name (kebab-case).
    pub name: &'static str,
    /// One-line summary of the modelled mechanism.
    pub summary: &'static str,
    /// DSL source text.
    pub text: &'static str,
}

/// All built-in networks, in a stable presentation order.
pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "g1r",
        summary: "dual-site phosphorylation, mixed mechanism, irreversible dephosphorylation steps",
        text: include_str!("../fixtures/g1r.crn"),
    },
    Fixture {
        name: "g1",
        summary: "dual-site phosphorylation, mixed mechanism, with reversible product release",
        text: include_str!("../fixtures/g1.crn"),
    },
    Fixture {
        name: "g2",
        summary: "dual-site phosphorylation, mixed mechanism, phosphatase acting through a complex",
        text: include_str!("../fixtures/g2.crn"),
    },
    Fixture {
        name: "calcium",
        summary: "calcium oscillation model with autocatalytic activation",
        text: include_str!("../fixtures/calcium.crn"),
    },
    Fixture {
        name: "calcium-reduced",
        summary: "calcium oscillation model with the binding step made irreversible",
        text: include_str!("../fixtures/calcium_reduced.crn"),
    },
    Fixture {
        name: "proc-dist",
        summary: "dual-site phosphorylation, processive kinase and distributive phosphatase",
        text: include_str!("../fixtures/proc_dist.crn"),
    },
    Fixture {
        name: "proc-dist-reduced",
        summary: "processive/distributive mechanism with irreversible first binding",
        text: include_str!("../fixtures/proc_dist_reduced.crn"),
    },
    Fixture {
        name: "proc-dist-irreversible",
        summary: "processive/distributive mechanism with every binding irreversible",
        text: include_str!("../fixtures/proc_dist_irreversible.crn"),
    },
    Fixture {
        name: "dual-site",
        summary: "dual-site phosphorylation, fully distributive mechanism",
        text: include_str!("../fixtures/dual_site.crn"),
    },
];

/// Looks up a built-in fixture by name.
pub fn builtin(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

/// All built-in names, in presentation order.
pub fn names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

/// Parses a built-in network by name.
///
/// Returns `None` when the name is unknown; parse failures of shipped
/// fixtures are bugs and surface as errors.
pub fn network(name: &str) -> Option<Result<Network, NetError>> {
    builtin(name).map(|f| Network::parse(f.text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse() {
        for f in FIXTURES {
            let net = Network::parse(f.text)
                .unwrap_or_else(|e| panic!("fixture `{}` failed to parse: {e}", f.name));
            assert!(net.n_species() >= 4, "fixture `{}` too small", f.name);
            assert!(net.n_reactions() >= 5, "fixture `{}` too small", f.name);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(builtin("g1r").is_some());
        assert!(builtin("dual-site").is_some());
        assert!(builtin("nope").is_none());
        assert_eq!(names().len(), FIXTURES.len());
    }

    #[test]
    fn expected_shapes() {
        let cases: &[(&str, usize, usize)] = &[
            ("g1r", 8, 9),
            ("g1", 8, 10),
            ("g2", 8, 10),
            ("calcium", 4, 6),
            ("calcium-reduced", 4, 5),
            ("proc-dist", 9, 10),
            ("proc-dist-reduced", 9, 9),
            ("proc-dist-irreversible", 9, 7),
            ("dual-site", 9, 12),
        ];
        for &(name, ns, nr) in cases {
            let net = network(name).unwrap().unwrap();
            assert_eq!(net.n_species(), ns, "{name}: species");
            assert_eq!(net.n_reactions(), nr, "{name}: reactions");
        }
    }
}

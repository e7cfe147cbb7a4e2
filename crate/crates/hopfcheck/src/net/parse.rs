//! Parser for the reaction-network text format.
//!
//! ```text
//! # Phosphorylation core (comments run to end of line)
//! species: K, F, S0, S1, S2, KS0, FS2, KS1
//!
//! S0 + K <=> KS0 @ k1, k2
//! KS0 -> S1 + K @ k3
//! 0 -> X1              # the empty complex is written `0`
//! X1 + X4 -> 2*X1      # labels are optional: this one becomes k4
//! ```
//!
//! * `species:` fixes the row order of all matrices. It may be omitted, in
//!   which case species are numbered in order of first appearance.
//! * `->` declares one reaction, `<=>` a reversible pair (forward first).
//! * `@` attaches explicit labels (`@ k1` or, for `<=>`, `@ k1, k2`).
//!   Unlabelled directions get `k1, k2, …` in declaration order; explicit
//!   and implicit labels must not collide.

use super::{Complex, NetError, Network, Reaction};

struct PendingReaction {
    reactant: Complex,
    product: Complex,
    label: Option<String>,
}

pub(super) fn parse_network(input: &str) -> Result<Network, NetError> {
    let mut declared: Option<Vec<String>> = None;
    let mut species: Vec<String> = Vec::new();
    let mut pending: Vec<PendingReaction> = Vec::new();

    for (lineno, raw) in input.lines().enumerate() {
        let line_no = lineno + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("species:") {
            if declared.is_some() {
                return Err(err(line_no, 1, "duplicate `species:` line"));
            }
            let names: Vec<String> = rest
                .split(',')
                .map(|s| s.trim().to_owned())
                .filter(|s| !s.is_empty())
                .collect();
            if names.is_empty() {
                return Err(err(line_no, 1, "empty species list"));
            }
            for n in &names {
                validate_name(n, line_no)?;
            }
            let mut seen = std::collections::HashSet::new();
            for n in &names {
                if !seen.insert(n.clone()) {
                    return Err(NetError::DuplicateSpecies { name: n.clone() });
                }
            }
            species = names.clone();
            declared = Some(names);
            continue;
        }
        parse_reaction_line(line, line_no, &mut species, declared.is_some(), &mut pending)?;
    }

    if pending.is_empty() {
        return Err(NetError::Empty);
    }

    // Assign labels: explicit ones win; the rest are numbered sequentially
    // in declaration order, skipping numbers already taken explicitly.
    let taken: std::collections::HashSet<String> = pending
        .iter()
        .filter_map(|p| p.label.clone())
        .collect();
    {
        let mut seen = std::collections::HashSet::new();
        for p in &pending {
            if let Some(l) = &p.label {
                if !seen.insert(l.clone()) {
                    return Err(NetError::DuplicateLabel { label: l.clone() });
                }
            }
        }
    }
    let mut next_auto = 1usize;
    let mut reactions = Vec::with_capacity(pending.len());
    let width = species.len();
    for p in pending {
        let label = match p.label {
            Some(l) => l,
            None => loop {
                let candidate = format!("k{next_auto}");
                next_auto += 1;
                if !taken.contains(candidate.as_str()) {
                    break candidate;
                }
            },
        };
        let mut reactant = p.reactant;
        let mut product = p.product;
        reactant.resize(width, 0);
        product.resize(width, 0);
        reactions.push(Reaction {
            reactant,
            product,
            label,
        });
    }

    Network::from_parts(species, reactions)
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> NetError {
    NetError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn validate_name(name: &str, line: usize) -> Result<(), NetError> {
    let mut chars = name.chars();
    let ok_first = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let ok_rest = name.chars().skip(1).all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ok_first || !ok_rest {
        return Err(err(line, 1, format!("invalid species name `{name}`")));
    }
    Ok(())
}

fn parse_reaction_line(
    line: &str,
    line_no: usize,
    species: &mut Vec<String>,
    species_fixed: bool,
    pending: &mut Vec<PendingReaction>,
) -> Result<(), NetError> {
    let (body, label_part) = match line.split_once('@') {
        Some((b, l)) => (b.trim(), Some(l.trim())),
        None => (line, None),
    };
    let (reversible, lhs, rhs) = if let Some((l, r)) = body.split_once("<=>") {
        (true, l.trim(), r.trim())
    } else if let Some((l, r)) = body.split_once("->") {
        (false, l.trim(), r.trim())
    } else {
        return Err(err(line_no, 1, "expected `->` or `<=>`"));
    };
    let reactant = parse_complex(lhs, line_no, species, species_fixed)?;
    let product = parse_complex(rhs, line_no, species, species_fixed)?;

    let labels: Vec<Option<String>> = match label_part {
        None => {
            if reversible {
                vec![None, None]
            } else {
                vec![None]
            }
        }
        Some(text) => {
            let parts: Vec<&str> = text.split(',').map(str::trim).collect();
            let want = if reversible { 2 } else { 1 };
            if parts.len() != want || parts.iter().any(|p| p.is_empty()) {
                return Err(err(
                    line_no,
                    1,
                    format!(
                        "expected {want} label{} after `@`",
                        if want == 2 { "s" } else { "" }
                    ),
                ));
            }
            for p in &parts {
                validate_name(p, line_no)?;
            }
            parts.iter().map(|p| Some((*p).to_owned())).collect()
        }
    };

    pending.push(PendingReaction {
        reactant: reactant.clone(),
        product: product.clone(),
        label: labels[0].clone(),
    });
    if reversible {
        pending.push(PendingReaction {
            reactant: product,
            product: reactant,
            label: labels[1].clone(),
        });
    }
    Ok(())
}

fn parse_complex(
    text: &str,
    line_no: usize,
    species: &mut Vec<String>,
    species_fixed: bool,
) -> Result<Complex, NetError> {
    let mut coeffs = vec![0u32; species.len()];
    let text = text.trim();
    if text == "0" {
        return Ok(coeffs);
    }
    if text.is_empty() {
        return Err(err(line_no, 1, "empty complex (write `0` explicitly)"));
    }
    for part in text.split('+') {
        let part = part.trim();
        if part.is_empty() {
            return Err(err(line_no, 1, "empty summand in complex"));
        }
        let (coeff, name) = match part.split_once('*') {
            Some((c, n)) => {
                let c: u32 = c.trim().parse().map_err(|_| {
                    err(line_no, 1, format!("invalid coefficient `{}`", c.trim()))
                })?;
                if c == 0 {
                    return Err(err(line_no, 1, "zero coefficient in complex"));
                }
                (c, n.trim())
            }
            None => (1, part),
        };
        validate_name(name, line_no)?;
        let idx = match species.iter().position(|s| s == name) {
            Some(i) => i,
            None => {
                if species_fixed {
                    return Err(NetError::UndeclaredSpecies {
                        line: line_no,
                        name: name.to_owned(),
                    });
                }
                species.push(name.to_owned());
                coeffs.push(0);
                species.len() - 1
            }
        };
        coeffs[idx] = coeffs[idx]
            .checked_add(coeff)
            .ok_or_else(|| err(line_no, 1, "coefficient overflow"))?;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversible_expands_forward_first() {
        let net = Network::parse("A <=> B @ kf, kb").unwrap();
        assert_eq!(net.labels(), vec!["kf", "kb"]);
        let n = net.stoichiometric_matrix();
        use num_bigint::BigInt;
        assert_eq!(*n.at(0, 0), BigInt::from(-1)); // A consumed forward
        assert_eq!(*n.at(0, 1), BigInt::from(1)); // A produced backward
    }

    #[test]
    fn auto_labels_skip_taken_numbers() {
        let net = Network::parse(
            "A -> B @ k2\n\
             B -> A\n\
             A -> 2*B\n",
        )
        .unwrap();
        // Auto numbering fills k1, then skips k2 (explicitly taken), so the
        // third reaction becomes k3.
        assert_eq!(net.labels(), vec!["k2", "k1", "k3"]);
    }

    #[test]
    fn empty_complex_and_coefficients() {
        let net = Network::parse(
            "species: X1, X2\n\
             0 <=> X1 @ k1, k2\n\
             X1 + X1 -> 2*X2 @ k3\n",
        )
        .unwrap();
        let r3 = &net.reactions()[2];
        assert_eq!(r3.reactant, vec![2, 0]);
        assert_eq!(r3.product, vec![0, 2]);
        let r1 = &net.reactions()[0];
        assert_eq!(r1.reactant, vec![0, 0]);
    }

    #[test]
    fn undeclared_species_rejected_when_list_given() {
        let e = Network::parse("species: A\nA -> Z @ k1\n").unwrap_err();
        assert!(matches!(e, NetError::UndeclaredSpecies { name, .. } if name == "Z"));
    }

    #[test]
    fn inferred_species_order_is_first_appearance() {
        let net = Network::parse("B -> A @ k1\nA -> C @ k2\n").unwrap();
        assert_eq!(net.species(), &["B", "A", "C"]);
    }

    #[test]
    fn label_arity_enforced() {
        assert!(Network::parse("A <=> B @ k1").is_err());
        assert!(Network::parse("A -> B @ k1, k2").is_err());
        assert!(matches!(
            Network::parse("A -> B @ k1\nB -> A @ k1\n").unwrap_err(),
            NetError::DuplicateLabel { .. }
        ));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let net = Network::parse(
            "# heading\n\
             \n\
             species: A, B  # inline comment\n\
             A -> B @ k1  # another\n",
        )
        .unwrap();
        assert_eq!(net.n_reactions(), 1);
    }

    #[test]
    fn parse_errors_positioned() {
        let e = Network::parse("A -> B @ k1\nA = B\n").unwrap_err();
        match e {
            NetError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}

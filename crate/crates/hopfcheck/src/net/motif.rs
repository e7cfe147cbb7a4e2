//! Motif detection, structural assumption checks, and backward-reaction
//! removal.
//!
//! A *motif* is a reversible formation of an intermediate species together
//! with a conversion that consumes it: `y ⇌ Y → y′`, where `Y` is a single
//! species with coefficient one. Deleting the backward reaction `Y → y`
//! preserves the family of reduced characteristic polynomials — and hence
//! the possible Hopf behaviour — provided the network around the motif is
//! constrained enough; [`check_assumptions`] evaluates those constraints
//! one by one and reports which hold.
//!
//! The constraints single out two *binder* species `X₁`, `X₂` with
//! `y = X₁ + X₂`: the intermediate appears nowhere else, `X₁` is consumed
//! only by the binding, and `X₂` participates elsewhere only in ways that
//! leave its net production untouched. When they hold, [`motif_normal_form`]
//! permutes the network so the binders and intermediate come first and the
//! motif reactions come last — the shape the parameter-transport machinery
//! expects — and [`remove_backward`] deletes the unbinding reaction.

use serde::Serialize;

use super::{Complex, NetError, Network};

/// A located motif: three reaction indices realizing `y ⇌ Y → y′` plus the
/// species index of the intermediate `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Motif {
    /// Binding step `y → Y`.
    pub forward: usize,
    /// Unbinding step `Y → y` (exact reverse of `forward`).
    pub backward: usize,
    /// Conversion step `Y → y′`.
    pub conversion: usize,
    /// Species index of the intermediate `Y`.
    pub intermediate: usize,
}

/// One structural condition, evaluated with a human-readable outcome.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AssumptionCheck {
    /// Stable short identifier (`"A1"` … `"A5"`).
    pub id: String,
    /// Whether the condition holds.
    pub passed: bool,
    /// Why it passed or failed, in terms of species and reaction labels.
    pub detail: String,
}

/// Outcome of [`check_assumptions`]: the five structural conditions under
/// which removing the unbinding reaction is conservative.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AssumptionReport {
    /// True when every condition passed.
    pub satisfied: bool,
    /// The individual conditions, in order.
    pub checks: Vec<AssumptionCheck>,
    /// Species index cast as the binder `X₁` (set when the binding form is
    /// recognized).
    pub x1: Option<usize>,
    /// Species index cast as the binder `X₂`.
    pub x2: Option<usize>,
    /// 1 when the conversion releases `X₂` again, 0 when it sequesters
    /// both binders.
    pub delta: u8,
}

/// Permutations taking normal-form species/reaction indices back to the
/// network [`motif_normal_form`] was given (`order[new] = old`).
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalMaps {
    /// Species permutation, `species_order[new] = old`.
    pub species_order: Vec<usize>,
    /// Reaction permutation, `reaction_order[new] = old`.
    pub reaction_order: Vec<usize>,
}

/// Returns the species index when `c` consists of exactly one species with
/// coefficient one.
fn single_unit_species(c: &Complex) -> Option<usize> {
    let mut found = None;
    for (i, &coef) in c.iter().enumerate() {
        match coef {
            0 => {}
            1 if found.is_none() => found = Some(i),
            _ => return None,
        }
    }
    found
}

/// Lists every motif of `net`, in lexicographic order of
/// `(forward, backward, conversion)`.
///
/// A triple qualifies when the forward product is a single species `Y` with
/// coefficient one, the backward reaction is its exact reverse, and the
/// conversion is any further reaction consuming exactly `Y`. No surrounding
/// conditions are checked here; see [`check_assumptions`].
pub fn find_motifs(net: &Network) -> Vec<Motif> {
    let rs = net.reactions();
    let mut out = Vec::new();
    for (f, rf) in rs.iter().enumerate() {
        let Some(y) = single_unit_species(&rf.product) else {
            continue;
        };
        for (b, rb) in rs.iter().enumerate() {
            if b == f
                || single_unit_species(&rb.reactant) != Some(y)
                || rb.product != rf.reactant
            {
                continue;
            }
            for (c, rc) in rs.iter().enumerate() {
                if c == f || c == b || single_unit_species(&rc.reactant) != Some(y) {
                    continue;
                }
                out.push(Motif {
                    forward: f,
                    backward: b,
                    conversion: c,
                    intermediate: y,
                });
            }
        }
    }
    out
}

/// Checks that `m` genuinely locates a motif of `net`.
fn validate_motif(net: &Network, m: &Motif) -> Result<(), NetError> {
    let r = net.n_reactions();
    for (what, idx) in [
        ("forward", m.forward),
        ("backward", m.backward),
        ("conversion", m.conversion),
    ] {
        if idx >= r {
            return Err(NetError::ForeignMotif {
                reason: format!("{what} reaction index {idx} out of range ({r} reactions)"),
            });
        }
    }
    if m.forward == m.backward || m.forward == m.conversion || m.backward == m.conversion {
        return Err(NetError::ForeignMotif {
            reason: "the three motif reactions must be distinct".into(),
        });
    }
    if m.intermediate >= net.n_species() {
        return Err(NetError::ForeignMotif {
            reason: format!(
                "intermediate species index {} out of range ({} species)",
                m.intermediate,
                net.n_species()
            ),
        });
    }
    let rs = net.reactions();
    if single_unit_species(&rs[m.forward].product) != Some(m.intermediate) {
        return Err(NetError::ForeignMotif {
            reason: format!(
                "forward reaction {} does not produce exactly one unit of {}",
                rs[m.forward].label,
                net.species()[m.intermediate]
            ),
        });
    }
    if single_unit_species(&rs[m.backward].reactant) != Some(m.intermediate)
        || rs[m.backward].product != rs[m.forward].reactant
    {
        return Err(NetError::ForeignMotif {
            reason: format!(
                "backward reaction {} is not the exact reverse of {}",
                rs[m.backward].label, rs[m.forward].label
            ),
        });
    }
    if single_unit_species(&rs[m.conversion].reactant) != Some(m.intermediate) {
        return Err(NetError::ForeignMotif {
            reason: format!(
                "conversion reaction {} does not consume exactly one unit of {}",
                rs[m.conversion].label,
                net.species()[m.intermediate]
            ),
        });
    }
    Ok(())
}

/// The two species of a binding complex `X₁ + X₂` (distinct, coefficient
/// one each), if `c` has that form.
fn binder_pair(c: &Complex) -> Option<(usize, usize)> {
    let mut found = Vec::with_capacity(2);
    for (i, &coef) in c.iter().enumerate() {
        match coef {
            0 => {}
            1 => found.push(i),
            _ => return None,
        }
    }
    match found[..] {
        [p, q] => Some((p, q)),
        _ => None,
    }
}

/// Evaluates, for one `(x1, x2)` role assignment, the conditions that
/// depend on the roles. Returns checks `A3`, `A4`, `A5` in order.
fn role_checks(net: &Network, m: &Motif, x1: usize, x2: usize, delta: u8) -> Vec<AssumptionCheck> {
    let rs = net.reactions();
    let species = net.species();
    let motif_rx = [m.forward, m.backward, m.conversion];
    let mut checks = Vec::with_capacity(3);

    // A3: the conversion must release `c + δ·X₂` where the complex `c` is
    // free of both binders and of the intermediate.
    let mut residue = rs[m.conversion].product.clone();
    residue[x2] -= u32::from(delta);
    let mut a3_bad = Vec::new();
    for i in [x1, x2, m.intermediate] {
        if residue[i] > 0 {
            a3_bad.push(species[i].as_str());
        }
    }
    checks.push(if a3_bad.is_empty() {
        AssumptionCheck {
            id: "A3".into(),
            passed: true,
            detail: format!(
                "conversion residue `{}` avoids the binders and the intermediate",
                net.complex_text(&residue)
            ),
        }
    } else {
        AssumptionCheck {
            id: "A3".into(),
            passed: false,
            detail: format!(
                "conversion residue `{}` still contains {}",
                net.complex_text(&residue),
                a3_bad.join(", ")
            ),
        }
    });

    // A4: X₁ is consumed only by the binding step.
    let mut a4_bad = Vec::new();
    for (j, rx) in rs.iter().enumerate() {
        if !motif_rx.contains(&j) && rx.reactant[x1] > 0 {
            a4_bad.push(rx.label.as_str());
        }
    }
    checks.push(if a4_bad.is_empty() {
        AssumptionCheck {
            id: "A4".into(),
            passed: true,
            detail: format!("{} is a reactant only inside the motif", species[x1]),
        }
    } else {
        AssumptionCheck {
            id: "A4".into(),
            passed: false,
            detail: format!(
                "{} is a reactant of {} outside the motif",
                species[x1],
                a4_bad.join(", ")
            ),
        }
    });

    // A5: outside reactions may involve X₂ only in ways that keep its net
    // production at zero. With δ=1 it must act as a per-reaction catalyst
    // (equal coefficients on both sides) with X₁ absent from the product;
    // with δ=0 it may appear only in products. Coefficients above one are
    // rejected outright rather than interpreted.
    let mut a5_bad = Vec::new();
    let mut a5_involved = 0usize;
    for (j, rx) in rs.iter().enumerate() {
        if motif_rx.contains(&j) {
            continue;
        }
        let (a, b) = (rx.reactant[x2], rx.product[x2]);
        if a == 0 && b == 0 {
            continue;
        }
        a5_involved += 1;
        if a > 1 || b > 1 {
            a5_bad.push(format!("{}: coefficient of {} exceeds one", rx.label, species[x2]));
            continue;
        }
        if delta == 1 {
            if a != b {
                a5_bad.push(format!(
                    "{}: {} is not a catalyst there",
                    rx.label, species[x2]
                ));
            } else if rx.product[x1] > 0 {
                a5_bad.push(format!("{}: {} appears in the product", rx.label, species[x1]));
            }
        } else if a > 0 {
            a5_bad.push(format!(
                "{}: {} appears as a reactant",
                rx.label, species[x2]
            ));
        }
    }
    checks.push(if a5_bad.is_empty() {
        AssumptionCheck {
            id: "A5".into(),
            passed: true,
            detail: if a5_involved == 0 {
                format!("no reaction outside the motif involves {}", species[x2])
            } else {
                format!(
                    "all {} outside reactions involving {} are compatible",
                    a5_involved, species[x2]
                )
            },
        }
    } else {
        AssumptionCheck {
            id: "A5".into(),
            passed: false,
            detail: a5_bad.join("; "),
        }
    });

    checks
}

/// Evaluates the five structural conditions for reducing `net` at `m`.
///
/// The conditions, in order:
///
/// 1. the bound complex is `X₁ + X₂` with distinct species, coefficient one
///    each, both different from the intermediate;
/// 2. the intermediate appears in no reaction outside the motif;
/// 3. the conversion releases `c + δ·X₂` with `c` free of `X₁`, `X₂`, and
///    the intermediate (`δ ∈ {0, 1}`);
/// 4. `X₁` is a reactant only inside the motif;
/// 5. outside reactions involve `X₂` only with zero net production: as a
///    per-reaction catalyst without releasing `X₁` when `δ = 1`, or purely
///    as a product when `δ = 0`.
///
/// Which binder plays `X₂` is read off the conversion product when
/// possible; when the conversion releases neither binder (`δ = 0`) both
/// assignments are tried and the first fully passing one (in species
/// order) is reported.
///
/// Errors only when `m` is not a motif of `net`; failing conditions are
/// reported, not raised.
pub fn check_assumptions(net: &Network, m: &Motif) -> Result<AssumptionReport, NetError> {
    validate_motif(net, m)?;
    let rs = net.reactions();
    let species = net.species();
    let y = &rs[m.forward].reactant;

    // A2 does not depend on the role assignment.
    let mut a2_bad = Vec::new();
    for (j, rx) in rs.iter().enumerate() {
        if [m.forward, m.backward, m.conversion].contains(&j) {
            continue;
        }
        if rx.reactant[m.intermediate] > 0 || rx.product[m.intermediate] > 0 {
            a2_bad.push(rx.label.as_str());
        }
    }
    let a2 = if a2_bad.is_empty() {
        AssumptionCheck {
            id: "A2".into(),
            passed: true,
            detail: format!("{} appears only in the motif", species[m.intermediate]),
        }
    } else {
        AssumptionCheck {
            id: "A2".into(),
            passed: false,
            detail: format!(
                "{} also appears in {}",
                species[m.intermediate],
                a2_bad.join(", ")
            ),
        }
    };

    let Some((p, q)) = binder_pair(y).filter(|&(p, q)| p != m.intermediate && q != m.intermediate)
    else {
        let a1 = AssumptionCheck {
            id: "A1".into(),
            passed: false,
            detail: format!(
                "bound complex `{}` is not a pair of distinct unit species",
                net.complex_text(y)
            ),
        };
        let skipped = |id: &str| AssumptionCheck {
            id: id.into(),
            passed: false,
            detail: "not evaluated: the binding form was not recognized".into(),
        };
        return Ok(AssumptionReport {
            satisfied: false,
            checks: vec![a1, a2, skipped("A3"), skipped("A4"), skipped("A5")],
            x1: None,
            x2: None,
            delta: 0,
        });
    };

    // Candidate role assignments (x1, x2): the conversion product decides
    // X₂ when it releases exactly one binder; otherwise both orders are
    // tried, species order first.
    let yp = &rs[m.conversion].product;
    let assignments: Vec<(usize, usize)> = if yp[p] > 0 && yp[q] == 0 {
        vec![(q, p)]
    } else if yp[q] > 0 && yp[p] == 0 {
        vec![(p, q)]
    } else {
        vec![(p, q), (q, p)]
    };

    let mut best: Option<(usize, usize, u8, Vec<AssumptionCheck>, usize)> = None;
    for &(x1, x2) in &assignments {
        let delta = u8::from(yp[x2] > 0);
        let checks = role_checks(net, m, x1, x2, delta);
        let passed = checks.iter().filter(|c| c.passed).count();
        let better = match &best {
            None => true,
            Some((.., best_passed)) => passed > *best_passed,
        };
        if better {
            let all = passed == checks.len();
            best = Some((x1, x2, delta, checks, passed));
            if all {
                break;
            }
        }
    }
    let (x1, x2, delta, role, _) = best.expect("at least one role assignment");

    let a1 = AssumptionCheck {
        id: "A1".into(),
        passed: true,
        detail: format!(
            "binding {} + {} ⇌ {} with conversion to `{}`",
            species[x1],
            species[x2],
            species[m.intermediate],
            net.complex_text(yp)
        ),
    };
    let mut checks = vec![a1, a2];
    checks.extend(role);
    let satisfied = checks.iter().all(|c| c.passed);
    Ok(AssumptionReport {
        satisfied,
        checks,
        x1: Some(x1),
        x2: Some(x2),
        delta,
    })
}

/// Permutes `net` so the binders and intermediate are species `0, 1, 2`
/// and the motif reactions come last, ordered conversion, binding,
/// unbinding. Returns the permuted network, the motif relocated in it, and
/// the permutations applied.
///
/// `x1` and `x2` are the binder species indices in `net`'s ordering (as
/// reported by [`check_assumptions`]); all other species and reactions
/// keep their relative order.
pub fn motif_normal_form(
    net: &Network,
    m: &Motif,
    x1: usize,
    x2: usize,
) -> Result<(Network, Motif, NormalMaps), NetError> {
    validate_motif(net, m)?;
    let y = &net.reactions()[m.forward].reactant;
    if x1 == x2
        || binder_pair(y)
            .map(|(p, q)| (x1, x2) != (p, q) && (x1, x2) != (q, p))
            .unwrap_or(true)
    {
        return Err(NetError::ForeignMotif {
            reason: format!(
                "species {x1}, {x2} are not the binder pair of `{}`",
                net.complex_text(y)
            ),
        });
    }

    let n = net.n_species();
    let r = net.n_reactions();
    let head = [x1, x2, m.intermediate];
    let mut species_order = head.to_vec();
    species_order.extend((0..n).filter(|s| !head.contains(s)));
    let motif_rx = [m.conversion, m.forward, m.backward];
    let mut reaction_order: Vec<usize> = (0..r).filter(|j| !motif_rx.contains(j)).collect();
    reaction_order.extend(motif_rx);

    let permuted = net.permuted(&species_order, &reaction_order);
    let relocated = Motif {
        forward: r - 2,
        backward: r - 1,
        conversion: r - 3,
        intermediate: 2,
    };
    Ok((
        permuted,
        relocated,
        NormalMaps {
            species_order,
            reaction_order,
        },
    ))
}

/// Deletes the unbinding reaction of `m` from `net`.
///
/// The species list and the order of the surviving reactions are
/// unchanged. The returned motif locates the binding and conversion steps
/// in the reduced network; its `backward` field keeps the deleted
/// reaction's old index, which no longer names a reaction there.
pub fn remove_backward(net: &Network, m: &Motif) -> Result<(Network, Motif), NetError> {
    validate_motif(net, m)?;
    let reduced = net.without_reaction(m.backward)?;
    let shift = |j: usize| j - usize::from(j > m.backward);
    let relocated = Motif {
        forward: shift(m.forward),
        backward: m.backward,
        conversion: shift(m.conversion),
        intermediate: m.intermediate,
    };
    Ok((reduced, relocated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn fixture(name: &str) -> Network {
        fixtures::network(name).unwrap().unwrap()
    }

    fn motif_with_intermediate(net: &Network, name: &str) -> Motif {
        let idx = net.species_index(name).unwrap();
        let found: Vec<Motif> = find_motifs(net)
            .into_iter()
            .filter(|m| m.intermediate == idx)
            .collect();
        assert_eq!(found.len(), 1, "expected a unique motif at {name}");
        found[0]
    }

    #[test]
    fn fully_distributive_network_has_four_motifs() {
        let net = fixture("dual-site");
        let motifs = find_motifs(&net);
        assert_eq!(motifs.len(), 4);
        let mut intermediates: Vec<&str> = motifs
            .iter()
            .map(|m| net.species()[m.intermediate].as_str())
            .collect();
        intermediates.sort_unstable();
        assert_eq!(intermediates, ["FS1", "FS2", "KS0", "KS1"]);
    }

    #[test]
    fn transport_network_has_one_motif_failing_a4() {
        let net = fixture("calcium");
        let motifs = find_motifs(&net);
        assert_eq!(motifs.len(), 1);
        let m = motifs[0];
        assert_eq!(net.species()[m.intermediate], "X3");
        let report = check_assumptions(&net, &m).unwrap();
        assert!(!report.satisfied);
        let a4 = report.checks.iter().find(|c| c.id == "A4").unwrap();
        assert!(!a4.passed, "A4 should fail: {}", a4.detail);
        // The other binder-independent conditions hold.
        for id in ["A1", "A2", "A3"] {
            let c = report.checks.iter().find(|c| c.id == id).unwrap();
            assert!(c.passed, "{id} unexpectedly failed: {}", c.detail);
        }
        assert_eq!(report.delta, 1);
    }

    #[test]
    fn mixed_mechanism_phosphatase_motif_passes_with_recycling() {
        let net = fixture("g1");
        let m = motif_with_intermediate(&net, "FS2");
        let report = check_assumptions(&net, &m).unwrap();
        assert!(report.satisfied, "checks: {:?}", report.checks);
        assert_eq!(report.delta, 1);
        assert_eq!(net.species()[report.x1.unwrap()], "S2");
        assert_eq!(net.species()[report.x2.unwrap()], "F");
    }

    #[test]
    fn processive_kinase_motif_passes_with_sequestration() {
        let net = fixture("proc-dist");
        let m = motif_with_intermediate(&net, "ES0");
        let report = check_assumptions(&net, &m).unwrap();
        assert!(report.satisfied, "checks: {:?}", report.checks);
        assert_eq!(report.delta, 0);
        let binders = [
            net.species()[report.x1.unwrap()].as_str(),
            net.species()[report.x2.unwrap()].as_str(),
        ];
        assert!(binders.contains(&"E") && binders.contains(&"S0"));
    }

    #[test]
    fn removing_the_unbinding_reaction_matches_reduced_fixtures() {
        let g1 = fixture("g1");
        let m = motif_with_intermediate(&g1, "FS2");
        let (reduced, rm) = remove_backward(&g1, &m).unwrap();
        assert_eq!(reduced, fixture("g1r"));
        assert_eq!(rm.intermediate, m.intermediate);
        assert_eq!(reduced.reactions()[rm.forward].label, "k8");
        assert_eq!(reduced.reactions()[rm.conversion].label, "k9");

        let calcium = fixture("calcium");
        let m = find_motifs(&calcium)[0];
        let (reduced, _) = remove_backward(&calcium, &m).unwrap();
        assert_eq!(reduced, fixture("calcium-reduced"));
    }

    #[test]
    fn no_motif_survives_its_own_reduction() {
        for name in ["g1", "calcium", "proc-dist", "dual-site"] {
            let net = fixture(name);
            for m in find_motifs(&net) {
                let removed_text = net.reaction_text(m.backward);
                let (reduced, _) = remove_backward(&net, &m).unwrap();
                for m2 in find_motifs(&reduced) {
                    for j in [m2.forward, m2.backward, m2.conversion] {
                        assert_ne!(reduced.reaction_text(j), removed_text);
                    }
                }
            }
        }
    }

    #[test]
    fn normal_form_orders_binders_first_and_motif_last() {
        let net = fixture("g1");
        let m = motif_with_intermediate(&net, "FS2");
        let report = check_assumptions(&net, &m).unwrap();
        let (nf, nm, maps) =
            motif_normal_form(&net, &m, report.x1.unwrap(), report.x2.unwrap()).unwrap();
        assert_eq!(&nf.species()[..3], ["S2", "F", "FS2"]);
        assert_eq!(nm.intermediate, 2);
        let r = nf.n_reactions();
        assert_eq!((nm.conversion, nm.forward, nm.backward), (r - 3, r - 2, r - 1));
        // Complexes render in the permuted species order (S2 first, then F).
        assert_eq!(nf.reaction_text(nm.conversion), "FS2 -> F + S1  [k9]");
        assert_eq!(nf.reaction_text(nm.forward), "S2 + F -> FS2  [k8]");
        assert_eq!(nf.reaction_text(nm.backward), "FS2 -> S2 + F  [k10]");

        // The permutations reproduce the permuted network exactly, and the
        // multiset of reactions is untouched.
        assert_eq!(
            net.permuted(&maps.species_order, &maps.reaction_order),
            nf
        );
        // Reaction text renders in each network's own species order, so
        // compare name-keyed complexes instead.
        let canon = |net: &Network| -> Vec<(String, Vec<(String, u32)>, Vec<(String, u32)>)> {
            let name_pairs = |c: &[u32]| {
                let mut v: Vec<(String, u32)> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (net.species()[i].clone(), k))
                    .collect();
                v.sort();
                v
            };
            let mut v: Vec<_> = net
                .reactions()
                .iter()
                .map(|rx| (rx.label.clone(), name_pairs(&rx.reactant), name_pairs(&rx.product)))
                .collect();
            v.sort();
            v
        };
        assert_eq!(canon(&net), canon(&nf));
    }

    #[test]
    fn foreign_motifs_are_rejected() {
        let net = fixture("g1");
        let bogus = Motif {
            forward: 0,
            backward: 1,
            conversion: 1,
            intermediate: 0,
        };
        assert!(matches!(
            check_assumptions(&net, &bogus),
            Err(NetError::ForeignMotif { .. })
        ));
        let out_of_range = Motif {
            forward: 99,
            backward: 1,
            conversion: 2,
            intermediate: 0,
        };
        assert!(matches!(
            remove_backward(&net, &out_of_range),
            Err(NetError::ForeignMotif { .. })
        ));
    }
}

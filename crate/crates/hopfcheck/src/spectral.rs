//! Symbolic Jacobian, characteristic coefficients, and Hurwitz determinants
//! in convex parameters.
//!
//! At a positive steady state the Jacobian of a mass-action network can be
//! rewritten in the convex parameters `(h, ℓ)`: reciprocal concentrations
//! `h_i = 1/x_i` (one per species) and cone coordinates `ℓ_c ≥ 0` (one per
//! extreme ray of the flux cone). Its entries become polynomials
//!
//! ```text
//! J[i][j] = h_j · Σ_k N[i][k] · B[j][k] · (E·ℓ)_k
//! ```
//!
//! linear in `ℓ` and carrying `h_j` exactly once per column. The
//! characteristic polynomial factors as `z^(n−s) · (z^s + a_1 z^(s−1) + … +
//! a_s)` with `s = rank(N)`; the `a_i` are computed exactly by a
//! division-free Berkowitz pass and the vanishing of the trailing
//! coefficients is verified, not assumed.
//!
//! Stability questions reduce to signs of the leading principal Hurwitz
//! minors `det(H_i)`. Those determinants are expanded once as integer
//! polynomial templates in abstract coefficients `a_1 … a_s`, then
//! evaluated on the network's actual coefficients. Because the `a_i` are
//! large, evaluation is streamed: each `a_i` is split into its ℓ-monomial
//! groups, template products are bucketed by the resulting ℓ-monomial of
//! the output, and each output group is assembled, handed to a sink, and
//! freed before the next one — peak memory stays at one group. Coefficient
//! signs per group are exactly the coefficient signs of the full
//! determinant, so positivity of every group certifies positivity of
//! `det(H_i)` on the whole open parameter cone.

use crate::matrix::{self, reference, IMat, Mat};
use crate::poly::{graded_lex, mono_add, SignVerdict, SparsePoly, VarTable};
use crate::ring::PolyRing;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rustc_hash::FxHashMap;

/// Errors from symbolic spectral analysis.
#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    /// Polynomial arithmetic failed (exponent overflow and friends).
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
    /// Input matrices have inconsistent shapes.
    #[error("matrix shapes are inconsistent: {reason}")]
    Shape {
        /// What did not line up.
        reason: String,
    },
    /// A characteristic coefficient beyond the stoichiometric rank failed
    /// to vanish — the inputs do not describe a mass-action steady-state
    /// Jacobian of the claimed rank.
    #[error("characteristic coefficient {index} should vanish beyond rank {rank} but does not")]
    NonvanishingLowCoefficient {
        /// 1-based coefficient index.
        index: usize,
        /// The stoichiometric rank.
        rank: usize,
    },
}

type Result<T, E = SpectralError> = std::result::Result<T, E>;

/// The symbolic steady-state Jacobian of a network in convex parameters,
/// together with its reduced characteristic coefficients.
#[derive(Debug, Clone)]
pub struct ConvexSystem {
    /// Variable table: `h1..hn` then `l1..lm`.
    pub vars: VarTable,
    /// Number of species `n`.
    pub n_species: usize,
    /// Number of extreme rays `m`.
    pub n_rays: usize,
    /// Stoichiometric rank `s` (degree of the reduced characteristic
    /// polynomial).
    pub s: usize,
    /// The `n × n` Jacobian with polynomial entries.
    pub jacobian: Mat<SparsePoly>,
    /// Reduced characteristic coefficients; `coeffs[i]` is `a_{i+1}`.
    pub coeffs: Vec<SparsePoly>,
}

impl ConvexSystem {
    /// The coefficient `a_i` (1-based, `1 ≤ i ≤ s`).
    pub fn a(&self, i: usize) -> &SparsePoly {
        assert!(i >= 1 && i <= self.s, "coefficient index out of range");
        &self.coeffs[i - 1]
    }

    /// Variable indices of the ray coordinates `l1..lm`.
    pub fn lambda_vars(&self) -> Vec<usize> {
        (self.n_species..self.n_species + self.n_rays).collect()
    }

    /// Variable index of the reciprocal concentration of species `i`
    /// (0-based species index).
    pub fn h_var(&self, species: usize) -> usize {
        assert!(species < self.n_species);
        species
    }

    /// Variable index of the ray coordinate `c` (0-based ray index).
    pub fn l_var(&self, ray: usize) -> usize {
        assert!(ray < self.n_rays);
        self.n_species + ray
    }

    /// ℓ-monomial grouping of each coefficient, ready for streaming.
    pub fn grouped_coeffs(&self) -> Vec<GroupedPoly> {
        let lv = self.lambda_vars();
        self.coeffs
            .iter()
            .map(|p| GroupedPoly::from_poly(p, &lv))
            .collect()
    }

    /// A copy of the system restricted to the stratum where the listed rays
    /// (0-based) carry zero flux.
    pub fn restricted(&self, zero_rays: &[usize]) -> ConvexSystem {
        let vars: Vec<usize> = zero_rays.iter().map(|&rr| self.l_var(rr)).collect();
        ConvexSystem {
            vars: self.vars.clone(),
            n_species: self.n_species,
            n_rays: self.n_rays,
            s: self.s,
            jacobian: self.jacobian.map(|p| p.zero_out(&vars)),
            coeffs: self.coeffs.iter().map(|c| c.zero_out(&vars)).collect(),
        }
    }
}

/// Builds the convex-parameter Jacobian and reduced characteristic
/// coefficients from a stoichiometric matrix `N`, a reactant-coefficient
/// matrix `B` (species × reactions), and a matrix `E` whose columns span
/// the flux cone's extreme rays.
pub fn convex_system(n: &IMat, b: &IMat, e: &IMat) -> Result<ConvexSystem> {
    let ns = n.rows();
    let r = n.cols();
    if b.rows() != ns || b.cols() != r {
        return Err(SpectralError::Shape {
            reason: format!(
                "reactant matrix is {}×{}, expected {}×{}",
                b.rows(),
                b.cols(),
                ns,
                r
            ),
        });
    }
    if e.rows() != r {
        return Err(SpectralError::Shape {
            reason: format!("ray matrix has {} rows, expected {}", e.rows(), r),
        });
    }
    let m = e.cols();
    let vars = VarTable::convex(ns, m);
    let nvars = vars.len();

    // Per-reaction flux polynomial (E·ℓ)_k, linear in ℓ.
    let fluxes: Vec<SparsePoly> = (0..r)
        .map(|k| {
            let mut acc = SparsePoly::zero(nvars);
            for c in 0..m {
                let coeff = e.at(k, c);
                if !coeff.is_zero() {
                    acc = acc.add(
                        &SparsePoly::var(nvars, ns + c)
                            .scale(&BigRational::from_integer(coeff.clone())),
                    );
                }
            }
            acc
        })
        .collect();

    let jacobian = Mat::from_fn(ns, ns, |i, j| {
        let mut acc = SparsePoly::zero(nvars);
        for (k, flux) in fluxes.iter().enumerate() {
            let w: BigInt = n.at(i, k) * b.at(j, k);
            if !w.is_zero() {
                acc = acc.add(&flux.scale(&BigRational::from_integer(w)));
            }
        }
        let hj = SparsePoly::var(nvars, j);
        acc.mul(&hj).expect("degree-2 product cannot overflow")
    });

    let s = matrix::rank(n);
    let ring = PolyRing::new(nvars);
    let char_coeffs = matrix::berkowitz_charpoly::<PolyRing>(&ring, &jacobian);
    // char_coeffs = [1, c_1, …, c_n] for det(zI − J) = Σ c_i z^(n−i).
    let mut coeffs = Vec::with_capacity(s);
    for i in 1..=ns {
        let c = &char_coeffs[i];
        if i <= s {
            coeffs.push(c.clone());
        } else if !c.is_zero() {
            return Err(SpectralError::NonvanishingLowCoefficient { index: i, rank: s });
        }
    }
    Ok(ConvexSystem {
        vars,
        n_species: ns,
        n_rays: m,
        s,
        jacobian,
        coeffs,
    })
}

/// A polynomial split into groups by the monomials of a chosen variable
/// subset (in practice: by ℓ-monomial).
#[derive(Debug, Clone)]
pub struct GroupedPoly {
    nvars: usize,
    /// Group keys in ascending graded-lex order; full-width monomials that
    /// are zero outside the grouping variables.
    keys: Vec<Box<[u8]>>,
    groups: FxHashMap<Box<[u8]>, SparsePoly>,
}

impl GroupedPoly {
    /// Groups `p` by the monomials in `vars`.
    pub fn from_poly(p: &SparsePoly, vars: &[usize]) -> Self {
        let groups = p.group_by(vars);
        let mut keys: Vec<Box<[u8]>> = groups.keys().cloned().collect();
        keys.sort_by(|a, b| graded_lex(a, b));
        GroupedPoly {
            nvars: p.nvars(),
            keys,
            groups,
        }
    }

    /// Number of groups.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    /// Whether the underlying polynomial was zero.
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Group keys in ascending graded-lex order.
    pub fn keys(&self) -> &[Box<[u8]>] {
        &self.keys
    }

    /// The group polynomial at key index `k`.
    pub fn group(&self, k: usize) -> &SparsePoly {
        &self.groups[&self.keys[k]]
    }

    /// The group polynomial for an explicit key, if present.
    pub fn group_for(&self, key: &[u8]) -> Option<&SparsePoly> {
        self.groups.get(key)
    }

    /// Reassembles the original polynomial (for tests and small cases).
    pub fn reassemble(&self) -> Result<SparsePoly> {
        let mut acc = SparsePoly::zero(self.nvars);
        for key in &self.keys {
            acc = acc.add(&attach_key(&self.groups[key], key)?);
        }
        Ok(acc)
    }
}

/// Multiplies a group polynomial back by its key monomial.
fn attach_key(group: &SparsePoly, key: &[u8]) -> Result<SparsePoly> {
    let mut terms: Vec<(Box<[u8]>, BigRational)> = Vec::with_capacity(group.nterms());
    for (m, c) in group.terms() {
        terms.push((mono_add(m, key)?, c.clone()));
    }
    Ok(SparsePoly::from_terms(group.nvars(), terms))
}

/// The Hurwitz matrix `H_i` for a degree-`s` monic polynomial with
/// coefficients `a_1 … a_s`, over any ring: entry `(k, l)` (1-based) is
/// `a_{2k−l}` when that index lies in `1..=s`, the unit when `2k−l = 0`,
/// and zero otherwise.
pub fn hurwitz_matrix<R: crate::ring::Ring>(
    ring: &R,
    coeffs: &[R::Elem],
    order: usize,
) -> Mat<R::Elem> {
    let s = coeffs.len();
    Mat::from_fn(order, order, |k0, l0| {
        let idx = 2 * (k0 as i64 + 1) - (l0 as i64 + 1);
        if idx == 0 {
            ring.one()
        } else if idx >= 1 && idx <= s as i64 {
            coeffs[(idx - 1) as usize].clone()
        } else {
            ring.zero()
        }
    })
}

/// Expanded Hurwitz determinants as integer polynomials in abstract
/// coefficients `a_1 … a_s`.
#[derive(Debug, Clone)]
pub struct HurwitzTemplates {
    /// Degree of the underlying polynomial.
    pub s: usize,
    /// Variable table `a1..as` for printing.
    pub vars: VarTable,
    /// `dets[i]` is the expansion of `det(H_{i+1})`, `i = 0 .. s−1`.
    pub dets: Vec<SparsePoly>,
}

impl HurwitzTemplates {
    /// Expands `det(H_1) … det(H_s)` for degree `s`.
    pub fn new(s: usize) -> Self {
        let names: Vec<String> = (1..=s).map(|i| format!("a{i}")).collect();
        let vars = VarTable::new(&names);
        let ring = PolyRing::new(s);
        let alpha: Vec<SparsePoly> = (0..s).map(|i| SparsePoly::var(s, i)).collect();
        let dets = (1..=s)
            .map(|order| {
                let h = hurwitz_matrix::<PolyRing>(&ring, &alpha, order);
                reference::det_cofactor::<PolyRing>(&ring, &h)
            })
            .collect();
        HurwitzTemplates { s, vars, dets }
    }

    /// The template for `det(H_order)` (1-based).
    pub fn det(&self, order: usize) -> &SparsePoly {
        assert!(order >= 1 && order <= self.s);
        &self.dets[order - 1]
    }
}

/// Evaluates `det(H_order)` directly by substituting the actual
/// coefficients into the template. Fine for small systems; the streaming
/// path serves the large ones.
pub fn hurwitz_det_direct(coeffs: &[SparsePoly], order: usize) -> Result<SparsePoly> {
    let s = coeffs.len();
    assert!(order >= 1 && order <= s);
    let nvars = coeffs[0].nvars();
    let templates = HurwitzTemplates::new(s);
    let ring = PolyRing::new(nvars);
    Ok(templates.det(order).eval_ring::<PolyRing>(&ring, coeffs)?)
}

/// A polynomial expression `Σ coeff · Π a_{f}` in the coefficients
/// `a_1 … a_s`, prepared for streaming evaluation.
#[derive(Debug, Clone)]
pub struct TemplateSpec {
    /// Label used in reports.
    pub name: String,
    /// Terms as `(integer coefficient, sorted 0-based factor indices)`;
    /// factor index `f` refers to `a_{f+1}`.
    pub terms: Vec<(BigInt, Vec<usize>)>,
}

impl TemplateSpec {
    /// Converts an abstract-coefficient polynomial (variables `a1..as`)
    /// into a streaming spec.
    pub fn from_alpha(name: &str, poly: &SparsePoly) -> Self {
        let mut terms = Vec::with_capacity(poly.nterms());
        for (m, c) in poly.terms() {
            let mut factors = Vec::new();
            for (v, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    factors.push(v);
                }
            }
            assert!(c.is_integer(), "template coefficients must be integers");
            terms.push((c.to_integer(), factors));
        }
        // Deterministic term order.
        terms.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
        TemplateSpec {
            name: name.to_string(),
            terms,
        }
    }
}

/// One scheduled product in the streaming pass.
struct Combo {
    template: u16,
    /// Integer coefficient: template-term coefficient times the multiset
    /// multiplicity of this key selection.
    coeff: i64,
    /// `(factor index, key index within that factor)` picks.
    picks: Vec<(u16, u32)>,
}

/// Streams the evaluation of several templates over ℓ-grouped
/// coefficients.
///
/// For every ℓ-monomial of every template's value, the sink receives
/// `(template index, group key, group polynomial)` exactly once, in
/// descending graded-lex key order; each group is dropped afterwards, so
/// peak memory is a single group per template. Groups that cancel to zero
/// are still delivered (their zero polynomial is meaningful); ℓ-monomials
/// with no contributing products are skipped.
pub fn stream_eval<F>(
    factors: &[GroupedPoly],
    templates: &[TemplateSpec],
    mut sink: F,
) -> Result<()>
where
    F: FnMut(usize, &[u8], SparsePoly),
{
    assert!(templates.len() < u16::MAX as usize);
    let Some(first) = factors.first() else {
        return Ok(());
    };
    let nvars = first.nvars;

    // Schedule: bucket every template-term key selection by output key.
    let mut buckets: FxHashMap<Box<[u8]>, Vec<Combo>> = FxHashMap::default();
    for (ti, template) in templates.iter().enumerate() {
        for (tcoeff, factor_list) in &template.terms {
            // Group equal factors: (factor, multiplicity).
            let mut fm: Vec<(usize, usize)> = Vec::new();
            for &f in factor_list {
                assert!(f < factors.len(), "template factor out of range");
                match fm.last_mut() {
                    Some((g, mult)) if *g == f => *mult += 1,
                    _ => fm.push((f, 1)),
                }
            }
            if fm.iter().any(|&(f, _)| factors[f].is_empty()) {
                continue; // a zero coefficient annihilates the term
            }
            // Per factor: multisets of key indices with multinomial counts.
            let choices: Vec<Vec<(Vec<u32>, i64)>> = fm
                .iter()
                .map(|&(f, mult)| key_multisets(factors[f].len(), mult))
                .collect();
            let tcoeff_i64 = i64::try_from(tcoeff).expect("template coefficient fits i64");
            let mut stack: Vec<(usize, Vec<(u16, u32)>, Vec<u8>, i64)> =
                vec![(0, Vec::new(), vec![0u8; nvars], tcoeff_i64)];
            while let Some((level, picks, key, coeff)) = stack.pop() {
                if level == fm.len() {
                    buckets
                        .entry(key.into_boxed_slice())
                        .or_default()
                        .push(Combo {
                            template: ti as u16,
                            coeff,
                            picks,
                        });
                    continue;
                }
                let (f, _) = fm[level];
                for (indices, multinomial) in &choices[level] {
                    let mut new_key = key.clone();
                    let mut ok = true;
                    for &ki in indices {
                        let kk = &factors[f].keys[ki as usize];
                        for (v, slot) in new_key.iter_mut().enumerate() {
                            let sum = u32::from(*slot) + u32::from(kk[v]);
                            if sum > u8::MAX as u32 {
                                ok = false;
                                break;
                            }
                            *slot = sum as u8;
                        }
                        if !ok {
                            break;
                        }
                    }
                    if !ok {
                        return Err(crate::poly::PolyError::ExponentOverflow {
                            var: 0,
                            attempted: 256,
                        }
                        .into());
                    }
                    let mut new_picks = picks.clone();
                    new_picks.extend(indices.iter().map(|&ki| (f as u16, ki)));
                    stack.push((level + 1, new_picks, new_key, coeff * multinomial));
                }
            }
        }
    }

    // Deliver output keys in descending graded-lex order.
    let mut keys: Vec<Box<[u8]>> = buckets.keys().cloned().collect();
    keys.sort_by(|a, b| graded_lex(b, a));
    for key in keys {
        let combos = buckets.remove(&key).expect("key listed");
        let mut acc: Vec<Option<SparsePoly>> = vec![None; templates.len()];
        for combo in combos {
            let mut parts: Vec<&SparsePoly> = combo
                .picks
                .iter()
                .map(|&(f, k)| factors[f as usize].group(k as usize))
                .collect();
            parts.sort_by_key(|p| p.nterms());
            let mut prod = SparsePoly::constant_int(nvars, combo.coeff);
            for p in parts {
                prod = prod.mul(p)?;
            }
            let slot = &mut acc[combo.template as usize];
            *slot = Some(match slot.take() {
                Some(existing) => existing.add(&prod),
                None => prod,
            });
        }
        for (ti, slot) in acc.into_iter().enumerate() {
            if let Some(p) = slot {
                sink(ti, &key, p);
            }
        }
    }
    Ok(())
}

/// Non-decreasing index multisets of size `mult` over `0..len`, each with
/// its multinomial coefficient (the number of ordered selections it
/// represents).
fn key_multisets(len: usize, mult: usize) -> Vec<(Vec<u32>, i64)> {
    fn factorial(k: usize) -> i64 {
        (2..=k as i64).product::<i64>().max(1)
    }
    fn rec(len: usize, mult: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, i64)>) {
        if cur.len() == mult {
            // multinomial = mult! / Π (run length)!
            let mut denom = 1i64;
            let mut run = 1usize;
            for w in 1..cur.len() {
                if cur[w] == cur[w - 1] {
                    run += 1;
                } else {
                    denom *= factorial(run);
                    run = 1;
                }
            }
            denom *= factorial(run);
            out.push((cur.clone(), factorial(mult) / denom));
            return;
        }
        for i in start..len {
            cur.push(i as u32);
            rec(len, mult, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(len, mult, 0, &mut cur, &mut out);
    out
}

/// Aggregate sign classification of a polynomial delivered group by group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverallSign {
    /// Every coefficient positive (in at least one group); strictly
    /// positive on the open parameter cone.
    Positive,
    /// Every coefficient negative; strictly negative on the open cone.
    Negative,
    /// Identically zero.
    Zero,
    /// Coefficients of both signs — the sign on the cone is undetermined
    /// by inspection.
    Mixed,
}

impl OverallSign {
    /// Stable lowercase tag for reports.
    pub fn tag(self) -> &'static str {
        match self {
            OverallSign::Positive => "positive",
            OverallSign::Negative => "negative",
            OverallSign::Zero => "zero",
            OverallSign::Mixed => "mixed",
        }
    }
}

/// Per-group sign verdicts for one streamed polynomial.
#[derive(Debug, Clone)]
pub struct GroupVerdicts {
    /// `(group key, verdict)` pairs in delivery order.
    pub entries: Vec<(Box<[u8]>, SignVerdict)>,
}

impl GroupVerdicts {
    /// Aggregates all groups.
    pub fn overall(&self) -> OverallSign {
        aggregate(self.entries.iter().map(|(_, v)| v))
    }

    /// Aggregates only the groups whose key avoids the listed variables —
    /// the restriction of the polynomial to the stratum where those
    /// variables vanish.
    pub fn overall_excluding(&self, zeroed_vars: &[usize]) -> OverallSign {
        aggregate(self.entries.iter().filter_map(|(key, v)| {
            if zeroed_vars.iter().any(|&z| key[z] != 0) {
                None
            } else {
                Some(v)
            }
        }))
    }

    /// The first group with coefficients of both signs, if any.
    pub fn first_mixed(&self) -> Option<&(Box<[u8]>, SignVerdict)> {
        self.entries
            .iter()
            .find(|(_, v)| matches!(v, SignVerdict::Mixed { .. }))
    }

    /// Total coefficient count across groups.
    pub fn nterms(&self) -> usize {
        self.entries
            .iter()
            .map(|(_, v)| match v {
                SignVerdict::Zero => 0,
                SignVerdict::AllCoeffsPositive { terms }
                | SignVerdict::AllCoeffsNegative { terms } => *terms,
                SignVerdict::Mixed {
                    positive_terms,
                    negative_terms,
                    ..
                } => positive_terms + negative_terms,
            })
            .sum()
    }
}

fn aggregate<'a>(verdicts: impl Iterator<Item = &'a SignVerdict>) -> OverallSign {
    let mut pos = false;
    let mut neg = false;
    for v in verdicts {
        match v {
            SignVerdict::Zero => {}
            SignVerdict::AllCoeffsPositive { .. } => pos = true,
            SignVerdict::AllCoeffsNegative { .. } => neg = true,
            SignVerdict::Mixed { .. } => {
                pos = true;
                neg = true;
            }
        }
    }
    match (pos, neg) {
        (false, false) => OverallSign::Zero,
        (true, false) => OverallSign::Positive,
        (false, true) => OverallSign::Negative,
        (true, true) => OverallSign::Mixed,
    }
}

/// Sign report for one Hurwitz determinant.
#[derive(Debug, Clone)]
pub struct DetReport {
    /// Which determinant (`det(H_order)`).
    pub order: usize,
    /// Per-ℓ-monomial verdicts.
    pub verdicts: GroupVerdicts,
    /// The fully assembled polynomial, when it stayed under the term cap.
    pub poly: Option<SparsePoly>,
    /// Set when the polynomial was discarded for exceeding the cap.
    pub truncated: bool,
}

impl DetReport {
    /// Aggregate sign over the whole cone.
    pub fn overall(&self) -> OverallSign {
        self.verdicts.overall()
    }
}

/// Hurwitz positivity scan of a convex system.
#[derive(Debug, Clone)]
pub struct HurwitzScan {
    /// Degree of the reduced characteristic polynomial.
    pub s: usize,
    /// Reports for `det(H_1) … det(H_{s−1})`.
    pub dets: Vec<DetReport>,
    /// Report for the constant coefficient `a_s`; `det(H_s)` is exactly
    /// `a_s · det(H_{s−1})`, so these two factors carry its sign.
    pub last_coeff: Option<DetReport>,
}

impl HurwitzScan {
    /// The report for `det(H_order)`.
    pub fn det(&self, order: usize) -> &DetReport {
        assert!(order >= 1 && order < self.s);
        &self.dets[order - 1]
    }
}

/// Runs the streaming Hurwitz scan, keeping any determinant polynomial
/// whose term count stays at or below `keep_cap`.
pub fn hurwitz_scan(sys: &ConvexSystem, keep_cap: usize) -> Result<HurwitzScan> {
    let s = sys.s;
    if s == 0 {
        return Ok(HurwitzScan {
            s,
            dets: Vec::new(),
            last_coeff: None,
        });
    }
    let grouped = sys.grouped_coeffs();
    let templates_alpha = HurwitzTemplates::new(s);
    let specs: Vec<TemplateSpec> = (1..s)
        .map(|order| {
            TemplateSpec::from_alpha(&format!("det(H{order})"), templates_alpha.det(order))
        })
        .collect();

    struct Collector {
        verdicts: Vec<(Box<[u8]>, SignVerdict)>,
        poly: Option<SparsePoly>,
        truncated: bool,
        overflow: Option<SpectralError>,
    }
    let mut collectors: Vec<Collector> = (1..s)
        .map(|_| Collector {
            verdicts: Vec::new(),
            poly: Some(SparsePoly::zero(sys.vars.len())),
            truncated: false,
            overflow: None,
        })
        .collect();

    stream_eval(&grouped, &specs, |ti, key, group| {
        let c = &mut collectors[ti];
        c.verdicts.push((key.into(), group.sign_verdict()));
        if let Some(current) = c.poly.take() {
            match attach_key(&group, key) {
                Ok(with_key) => {
                    let next = current.add(&with_key);
                    if next.nterms() <= keep_cap {
                        c.poly = Some(next);
                    } else {
                        c.truncated = true;
                    }
                }
                Err(e) => c.overflow = Some(e),
            }
        }
    })?;

    let mut dets = Vec::with_capacity(s.saturating_sub(1));
    for (idx, c) in collectors.into_iter().enumerate() {
        if let Some(e) = c.overflow {
            return Err(e);
        }
        dets.push(DetReport {
            order: idx + 1,
            verdicts: GroupVerdicts { entries: c.verdicts },
            poly: c.poly,
            truncated: c.truncated,
        });
    }

    // a_s, grouped directly.
    let lv = sys.lambda_vars();
    let a_s = sys.a(s);
    let grouped_last = GroupedPoly::from_poly(a_s, &lv);
    let mut entries = Vec::with_capacity(grouped_last.len());
    for k in 0..grouped_last.len() {
        entries.push((
            grouped_last.keys()[k].clone(),
            grouped_last.group(k).sign_verdict(),
        ));
    }
    let last_coeff = Some(DetReport {
        order: s,
        verdicts: GroupVerdicts { entries },
        poly: Some(a_s.clone()),
        truncated: false,
    });

    Ok(HurwitzScan { s, dets, last_coeff })
}

/// The outcome of the positivity-based exclusion test for simple
/// imaginary-eigenvalue crossings.
#[derive(Debug, Clone)]
pub struct Preclusion {
    /// Whether a simple crossing is impossible anywhere on the (restricted)
    /// open parameter cone.
    pub precluded: bool,
    /// True when the degree alone settles it (`s < 2`).
    pub trivial: bool,
    /// Aggregate sign of each `det(H_i)`, `i = 1 … s−1`, on the restricted
    /// cone.
    pub det_signs: Vec<OverallSign>,
    /// Aggregate sign of `a_s` on the restricted cone.
    pub last_coeff_sign: Option<OverallSign>,
    /// Human-readable explanation.
    pub detail: String,
}

/// Decides preclusion from a scan: a simple pair of nonzero imaginary
/// eigenvalues requires `det(H_{s−1}) = 0` with `det(H_1) … det(H_{s−2}) >
/// 0` and `a_s > 0`, so strict positivity of `det(H_1) … det(H_{s−1})` on
/// the whole cone rules it out. `zero_rays` restricts to a boundary
/// stratum of the flux cone (those ray coordinates pinned to zero).
pub fn preclusion_by_positivity(
    scan: &HurwitzScan,
    sys: &ConvexSystem,
    zero_rays: &[usize],
) -> Preclusion {
    let zeroed: Vec<usize> = zero_rays.iter().map(|&rr| sys.l_var(rr)).collect();
    if scan.s < 2 {
        return Preclusion {
            precluded: true,
            trivial: true,
            det_signs: Vec::new(),
            last_coeff_sign: scan
                .last_coeff
                .as_ref()
                .map(|r| r.verdicts.overall_excluding(&zeroed)),
            detail: format!(
                "reduced characteristic degree {} admits no imaginary pair",
                scan.s
            ),
        };
    }
    let det_signs: Vec<OverallSign> = scan
        .dets
        .iter()
        .map(|d| d.verdicts.overall_excluding(&zeroed))
        .collect();
    let last_coeff_sign = scan
        .last_coeff
        .as_ref()
        .map(|r| r.verdicts.overall_excluding(&zeroed));
    let all_positive = det_signs.iter().all(|&sgn| sgn == OverallSign::Positive);
    let detail = if all_positive {
        format!(
            "det(H_1)..det(H_{}) have positive coefficients throughout, so the \
             critical determinant det(H_{}) never vanishes on the open cone",
            scan.s - 1,
            scan.s - 1
        )
    } else {
        let bad: Vec<String> = det_signs
            .iter()
            .enumerate()
            .filter(|(_, &sgn)| sgn != OverallSign::Positive)
            .map(|(i, sgn)| format!("det(H_{}) is {}", i + 1, sgn.tag()))
            .collect();
        format!("positivity fails: {}", bad.join(", "))
    };
    Preclusion {
        precluded: all_positive,
        trivial: false,
        det_signs,
        last_coeff_sign,
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IMat;

    fn parse_alpha(s: usize, text: &str) -> SparsePoly {
        let names: Vec<String> = (1..=s).map(|i| format!("a{i}")).collect();
        let vars = VarTable::new(&names);
        SparsePoly::parse(text, &vars).unwrap()
    }

    #[test]
    fn hurwitz_templates_degree_five() {
        let t = HurwitzTemplates::new(5);
        assert_eq!(t.det(1), &parse_alpha(5, "a1"));
        assert_eq!(t.det(2), &parse_alpha(5, "a1*a2 - a3"));
        assert_eq!(
            t.det(3),
            &parse_alpha(5, "a1*a2*a3 + a1*a5 - a1^2*a4 - a3^2")
        );
        assert_eq!(
            t.det(4),
            &parse_alpha(
                5,
                "a1*a2*a3*a4 - a1^2*a4^2 - a3^2*a4 + 2*a1*a4*a5 - a1*a2^2*a5 + a2*a3*a5 - a5^2"
            )
        );
        // The top determinant factors through the constant coefficient.
        let expected = t.det(4).mul(&parse_alpha(5, "a5")).unwrap();
        assert_eq!(t.det(5), &expected);
    }

    #[test]
    fn hurwitz_templates_degree_three() {
        let t = HurwitzTemplates::new(3);
        assert_eq!(t.det(1), &parse_alpha(3, "a1"));
        assert_eq!(t.det(2), &parse_alpha(3, "a1*a2 - a3"));
        assert_eq!(t.det(3), &parse_alpha(3, "a1*a2*a3 - a3^2"));
    }

    #[test]
    fn reversible_pair_jacobian() {
        // A ⇌ B: one ray through both reactions.
        let n = IMat::from_i64_rows(&[&[-1, 1], &[1, -1]]);
        let b = IMat::from_i64_rows(&[&[1, 0], &[0, 1]]);
        let e = IMat::from_i64_rows(&[&[1], &[1]]);
        let sys = convex_system(&n, &b, &e).unwrap();
        assert_eq!(sys.s, 1);
        assert_eq!(sys.coeffs.len(), 1);
        let expect = SparsePoly::parse("h1*l1 + h2*l1", &sys.vars).unwrap();
        assert_eq!(sys.a(1), &expect);
        // J itself: −h1·l1, h2·l1 / h1·l1, −h2·l1.
        let j00 = SparsePoly::parse("-h1*l1", &sys.vars).unwrap();
        assert_eq!(sys.jacobian.at(0, 0), &j00);
    }

    #[test]
    fn full_rank_system_keeps_every_coefficient() {
        // Two independent decays: rank 2, both coefficients survive.
        let n = IMat::from_i64_rows(&[&[-1, 0], &[0, -1]]);
        let b = IMat::from_i64_rows(&[&[1, 0], &[0, 1]]);
        let e = IMat::from_i64_rows(&[&[1], &[1]]);
        let sys = convex_system(&n, &b, &e).unwrap();
        assert_eq!(sys.s, 2);
        let expect = SparsePoly::parse("h1*h2*l1^2", &sys.vars).unwrap();
        assert_eq!(sys.a(2), &expect);
    }

    #[test]
    fn streaming_matches_direct_evaluation() {
        // Small synthetic system: 2 h-vars, 2 ℓ-vars.
        let vars = VarTable::convex(2, 2);
        let a1 = SparsePoly::parse("h1*l1 + 2*h2*l2", &vars).unwrap();
        let a2 = SparsePoly::parse("h1*h2*l1*l2 + h1^2*l1^2 - h2^2*l2^2", &vars).unwrap();
        let lv = [2usize, 3usize];
        let grouped = [
            GroupedPoly::from_poly(&a1, &lv),
            GroupedPoly::from_poly(&a2, &lv),
        ];
        // T = a1^2·a2 − 2·a2^2 + 3·a1.
        let alpha = parse_alpha(2, "a1^2*a2 - 2*a2^2 + 3*a1");
        let spec = TemplateSpec::from_alpha("T", &alpha);
        let mut total = SparsePoly::zero(vars.len());
        let mut keys_seen = 0usize;
        stream_eval(&grouped, &[spec], |ti, key, group| {
            assert_eq!(ti, 0);
            keys_seen += 1;
            total = total.add(&attach_key(&group, key).unwrap());
        })
        .unwrap();
        assert!(keys_seen > 3);
        let ring = PolyRing::new(vars.len());
        let direct = alpha
            .eval_ring::<PolyRing>(&ring, &[a1.clone(), a2.clone()])
            .unwrap();
        assert_eq!(total, direct);
    }

    #[test]
    fn key_multisets_count_ordered_selections() {
        // Over 3 keys with multiplicity 2: (i,i) counts once, (i,j) twice.
        let ms = key_multisets(3, 2);
        assert_eq!(ms.len(), 6);
        let total: i64 = ms.iter().map(|(_, c)| c).sum();
        assert_eq!(total, 9); // 3² ordered pairs
        for (indices, c) in &ms {
            let expect = if indices[0] == indices[1] { 1 } else { 2 };
            assert_eq!(*c, expect);
        }
        // Multiplicity 3 over 2 keys: total 2³ = 8.
        let ms3 = key_multisets(2, 3);
        let total3: i64 = ms3.iter().map(|(_, c)| c).sum();
        assert_eq!(total3, 8);
        // Multiplicity 4 over 2 keys: total 2⁴ = 16, C(5,4)=5 multisets.
        let ms4 = key_multisets(2, 4);
        assert_eq!(ms4.len(), 5);
        let total4: i64 = ms4.iter().map(|(_, c)| c).sum();
        assert_eq!(total4, 16);
    }

    #[test]
    fn grouped_poly_round_trip() {
        let vars = VarTable::convex(2, 2);
        let p = SparsePoly::parse("3*h1^2*l1 - h2*l1*l2 + l2^2 - 5*h1*h2", &vars).unwrap();
        let g = GroupedPoly::from_poly(&p, &[2, 3]);
        assert_eq!(g.len(), 4);
        assert_eq!(g.reassemble().unwrap(), p);
    }

    #[test]
    fn aggregate_signs() {
        use SignVerdict::*;
        let pos = AllCoeffsPositive { terms: 2 };
        let neg = AllCoeffsNegative { terms: 1 };
        assert_eq!(aggregate([&pos, &pos].into_iter()), OverallSign::Positive);
        assert_eq!(aggregate([&pos, &neg].into_iter()), OverallSign::Mixed);
        assert_eq!(aggregate([&Zero, &Zero].into_iter()), OverallSign::Zero);
        assert_eq!(aggregate([].into_iter()), OverallSign::Zero);
        assert_eq!(aggregate([&neg].into_iter()), OverallSign::Negative);
    }

    #[test]
    fn stratum_scan_drops_groups() {
        // a over two rays; groups keyed by ℓ-monomials. Restriction to
        // l2 = 0 must see only the l1-pure groups.
        let vars = VarTable::convex(1, 2);
        let p = SparsePoly::parse("h1*l1 - h1*l2", &vars).unwrap();
        let g = GroupedPoly::from_poly(&p, &[1, 2]);
        let mut entries = Vec::new();
        for k in 0..g.len() {
            entries.push((g.keys()[k].clone(), g.group(k).sign_verdict()));
        }
        let gv = GroupVerdicts { entries };
        assert_eq!(gv.overall(), OverallSign::Mixed);
        assert_eq!(gv.overall_excluding(&[2]), OverallSign::Positive);
        assert_eq!(gv.overall_excluding(&[1]), OverallSign::Negative);
    }
}

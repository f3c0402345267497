//! Verification suites over concrete finite groups, and the corpus driver
//! that runs all of them over a directory of fixtures.
//!
//! Each suite returns a [`Report`] whose certificates embed the exact words
//! and integer data it checked, so a verdict can be re-verified from the
//! report alone.  All sampling flows from an explicit seed recorded in the
//! report.  The corpus driver runs suites in a worker pool and merges the
//! reports deterministically by suite name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::envelope::{Envelope, EnvelopeError, RelativeEnvelope};
use crate::fingroup::{FiniteGroup, Subgroup};
use crate::freeword::{GenId, Word};
use crate::hopf::{schur_hopf, Presentation};
use crate::multiplier::{for_each_denominator_row, induced_matrix, MultiplierError, PairEngine};
use crate::report::{merge_reports, Certificate, Report, FORMAT_LINE};
use crate::splittings::{check_strict_splitting, lemma8_consequence, product_example, Lemma8Verdict, SplitCheck};
use crate::stallings::SubgroupGraph;
use crate::zlattice::{express_over_hnf, hnf_basis, PresentedKernel, QuotientView, SparseVec};

/// Largest base-group order the free-kernel certification suites accept.
pub const LEMMA_MAX_ORDER: usize = 12;

/// Configuration for suite sampling and the corpus driver.
#[derive(Clone, Debug)]
pub struct CorpusConfig {
    /// Seed all random sampling flows from.
    pub seed: u64,
    /// Order cap for engine construction.
    pub cap: usize,
    /// Number of random members sampled per sampling suite.
    pub samples: usize,
    /// Conjugation depth for the free-basis family subsets.
    pub depth: usize,
    /// Whether long-running suites may exceed their default budgets.
    pub long_running: bool,
    /// Worker threads for the corpus pool; `0` picks the available
    /// parallelism.
    pub threads: usize,
}

impl Default for CorpusConfig {
    fn default() -> CorpusConfig {
        CorpusConfig {
            seed: 0,
            cap: crate::multiplier::DEFAULT_PAIR_CAP,
            samples: 100,
            depth: 2,
            long_running: false,
            threads: 0,
        }
    }
}

/// Errors of the corpus loader (suite-internal problems become `Fail`
/// reports instead).
#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    /// Filesystem error while reading the corpus.
    #[error("corpus io: {0}")]
    Io(#[from] std::io::Error),
    /// A corpus file did not parse.
    #[error("corpus parse: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// Deterministic label for a pair: group name plus the non-identity members
/// of the normal subgroup.
fn pair_label(group: &FiniteGroup, normal: &Subgroup) -> String {
    let members: Vec<String> = normal
        .members()
        .iter()
        .filter(|&&m| m != 0)
        .map(ToString::to_string)
        .collect();
    if members.is_empty() {
        format!("{}:1", group.name())
    } else {
        format!("{}:{}", group.name(), members.join("."))
    }
}

/// Dense core coordinates of a member of `J_{N,F}`.
fn dense_psi(renv: &RelativeEnvelope, w: &Word) -> Result<Vec<BigInt>, EnvelopeError> {
    Ok(renv.core_coordinates(w)?.to_dense(renv.b_count()))
}

/// The product of core words with the exponents of a core-coordinate
/// vector, in column order.
fn lift_from_coords(renv: &RelativeEnvelope, psi: &SparseVec) -> Word {
    let mut w = Word::empty();
    for (col, coef) in psi.entries() {
        let e = coef.to_i64().expect("sampled exponents fit in 64 bits");
        let core = &renv.cores().b_element(*col as usize).word;
        w = w.mul(&core.pow(e));
    }
    w
}

/// All freely reduced words over an alphabet up to a length bound,
/// lexicographically deduplicated, identity first.
fn reduced_words_up_to(alphabet: &[GenId], depth: usize) -> Vec<Word> {
    let mut all = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..depth {
        let mut next: Vec<Word> = Vec::new();
        for w in &frontier {
            for &g in alphabet {
                for s in [1i8, -1] {
                    let ext = w.mul(&Word::letter(g, s));
                    if ext.len() == w.len() + 1 {
                        next.push(ext);
                    }
                }
            }
        }
        next.sort();
        next.dedup();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

// ---------------------------------------------------------------------------
// lemma2: free relation-kernel basis certification
// ---------------------------------------------------------------------------

/// Certifies the relation-kernel basis of the free envelope of `F`: every
/// word evaluates to the identity, the family is Nielsen-independent of
/// full rank `(|F|−1)²`, and its folded automaton is the complete Cayley
/// automaton on `|F|` states.
#[must_use]
pub fn verify_lemma2(group: &FiniteGroup) -> Report {
    let name = format!("lemma2[{}]", group.name());
    if group.order() > LEMMA_MAX_ORDER {
        return Report::skipped(
            &name,
            0,
            format!(
                "order {} exceeds the certified bound {LEMMA_MAX_ORDER}",
                group.order()
            ),
        );
    }
    let env = Envelope::new(group.clone());
    let basis = env.jf_basis();
    check_kernel_basis(&name, &env, &basis)
}

/// Certifies a claimed relation-kernel basis (for example one loaded from
/// a fixture file) with the same three checks as [`verify_lemma2`].
#[must_use]
pub fn verify_lemma2_words(name: &str, group: &FiniteGroup, words: &[Word]) -> Report {
    if group.order() > LEMMA_MAX_ORDER {
        return Report::skipped(
            name,
            0,
            format!(
                "order {} exceeds the certified bound {LEMMA_MAX_ORDER}",
                group.order()
            ),
        );
    }
    let env = Envelope::new(group.clone());
    check_kernel_basis(name, &env, words)
}

fn check_kernel_basis(name: &str, env: &Envelope, words: &[Word]) -> Report {
    let n = env.group().order();
    let expected = (n - 1) * (n - 1);
    let mut report = Report::pass(name, 0)
        .with(Certificate::value("basis-count", words.len()))
        .with(Certificate::words("basis-words", words));
    if words.len() != expected {
        report.verdict = crate::report::Verdict::Fail;
        report.push(Certificate::note(
            "count-mismatch",
            format!("family has {} words, expected {expected}", words.len()),
        ));
        return report;
    }
    for (i, w) in words.iter().enumerate() {
        match env.eval(w) {
            Ok(0) => {}
            Ok(g) => {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::note(
                    "non-identity-word",
                    format!("word {i} `{w}` evaluates to element {g}, not the identity"),
                ));
                return report;
            }
            Err(e) => {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::note(
                    "invalid-word",
                    format!("word {i} `{w}`: {e}"),
                ));
                return report;
            }
        }
    }
    let graph = SubgroupGraph::build(words, env.alphabet());
    report.push(Certificate::value("folded-rank", graph.rank()));
    report.push(Certificate::value("automaton-states", graph.state_count()));
    if graph.rank() != expected {
        report.verdict = crate::report::Verdict::Fail;
        report.push(Certificate::note(
            "dependent-family",
            format!("folded rank {} differs from {expected}", graph.rank()),
        ));
        return report;
    }
    if !graph.is_complete() || graph.state_count() != n {
        report.verdict = crate::report::Verdict::Fail;
        report.push(Certificate::note(
            "incomplete-automaton",
            format!(
                "folded automaton has {} states (complete: {}), expected the full {n}-state automaton",
                graph.state_count(),
                graph.is_complete()
            ),
        ));
        return report;
    }
    report
}

// ---------------------------------------------------------------------------
// lemma134: free families, core membership, rewriting round-trips
// ---------------------------------------------------------------------------

/// Verifies the free-basis families of the pair `(N, F)`:
///
/// 1. finite subsets of the section-conjugated `U`-core family (conjugation
///    depth at most `depth`) are Nielsen-independent;
/// 2. every `B`-core element is a member of `J_{N,F}` with unit core
///    coordinates;
/// 3. `samples` random members of `J_{N,F}` (random words of length at most
///    eight in the letterwise kernel, corrected to evaluate to the
///    identity) are expressible by the rewriting engine and round-trip at
///    the abelianized level.
#[must_use]
pub fn verify_lemma1_lemma3(
    group: &FiniteGroup,
    normal: &Subgroup,
    samples: usize,
    depth: usize,
    seed: u64,
) -> Report {
    let name = format!("lemma134[{}]", pair_label(group, normal));
    if group.order() > LEMMA_MAX_ORDER {
        return Report::skipped(
            &name,
            seed,
            format!(
                "order {} exceeds the certified bound {LEMMA_MAX_ORDER}",
                group.order()
            ),
        );
    }
    let renv = match RelativeEnvelope::new(group, normal) {
        Ok(r) => r,
        Err(e) => {
            return Report::fail(&name, seed).with(Certificate::note("construction", e.to_string()))
        }
    };
    let mut report = Report::pass(&name, seed);

    // (1) Section-conjugated U-core family subsets are Nielsen-independent.
    let omegas = reduced_words_up_to(renv.quotient_envelope().alphabet(), depth);
    let mut family = Vec::new();
    for omega in &omegas {
        let s = renv.sigma_word(omega);
        for u in &renv.cores().ucore {
            family.push(s.mul(&u.word).mul(&s.inv()));
        }
    }
    let graph = SubgroupGraph::build(&family, renv.envelope().alphabet());
    report.push(Certificate::value("ucore-family-size", family.len()));
    report.push(Certificate::value("ucore-family-rank", graph.rank()));
    if graph.rank() != family.len() {
        report.verdict = crate::report::Verdict::Fail;
        report.push(Certificate::words("dependent-family", &family));
        return report;
    }

    // (2) Every B-core element is a J_{N,F} member with unit coordinates.
    for (i, b) in renv.cores().b_iter().enumerate() {
        if !renv.member_jnf(&b.word) {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note(
                "core-not-member",
                format!("core {b} `{}` is not a member", b.word),
            ));
            return report;
        }
        let psi = match renv.core_coordinates(&b.word) {
            Ok(v) => v,
            Err(e) => {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::note(
                    "core-not-expressible",
                    format!("core {b} `{}`: {e}", b.word),
                ));
                return report;
            }
        };
        let unit = SparseVec::from_pairs([(i as u32, BigInt::from(1))]);
        if psi != unit {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note(
                "core-coordinates",
                format!("core {b} has coordinates {psi:?}, expected the unit vector {i}"),
            ));
            return report;
        }
    }
    report.push(Certificate::value("core-count", renv.b_count()));

    // (3) Random members are expressible and round-trip.
    let normal_members: Vec<u32> = normal.members().iter().copied().filter(|&m| m != 0).collect();
    if normal_members.is_empty() {
        report.push(Certificate::note(
            "sampling",
            "trivial normal subgroup: the kernel is trivial, sampling is vacuous",
        ));
        return report;
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let n = group.order() as u32;
    let mut examples = Vec::new();
    for sample in 0..samples {
        let w = random_kernel_member(&renv, &normal_members, n, &mut rng);
        if sample < 3 {
            examples.push(w.clone());
        }
        let psi = match renv.core_coordinates(&w) {
            Ok(v) => v,
            Err(e) => {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::note(
                    "sample-not-expressible",
                    format!("sample {sample} `{w}`: {e}"),
                ));
                return report;
            }
        };
        let lifted = lift_from_coords(&renv, &psi);
        match renv.core_coordinates(&lifted) {
            Ok(back) if back == psi => {}
            Ok(back) => {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::words("round-trip-failure", [&w, &lifted]));
                report.push(Certificate::note(
                    "round-trip-coordinates",
                    format!("coordinates {psi:?} came back as {back:?}"),
                ));
                return report;
            }
            Err(e) => {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::note(
                    "round-trip-failure",
                    format!("lift `{lifted}` of sample {sample}: {e}"),
                ));
                return report;
            }
        }
    }
    report.push(Certificate::value("samples", samples));
    report.push(Certificate::words("sample-words", &examples));
    report
}

/// A random member of `J_{N,F}` of length at most eight: one or two
/// conjugated normal letters, corrected by the inverse letter of the
/// evaluation.
fn random_kernel_member(
    renv: &RelativeEnvelope,
    normal_members: &[u32],
    n: u32,
    rng: &mut StdRng,
) -> Word {
    let (pieces, vmax) = if rng.gen_bool(0.5) { (1usize, 2usize) } else { (2, 1) };
    let mut w = Word::empty();
    for _ in 0..pieces {
        let vlen = rng.gen_range(0..=vmax);
        let mut v = Word::empty();
        for _ in 0..vlen {
            let x = rng.gen_range(1..n);
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            v = v.mul(&Word::letter(GenId::base(x), s));
        }
        let c = normal_members[rng.gen_range(0..normal_members.len())];
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        w = w
            .mul(&v)
            .mul(&Word::letter(GenId::base(c), s))
            .mul(&v.inv());
    }
    let e = renv
        .envelope()
        .eval(&w)
        .expect("sampled words use alphabet letters");
    if e != 0 {
        w = w.mul(&Word::gen(GenId::base(e)).inv());
    }
    w
}

// ---------------------------------------------------------------------------
// lemma4: span equality of the two abelianized generating families
// ---------------------------------------------------------------------------

/// Checks that the core family and its variant with the second family
/// replaced by `[u_x, u_d]·u_d·u_{xdx⁻¹}⁻¹` generate the same lattice of
/// abelianized coordinates (equal Hermite normal forms).
#[must_use]
pub fn verify_lemma4(group: &FiniteGroup, normal: &Subgroup) -> Report {
    let name = format!("lemma4[{}]", pair_label(group, normal));
    if group.order() > LEMMA_MAX_ORDER {
        return Report::skipped(
            &name,
            0,
            format!(
                "order {} exceeds the certified bound {LEMMA_MAX_ORDER}",
                group.order()
            ),
        );
    }
    let renv = match RelativeEnvelope::new(group, normal) {
        Ok(r) => r,
        Err(e) => {
            return Report::fail(&name, 0).with(Certificate::note("construction", e.to_string()))
        }
    };
    let mut report = Report::pass(&name, 0);
    let psi_rows = |words: &[Word]| -> Result<Vec<Vec<BigInt>>, EnvelopeError> {
        words.iter().map(|w| dense_psi(&renv, w)).collect()
    };
    let base_words: Vec<Word> = renv.cores().b_iter().map(|b| b.word.clone()).collect();
    let mut variant_words: Vec<Word> = renv.cores().b1.iter().map(|b| b.word.clone()).collect();
    let alternatives = renv.b2_alternative();
    variant_words.extend(alternatives.iter().map(|(_, _, w)| w.clone()));
    variant_words.extend(renv.cores().b3.iter().map(|b| b.word.clone()));
    report.push(Certificate::words(
        "variant-second-family",
        alternatives.iter().map(|(_, _, w)| w),
    ));
    let (base_rows, variant_rows) = match (psi_rows(&base_words), psi_rows(&variant_words)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note("coordinates", e.to_string()));
            return report;
        }
    };
    let base_hnf = hnf_basis(base_rows);
    let variant_hnf = hnf_basis(variant_rows);
    report.push(Certificate::matrix("base-span-hnf", base_hnf.clone()));
    report.push(Certificate::matrix("variant-span-hnf", variant_hnf.clone()));
    if base_hnf != variant_hnf {
        report.verdict = crate::report::Verdict::Fail;
        report.push(Certificate::note(
            "span-mismatch",
            "the two families generate different coordinate lattices",
        ));
    }
    report
}

// ---------------------------------------------------------------------------
// lemma7: the lift is an abelianized inverse
// ---------------------------------------------------------------------------

/// The lift of one relation letter `Z(g,a)`: the inverse relation word
/// times the section relation word of the representatives,
/// `(u_g u_a u_{ga}⁻¹)⁻¹ · u_{rep(g)} u_{rep(a)} u_{rep(ga)}⁻¹` (identity
/// subscripts drop out, which covers the degenerate display).
fn alpha_letter(renv: &RelativeEnvelope, g: u32, a: u32) -> Word {
    let env = renv.envelope();
    let ga = env.group().mul(g, a);
    let tail = env
        .gen_word(renv.section_rep(g))
        .mul(&env.gen_word(renv.section_rep(a)))
        .mul(&env.gen_word(renv.section_rep(ga)).inv());
    env.z_word(g, a).inv().mul(&tail)
}

/// The lift of a relation-kernel member, extended freely over its
/// relation-letter expansion.
fn alpha_word(renv: &RelativeEnvelope, j: &Word) -> Result<Word, EnvelopeError> {
    let mut out = Word::empty();
    for (g, a, s) in renv.envelope().stage_a_letters(j)? {
        let az = alpha_letter(renv, g, a);
        out = out.mul(&if s > 0 { az } else { az.inv() });
    }
    Ok(out)
}

/// Checks that the lift inverts members of `J_{N,F}` at the level of core
/// coordinates taken modulo conjugation.  The residual
/// `core_coordinates(α(j)) + core_coordinates(j)` must vanish identically
/// for the empty word and for every core element (there the section tail of
/// the lift cancels letter by letter); for representative-letter conjugates
/// of core elements and for `samples` random products of conjugated core
/// elements it must lie in the conjugation lattice (the span of the
/// coordinate differences introduced by single-letter conjugation, which is
/// exactly where inversion is asserted to hold).
#[must_use]
pub fn verify_lemma7(group: &FiniteGroup, normal: &Subgroup, samples: usize, seed: u64) -> Report {
    let name = format!("lemma7[{}]", pair_label(group, normal));
    if group.order() > LEMMA_MAX_ORDER {
        return Report::skipped(
            &name,
            seed,
            format!(
                "order {} exceeds the certified bound {LEMMA_MAX_ORDER}",
                group.order()
            ),
        );
    }
    let renv = match RelativeEnvelope::new(group, normal) {
        Ok(r) => r,
        Err(e) => {
            return Report::fail(&name, seed).with(Certificate::note("construction", e.to_string()))
        }
    };
    let mut report = Report::pass(&name, seed);

    let mut conj_lattice = QuotientView::new(renv.b_count());
    for_each_denominator_row(&renv, true, &mut |row| conj_lattice.add_row(row));
    let conj_lattice = conj_lattice;

    let residual = |j: &Word| -> Result<(Word, SparseVec), EnvelopeError> {
        let aj = alpha_word(&renv, j)?;
        let mut sum = renv.core_coordinates(&aj)?;
        sum.add_scaled(&renv.core_coordinates(j)?, &BigInt::from(1));
        Ok((aj, sum))
    };
    let run = |label: &str, j: &Word, exact: bool, report: &mut Report| -> bool {
        match residual(j) {
            Ok((_, r)) if r.is_zero() => true,
            Ok((_, ref r)) if !exact && conj_lattice.contains(r) => true,
            Ok((aj, r)) => {
                report.verdict = crate::report::Verdict::Fail;
                let kind = if exact { "a nonzero residual" } else { "a residual outside the conjugation lattice" };
                report.push(Certificate::note(
                    label,
                    format!("`{j}`: lift `{aj}` leaves {kind}: {:?}", r.to_dense(renv.b_count())),
                ));
                false
            }
            Err(e) => {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::note(label, format!("`{j}`: {e}")));
                false
            }
        }
    };

    // Deterministic part: the empty word, every core element, and every
    // representative-letter conjugate of a core element.
    if !run("empty-word", &Word::empty(), true, &mut report) {
        return report;
    }
    let reps: Vec<u32> = (1..group.order() as u32).filter(|&z| renv.is_rep(z)).collect();
    let cores: Vec<Word> = renv.cores().b_iter().map(|b| b.word.clone()).collect();
    for b in &cores {
        if !run("core-element", b, true, &mut report) {
            return report;
        }
        for &z in &reps {
            let uz = Word::gen(GenId::base(z));
            let conj = uz.mul(b).mul(&uz.inv());
            if !run("conjugated-core", &conj, false, &mut report) {
                return report;
            }
        }
    }
    report.push(Certificate::value("deterministic-checks", cores.len() * (1 + reps.len()) + 1));

    // Sampled part: products of core elements and their exactness-preserving
    // conjugates (representative letters, relation-kernel words).
    if cores.is_empty() {
        report.push(Certificate::note(
            "sampling",
            "no core elements: the kernel is trivial, sampling is vacuous",
        ));
        return report;
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let qletters = renv.qletter_count();
    let mut examples = Vec::new();
    for sample in 0..samples {
        let factors = rng.gen_range(1..=3);
        let mut j = Word::empty();
        for _ in 0..factors {
            let b = &cores[rng.gen_range(0..cores.len())];
            let kind = rng.gen_range(0..4u32);
            let conj = match kind {
                1 if !reps.is_empty() => Word::gen(GenId::base(reps[rng.gen_range(0..reps.len())])),
                2 if qletters > 0 => renv.lambda_letter_word(rng.gen_range(0..qletters as u32)),
                3 => cores[rng.gen_range(0..cores.len())].clone(),
                _ => Word::empty(),
            };
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            j = j.mul(&conj).mul(&b.pow(s)).mul(&conj.inv());
        }
        if sample < 3 {
            examples.push(j.clone());
        }
        if !run("sampled-member", &j, false, &mut report) {
            return report;
        }
    }
    report.push(Certificate::value("samples", samples));
    report.push(Certificate::words("sample-words", &examples));
    report
}

// ---------------------------------------------------------------------------
// Excision suites
// ---------------------------------------------------------------------------

/// Builds the kernel of the induced multiplier map between two engines.
fn induced_kernel(
    source: &PairEngine,
    target: &PairEngine,
    images: &[u32],
) -> Result<(Vec<Vec<BigInt>>, PresentedKernel), MultiplierError> {
    let matrix = induced_matrix(source, target, images)?;
    let kernel = PresentedKernel::compute(
        source.presented().x_basis().len(),
        source.presented().relations(),
        &matrix,
        target.presented().relations(),
    )
    .map_err(|e| MultiplierError::Unsupported(format!("induced kernel: {e}")))?;
    Ok((matrix, kernel))
}

/// Verifies product-type excision: for `M = N × M0`, the induced map
/// `kj2(N,N) → kj2(M,M)` of the inclusion is injective (trivial kernel of
/// the stacked relation system).
///
/// # Errors
/// [`MultiplierError::CapExceeded`] when `|M|` exceeds the cap, plus
/// engine errors.
pub fn excision_product(
    n: &FiniteGroup,
    m0: &FiniteGroup,
    cap: usize,
) -> Result<Report, MultiplierError> {
    let (m, embed_n, _embed_m0) = FiniteGroup::direct_product(n, m0);
    let name = format!("excise-product[{}<{}]", n.name(), m.name());
    let source = PairEngine::new(n, &n.full_subgroup(), false, cap)?;
    let target = PairEngine::new(&m, &m.full_subgroup(), false, cap)?;
    let (matrix, kernel) = induced_kernel(&source, &target, &embed_n)?;
    let mut report = Report::pass(&name, 0)
        .with(Certificate::value("source-structure", source.structure()))
        .with(Certificate::value("target-structure", target.structure()))
        .with(Certificate::matrix("induced-matrix", matrix))
        .with(Certificate::value("kernel-structure", &kernel.structure));
    if !kernel.is_trivial() {
        report.verdict = crate::report::Verdict::Fail;
        report.push(Certificate::matrix(
            "kernel-generators",
            kernel.x_basis().to_vec(),
        ));
    }
    Ok(report)
}

/// Verifies extended excision for `(N, F) ⊆ (N, G)`: the kernel of the
/// induced map of extended multipliers lies in the image of `kj2(N,N)`
/// under the canonical map into the extended multiplier of `(N, F)`.
///
/// `f_sub` and `n_sub` are subgroups of `g` with `n_sub ⊆ f_sub`.
///
/// # Errors
/// [`MultiplierError::CapExceeded`], [`MultiplierError::NotNormal`],
/// [`MultiplierError::Unsupported`] when `n_sub ⊄ f_sub`, plus engine
/// errors.
pub fn excision_extended(
    g: &FiniteGroup,
    f_sub: &Subgroup,
    n_sub: &Subgroup,
    cap: usize,
) -> Result<Report, MultiplierError> {
    if let Some(&bad) = n_sub.members().iter().find(|&&m| !f_sub.contains(m)) {
        return Err(MultiplierError::Unsupported(format!(
            "normal member {bad} lies outside the intermediate subgroup"
        )));
    }
    let (f_group, f_embed) = g.subgroup_as_group(f_sub, &format!("{}|F", g.name()));
    let n_in_f_ids: Vec<u32> = (0..f_group.order() as u32)
        .filter(|&i| n_sub.contains(f_embed[i as usize]))
        .collect();
    let n_in_f = f_group.subgroup(&n_in_f_ids);
    let name = format!(
        "excise-extended[{}<{}]",
        pair_label(&f_group, &n_in_f),
        g.name()
    );

    let ef = PairEngine::new(&f_group, &n_in_f, true, cap)?;
    let eg = PairEngine::new(g, n_sub, true, cap)?;
    let (matrix, kernel) = induced_kernel(&ef, &eg, &f_embed)?;

    let (n_group, n_embed) = f_group.subgroup_as_group(&n_in_f, &format!("{}|N", g.name()));
    let en = PairEngine::new(&n_group, &n_group.full_subgroup(), false, cap)?;
    let image = induced_matrix(&en, &ef, &n_embed)?;

    let mut span_rows = image.clone();
    span_rows.extend(ef.presented().relations().to_vec());
    let span = hnf_basis(span_rows);

    let mut report = Report::pass(&name, 0)
        .with(Certificate::value("extended-source-structure", ef.structure()))
        .with(Certificate::value("extended-target-structure", eg.structure()))
        .with(Certificate::matrix("induced-matrix", matrix))
        .with(Certificate::value("kernel-structure", &kernel.structure))
        .with(Certificate::matrix("absolute-image", image));
    for k in kernel.x_basis() {
        if express_over_hnf(&span, k).is_none() {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::matrix("escaping-kernel-generator", [k.clone()]));
            return Ok(report);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Splitting and weak-core suites
// ---------------------------------------------------------------------------

/// Runs the strict-splitting convergence check on the product candidate of
/// two groups.
///
/// # Errors
/// [`MultiplierError::CapExceeded`] when the product order exceeds the cap.
pub fn splitcheck_product(
    d: &FiniteGroup,
    e: &FiniteGroup,
    depth: usize,
    cap: usize,
) -> Result<Report, MultiplierError> {
    let cand = product_example(d, e, cap)?;
    let name = format!("splitcheck[{}]", cand.group_name);
    let mut report = Report::pass(&name, 0)
        .with(Certificate::words("core-elements", &cand.core_elements))
        .with(Certificate::words("section-seeds", &cand.seeds))
        .with(Certificate::value("depth-bound", depth));
    match check_strict_splitting(&cand, depth) {
        SplitCheck::Converged(steps) => {
            report.push(Certificate::value("max-steps", steps));
        }
        SplitCheck::DivergedAtBound => {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note(
                "diverged",
                format!("a pair path failed to close within depth {depth}"),
            ));
        }
        SplitCheck::MalformedCandidate(msg) => {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note("malformed-candidate", msg));
        }
    }
    Ok(report)
}

/// Reports the weak-core contrapositive for one pair: when the weak core
/// is machine-verified and the subgroup is free, the multiplier must be
/// trivial; otherwise the suite is skipped with the unmet hypothesis.
///
/// # Errors
/// Engine errors from the multiplier computation.
pub fn lemma8_report(
    group: &FiniteGroup,
    normal: &Subgroup,
    cap: usize,
) -> Result<Report, MultiplierError> {
    let name = format!("lemma8[{}]", pair_label(group, normal));
    let out = lemma8_consequence(group, normal, cap)?;
    let mut report = match &out.verdict {
        Lemma8Verdict::Pass => Report::pass(&name, 0),
        Lemma8Verdict::Fail => Report::fail(&name, 0),
        Lemma8Verdict::Skipped(reason) => Report::skipped(&name, 0, reason.clone()),
    };
    report.push(Certificate::value("weak-core-verified", out.weak_core.verified));
    if let Some(structure) = &out.multiplier {
        report.push(Certificate::value("multiplier-structure", structure));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Oracle cross-check and fixture suites
// ---------------------------------------------------------------------------

/// Cross-checks the pair engine against the independent presentation
/// oracle: `kj2(F, F)` must equal the Schur multiplier computed from a
/// finite presentation of the same group by coset enumeration.
///
/// # Errors
/// Engine errors; oracle failures become `Fail` reports, not errors.
pub fn hopf_crosscheck(
    group: &FiniteGroup,
    pres: &Presentation,
    cap: usize,
) -> Result<Report, MultiplierError> {
    let name = format!("hopf[{}]", group.name());
    let via_pair = crate::multiplier::kj2(group, &group.full_subgroup(), cap)?.structure;
    let mut report = Report::pass(&name, 0)
        .with(Certificate::value("pair-engine-structure", &via_pair))
        .with(Certificate::note("presentation", pres.to_text().replace('\n', "; ")));
    match schur_hopf(pres, cap.max(4 * group.order())) {
        Ok(oracle) => {
            report.push(Certificate::value("oracle-structure", &oracle));
            if oracle != via_pair {
                report.verdict = crate::report::Verdict::Fail;
                report.push(Certificate::note(
                    "oracle-mismatch",
                    format!("pair engine found {via_pair}, oracle found {oracle}"),
                ));
            }
        }
        Err(e) => {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note("oracle-error", e.to_string()));
        }
    }
    Ok(report)
}

/// One claimed 2-cocycle entry: the pair of normal members and the claimed
/// kernel coordinates of the cocycle value.
pub type CocycleClaim = (u32, u32, Vec<BigInt>);

/// Verifies claimed 2-cocycle entries against the canonical extension's
/// cocycle.
///
/// # Errors
/// Engine errors.
pub fn verify_cocycle_claims(
    name: &str,
    group: &FiniteGroup,
    normal: &Subgroup,
    claims: &[CocycleClaim],
    cap: usize,
) -> Result<Report, MultiplierError> {
    let engine = PairEngine::new(group, normal, false, cap)?;
    let mut report =
        Report::pass(name, 0).with(Certificate::value("entries-checked", claims.len()));
    for (m, n, claimed) in claims {
        if !normal.contains(*m) || !normal.contains(*n) {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note(
                "invalid-entry",
                format!("({m}, {n}) is not a pair of normal members"),
            ));
            return Ok(report);
        }
        let actual = engine.a_coords(&engine.cocycle_vector(*m, *n));
        if actual != *claimed {
            report.verdict = crate::report::Verdict::Fail;
            report.push(Certificate::note(
                "cocycle-entry-mismatch",
                format!(
                    "entry ({m}, {n}): claimed {claimed:?}, recomputed {actual:?}"
                ),
            ));
            return Ok(report);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Corpus driver
// ---------------------------------------------------------------------------

/// One named pair of a corpus group with a normal subgroup.
#[derive(Clone, Debug)]
struct CorpusPair {
    name: String,
    group: FiniteGroup,
    normal: Subgroup,
}

/// A loaded corpus directory.
#[derive(Clone, Debug, Default)]
struct Corpus {
    groups: Vec<(String, FiniteGroup)>,
    presentations: BTreeMap<String, Presentation>,
    pairs: Vec<CorpusPair>,
    products: Vec<(String, FiniteGroup, FiniteGroup)>,
    extended: Vec<(String, FiniteGroup, Subgroup, Subgroup)>,
    splits: Vec<(String, FiniteGroup, FiniteGroup, usize)>,
    lemma2_fixtures: Vec<(String, FiniteGroup, Vec<Word>)>,
    cocycle_fixtures: Vec<(String, FiniteGroup, Subgroup, Vec<CocycleClaim>)>,
}

/// Strips comments, blank lines, and an optional leading format line.
fn content_lines(text: &str, path: &Path) -> Result<Vec<String>, CorpusError> {
    let mut lines: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(ToString::to_string)
        .collect();
    if let Some(first) = lines.first() {
        if first.starts_with("regkt-format") {
            if first != FORMAT_LINE {
                return Err(CorpusError::Parse(format!(
                    "{}: unsupported format line `{first}`",
                    path.display()
                )));
            }
            lines.remove(0);
        }
    }
    Ok(lines)
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

/// Sorted paths of the files with one extension inside a subdirectory.
fn dir_files(dir: &Path, sub: &str, ext: &str) -> Result<Vec<PathBuf>, CorpusError> {
    let sub = dir.join(sub);
    if !sub.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(&sub)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == ext) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Loads a group file (optionally versioned, `perm` or `table` header).
///
/// # Errors
/// [`CorpusError`] on io or parse problems.
pub fn load_group_file(path: &Path, cap: usize) -> Result<FiniteGroup, CorpusError> {
    let text = std::fs::read_to_string(path)?;
    FiniteGroup::parse(&file_stem(path), &text, cap)
        .map_err(|e| CorpusError::Parse(format!("{}: {e}", path.display())))
}

/// Parses a normal-subgroup spec: `-` for the trivial subgroup, otherwise
/// semicolon- or comma-separated member indices whose normal closure is
/// taken.
///
/// # Errors
/// [`CorpusError::Parse`] on malformed indices.
pub fn parse_normal_spec(group: &FiniteGroup, spec: &str) -> Result<Subgroup, CorpusError> {
    if spec == "-" {
        return Ok(group.trivial_subgroup());
    }
    let mut gens = Vec::new();
    for tok in spec.split([';', ',']).filter(|t| !t.is_empty()) {
        let id: u32 = tok
            .trim()
            .parse()
            .map_err(|_| CorpusError::Parse(format!("bad element index `{tok}`")))?;
        if id as usize >= group.order() {
            return Err(CorpusError::Parse(format!(
                "element index {id} outside the group of order {}",
                group.order()
            )));
        }
        gens.push(id);
    }
    Ok(group.normal_closure(&gens))
}

/// Parses a claimed relation-basis fixture: a `lemma2 <group>` line then
/// one `word <letters>` line per claimed word.
fn parse_lemma2_fixture(text: &str, path: &Path) -> Result<(String, Vec<Word>), CorpusError> {
    let lines = content_lines(text, path)?;
    let mut it = lines.iter();
    let head = it
        .next()
        .and_then(|l| l.strip_prefix("lemma2 "))
        .ok_or_else(|| {
            CorpusError::Parse(format!("{}: missing `lemma2 <group>` line", path.display()))
        })?
        .trim()
        .to_string();
    let mut words = Vec::new();
    for line in it {
        let body = line.strip_prefix("word").ok_or_else(|| {
            CorpusError::Parse(format!("{}: unexpected line `{line}`", path.display()))
        })?;
        let w = Word::parse(body.trim())
            .map_err(|e| CorpusError::Parse(format!("{}: {e}", path.display())))?;
        words.push(w);
    }
    Ok((head, words))
}

/// Parses a claimed cocycle fixture: `cocycle <group> <normal-spec>` then
/// one `entry m n c…` line per claimed value.
fn parse_cocycle_fixture(
    text: &str,
    path: &Path,
) -> Result<(String, String, Vec<CocycleClaim>), CorpusError> {
    let lines = content_lines(text, path)?;
    let mut it = lines.iter();
    let head = it.next().and_then(|l| l.strip_prefix("cocycle ")).ok_or_else(|| {
        CorpusError::Parse(format!(
            "{}: missing `cocycle <group> <normal-spec>` line",
            path.display()
        ))
    })?;
    let mut parts = head.split_whitespace();
    let (Some(group), Some(normal), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(CorpusError::Parse(format!(
            "{}: cocycle line needs a group and a normal spec",
            path.display()
        )));
    };
    let mut claims = Vec::new();
    for line in it {
        let body = line.strip_prefix("entry").ok_or_else(|| {
            CorpusError::Parse(format!("{}: unexpected line `{line}`", path.display()))
        })?;
        let mut nums = body.split_whitespace();
        let parse_u32 = |t: Option<&str>| -> Result<u32, CorpusError> {
            t.and_then(|v| v.parse().ok()).ok_or_else(|| {
                CorpusError::Parse(format!("{}: bad entry line `{line}`", path.display()))
            })
        };
        let m = parse_u32(nums.next())?;
        let n = parse_u32(nums.next())?;
        let coords: Result<Vec<BigInt>, _> = nums
            .map(|t| {
                t.parse::<BigInt>().map_err(|_| {
                    CorpusError::Parse(format!("{}: bad coordinate `{t}`", path.display()))
                })
            })
            .collect();
        claims.push((m, n, coords?));
    }
    Ok((group.to_string(), normal.to_string(), claims))
}

impl Corpus {
    fn load(dir: &Path, cap: usize) -> Result<Corpus, CorpusError> {
        let mut groups: Vec<(String, FiniteGroup)> = Vec::new();
        for path in dir_files(dir, "groups", "grp")? {
            groups.push((file_stem(&path), load_group_file(&path, cap)?));
        }
        let find_group = |stem: &str, what: &Path| -> Result<FiniteGroup, CorpusError> {
            groups
                .iter()
                .find(|(s, _)| s == stem)
                .map(|(_, g)| g.clone())
                .ok_or_else(|| {
                    CorpusError::Parse(format!("{}: unknown group `{stem}`", what.display()))
                })
        };
        let mut presentations = BTreeMap::new();
        for path in dir_files(dir, "presentations", "pres")? {
            let text = std::fs::read_to_string(&path)?;
            let pres = Presentation::parse(&text)
                .map_err(|e| CorpusError::Parse(format!("{}: {e}", path.display())))?;
            presentations.insert(file_stem(&path), pres);
        }

        let read_tsv = |name: &str| -> Result<Vec<Vec<String>>, CorpusError> {
            let path = dir.join(name);
            if !path.is_file() {
                return Ok(Vec::new());
            }
            let text = std::fs::read_to_string(&path)?;
            Ok(content_lines(&text, &path)?
                .iter()
                .map(|l| l.split_whitespace().map(ToString::to_string).collect())
                .collect())
        };

        let mut pairs = Vec::new();
        for row in read_tsv("pairs.tsv")? {
            let [name, stem, spec] = row.as_slice() else {
                return Err(CorpusError::Parse(format!(
                    "pairs.tsv: expected `name group normal-spec`, found `{}`",
                    row.join(" ")
                )));
            };
            let group = find_group(stem, &dir.join("pairs.tsv"))?;
            let normal = parse_normal_spec(&group, spec)?;
            pairs.push(CorpusPair {
                name: name.clone(),
                group,
                normal,
            });
        }
        let mut products = Vec::new();
        for row in read_tsv("products.tsv")? {
            let [name, n_stem, m0_stem] = row.as_slice() else {
                return Err(CorpusError::Parse(format!(
                    "products.tsv: expected `name n-group m0-group`, found `{}`",
                    row.join(" ")
                )));
            };
            let n = find_group(n_stem, &dir.join("products.tsv"))?;
            let m0 = find_group(m0_stem, &dir.join("products.tsv"))?;
            products.push((name.clone(), n, m0));
        }
        let mut extended = Vec::new();
        for row in read_tsv("extended.tsv")? {
            let [name, g_stem, f_spec, n_spec] = row.as_slice() else {
                return Err(CorpusError::Parse(format!(
                    "extended.tsv: expected `name g-group f-gens n-gens`, found `{}`",
                    row.join(" ")
                )));
            };
            let g = find_group(g_stem, &dir.join("extended.tsv"))?;
            let f_gens = parse_normal_spec(&g, f_spec)?;
            let f_sub = g.subgroup(f_gens.members());
            let n_sub = parse_normal_spec(&g, n_spec)?;
            extended.push((name.clone(), g, f_sub, n_sub));
        }
        let mut splits = Vec::new();
        for row in read_tsv("splits.tsv")? {
            let [name, d_stem, e_stem, depth] = row.as_slice() else {
                return Err(CorpusError::Parse(format!(
                    "splits.tsv: expected `name d-group e-group depth`, found `{}`",
                    row.join(" ")
                )));
            };
            let d = find_group(d_stem, &dir.join("splits.tsv"))?;
            let e = find_group(e_stem, &dir.join("splits.tsv"))?;
            let depth: usize = depth.parse().map_err(|_| {
                CorpusError::Parse(format!("splits.tsv: bad depth `{depth}`"))
            })?;
            splits.push((name.clone(), d, e, depth));
        }

        let mut lemma2_fixtures = Vec::new();
        for path in dir_files(&dir.join("fixtures"), "lemma2", "words")? {
            let text = std::fs::read_to_string(&path)?;
            let (stem, words) = parse_lemma2_fixture(&text, &path)?;
            let group = find_group(&stem, &path)?;
            lemma2_fixtures.push((file_stem(&path), group, words));
        }
        let mut cocycle_fixtures = Vec::new();
        for path in dir_files(&dir.join("fixtures"), "cocycle", "coc")? {
            let text = std::fs::read_to_string(&path)?;
            let (stem, spec, claims) = parse_cocycle_fixture(&text, &path)?;
            let group = find_group(&stem, &path)?;
            let normal = parse_normal_spec(&group, &spec)?;
            cocycle_fixtures.push((file_stem(&path), group, normal, claims));
        }
        Ok(Corpus {
            groups,
            presentations,
            pairs,
            products,
            extended,
            splits,
            lemma2_fixtures,
            cocycle_fixtures,
        })
    }
}

type Job = Box<dyn FnOnce() -> Report + Send>;

/// Runs jobs on a fixed-size worker pool and collects their reports.
fn run_pool(jobs: Vec<Job>, threads: usize) -> Vec<Report> {
    let threads = if threads == 0 {
        std::thread::available_parallelism().map_or(1, std::num::NonZeroUsize::get)
    } else {
        threads
    }
    .max(1)
    .min(jobs.len().max(1));
    let queue: Mutex<Vec<Job>> = Mutex::new(jobs);
    let results: Mutex<Vec<Report>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let job = queue.lock().expect("queue lock").pop();
                match job {
                    Some(job) => {
                        let report = job();
                        results.lock().expect("results lock").push(report);
                    }
                    None => break,
                }
            });
        }
    });
    results.into_inner().expect("pool finished")
}

/// Converts a suite-level engine error into a failing report, preserving
/// the error class.
fn error_report(name: &str, seed: u64, err: &MultiplierError) -> Report {
    let class = match err {
        MultiplierError::CapExceeded { .. } => "CapExceeded",
        MultiplierError::NotNormal => "NotNormal",
        MultiplierError::NotPerfect => "NotPerfect",
        MultiplierError::NotFull => "NotFull",
        MultiplierError::InfiniteKernel(_) => "InfiniteKernel",
        MultiplierError::NotHomomorphism(_) => "NotHomomorphism",
        MultiplierError::Unsupported(_) => "Unsupported",
    };
    Report::fail(name, seed)
        .with(Certificate::note("error-class", class))
        .with(Certificate::note("error", err.to_string()))
}

/// Runs every suite over a corpus directory and returns the merged
/// reports: basis certification (and claimed-basis fixtures) per group,
/// the presentation-oracle cross-check per group with a presentation, the
/// pair suites per pair, the excision suites, the splitting checks, and
/// the heavy-hypothesis scans.
///
/// # Errors
/// [`CorpusError`] when the corpus itself cannot be loaded; suite-level
/// problems become `Fail` or `Skipped` reports instead.
pub fn run_corpus(dir: &Path, config: &CorpusConfig) -> Result<Vec<Report>, CorpusError> {
    let corpus = Corpus::load(dir, config.cap)?;
    let cfg = config.clone();
    let mut jobs: Vec<Job> = Vec::new();

    for (_, group) in &corpus.groups {
        let g = group.clone();
        jobs.push(Box::new(move || verify_lemma2(&g)));
        if let Some(pres) = corpus.presentations.get(group.name()) {
            let (g, p, cap) = (group.clone(), pres.clone(), cfg.cap);
            jobs.push(Box::new(move || {
                hopf_crosscheck(&g, &p, cap)
                    .unwrap_or_else(|e| error_report(&format!("hopf[{}]", g.name()), 0, &e))
            }));
        }
    }
    for (stem, group, words) in &corpus.lemma2_fixtures {
        let name = format!("lemma2-fixture[{stem}]");
        let (g, w) = (group.clone(), words.clone());
        jobs.push(Box::new(move || verify_lemma2_words(&name, &g, &w)));
    }
    for pair in &corpus.pairs {
        let p = pair.clone();
        let cfg2 = cfg.clone();
        jobs.push(Box::new(move || {
            let mut r = verify_lemma1_lemma3(&p.group, &p.normal, cfg2.samples, cfg2.depth, cfg2.seed);
            r.name = format!("lemma134[{}]", p.name);
            r
        }));
        let p = pair.clone();
        jobs.push(Box::new(move || {
            let mut r = verify_lemma4(&p.group, &p.normal);
            r.name = format!("lemma4[{}]", p.name);
            r
        }));
        let p = pair.clone();
        let cfg2 = cfg.clone();
        jobs.push(Box::new(move || {
            let mut r = verify_lemma7(&p.group, &p.normal, cfg2.samples, cfg2.seed);
            r.name = format!("lemma7[{}]", p.name);
            r
        }));
        let p = pair.clone();
        let cap = cfg.cap;
        jobs.push(Box::new(move || {
            let label = format!("lemma8[{}]", p.name);
            match lemma8_report(&p.group, &p.normal, cap) {
                Ok(mut r) => {
                    r.name = label;
                    r
                }
                Err(e) => error_report(&label, 0, &e),
            }
        }));
    }
    for (stem, group, normal, claims) in &corpus.cocycle_fixtures {
        let name = format!("cocycle-fixture[{stem}]");
        let (g, nm, cl, cap) = (group.clone(), normal.clone(), claims.clone(), cfg.cap);
        jobs.push(Box::new(move || {
            verify_cocycle_claims(&name, &g, &nm, &cl, cap)
                .unwrap_or_else(|e| error_report(&name, 0, &e))
        }));
    }
    for (name, n, m0) in &corpus.products {
        let label = format!("excise-product[{name}]");
        let (n, m0, cap) = (n.clone(), m0.clone(), cfg.cap);
        jobs.push(Box::new(move || match excision_product(&n, &m0, cap) {
            Ok(mut r) => {
                r.name = label.clone();
                r
            }
            Err(e) => error_report(&label, 0, &e),
        }));
    }
    for (name, g, f_sub, n_sub) in &corpus.extended {
        let label = format!("excise-extended[{name}]");
        let (g, f_sub, n_sub, cap) = (g.clone(), f_sub.clone(), n_sub.clone(), cfg.cap);
        jobs.push(Box::new(move || {
            match excision_extended(&g, &f_sub, &n_sub, cap) {
                Ok(mut r) => {
                    r.name = label.clone();
                    r
                }
                Err(e) => error_report(&label, 0, &e),
            }
        }));
    }
    for (name, d, e, depth) in &corpus.splits {
        let label = format!("splitcheck[{name}]");
        let (d, e, depth, cap) = (d.clone(), e.clone(), *depth, cfg.cap);
        jobs.push(Box::new(move || {
            match splitcheck_product(&d, &e, depth, cap) {
                Ok(mut r) => {
                    r.name = label.clone();
                    r
                }
                Err(err) => error_report(&label, 0, &err),
            }
        }));
    }
    if !corpus.pairs.is_empty() {
        let count = corpus.pairs.len();
        jobs.push(Box::new(move || {
            Report::skipped(
                "retraction-scan",
                0,
                "the retraction clause's side conditions (an equivariant retraction of the \
                 inclusion) are not machine-verified for any corpus instance",
            )
            .with(Certificate::value("pairs-scanned", count))
            .with(Certificate::value("testable-instances", 0))
        }));
    }

    let reports = run_pool(jobs, cfg.threads);
    Ok(merge_reports(reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;
    use crate::testutil;

    #[test]
    fn lemma2_certifies_small_groups_and_skips_large_ones() {
        let c2 = testutil::cyclic(2);
        let r = verify_lemma2(&c2);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let count = r
            .certificates
            .iter()
            .find(|c| c.label == "basis-count")
            .expect("count certificate");
        assert_eq!(count.data, ["1"]);

        let c3 = testutil::cyclic(3);
        let r = verify_lemma2(&c3);
        assert_eq!(r.verdict, Verdict::Pass);
        let states = r
            .certificates
            .iter()
            .find(|c| c.label == "automaton-states")
            .expect("states certificate");
        assert_eq!(states.data, ["3"]);

        let c1 = testutil::cyclic(1);
        assert_eq!(verify_lemma2(&c1).verdict, Verdict::Pass);

        let big = testutil::cyclic(13);
        assert!(matches!(verify_lemma2(&big).verdict, Verdict::Skipped { .. }));
    }

    #[test]
    fn lemma2_word_check_rejects_a_mutated_basis() {
        let c4 = testutil::cyclic(4);
        let env = Envelope::new(c4.clone());
        let mut words = env.jf_basis();
        words[3] = words[3].mul(&Word::gen(GenId::base(1)));
        let r = verify_lemma2_words("lemma2-fixture[c4]", &c4, &words);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.certificates.iter().any(|c| c.label == "non-identity-word"));
    }

    #[test]
    fn lemma134_round_trips_on_c2_in_c4_and_is_vacuous_on_trivial_n() {
        let c4 = testutil::cyclic(4);
        let normal = c4.normal_closure(&[2]);
        let r = verify_lemma1_lemma3(&c4, &normal, 25, 2, 7);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");

        let r = verify_lemma1_lemma3(&c4, &c4.trivial_subgroup(), 5, 2, 7);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.certificates.iter().any(|c| c.label == "sampling"));
    }

    #[test]
    fn lemma4_spans_agree_on_c2_in_c4_and_v4_in_a4() {
        let c4 = testutil::cyclic(4);
        let r = verify_lemma4(&c4, &c4.normal_closure(&[2]));
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");

        let a4 = testutil::a4();
        let v4 = testutil::normal_of_order(&a4, 4);
        let r = verify_lemma4(&a4, &v4);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");

        let r = verify_lemma4(&c4, &c4.trivial_subgroup());
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn lemma7_lift_is_opposite_on_samples() {
        let c4 = testutil::cyclic(4);
        let r = verify_lemma7(&c4, &c4.normal_closure(&[2]), 40, 11);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");

        let s3 = testutil::s3();
        let n = testutil::normal_of_order(&s3, 3);
        let r = verify_lemma7(&s3, &n, 40, 11);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn excision_product_is_injective_for_v4_in_c2_cubed() {
        let v4 = testutil::v4();
        let c2 = testutil::cyclic(2);
        let r = excision_product(&v4, &c2, 512).expect("within cap");
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");

        let c1 = testutil::cyclic(1);
        let r = excision_product(&c1, &c2, 512).expect("within cap");
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn excision_extended_passes_for_c4_inside_c4xc2() {
        let c4 = testutil::cyclic(4);
        let c2 = testutil::cyclic(2);
        let (g, embed_f, _) = FiniteGroup::direct_product(&c4, &c2);
        let f_sub = g.subgroup(&embed_f);
        let n_sub = g.normal_closure(&[embed_f[2]]);
        let r = excision_extended(&g, &f_sub, &n_sub, 512).expect("within cap");
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");

        // F = G: the kernel is trivial.
        let r = excision_extended(&g, &g.full_subgroup(), &n_sub, 512).expect("within cap");
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn splitcheck_converges_on_the_product_candidate() {
        let c2 = testutil::cyclic(2);
        let r = splitcheck_product(&c2, &c2, 5, 64).expect("within cap");
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn cocycle_claims_verify_and_reject_corruption() {
        let c4 = testutil::cyclic(4);
        let normal = c4.normal_closure(&[2]);
        let engine = PairEngine::new(&c4, &normal, false, 64).expect("engine");
        let good: Vec<CocycleClaim> = vec![(2, 2, engine.a_coords(&engine.cocycle_vector(2, 2)))];
        let r = verify_cocycle_claims("cocycle-fixture[t]", &c4, &normal, &good, 64).expect("ok");
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");

        let mut bad = good;
        bad[0].2[0] += 1;
        let r = verify_cocycle_claims("cocycle-fixture[t]", &c4, &normal, &bad, 64).expect("ok");
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r
            .certificates
            .iter()
            .any(|c| c.label == "cocycle-entry-mismatch"));
    }

    #[test]
    fn run_corpus_handles_an_empty_directory() {
        let dir = std::env::temp_dir().join(format!("regkt-empty-corpus-{}", std::process::id()));
        std::fs::create_dir_all(&dir).expect("mkdir");
        let reports = run_corpus(&dir, &CorpusConfig::default()).expect("empty corpus");
        assert!(reports.is_empty());
        std::fs::remove_dir_all(&dir).ok();
    }
}

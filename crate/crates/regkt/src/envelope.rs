//! The free envelope of a finite group and its relative rewriting engine.
//!
//! For a finite group `F` the *envelope* `U_F` is the free group on one
//! generator `u_x` per non-identity element `x`, together with the
//! evaluation homomorphism `U_F → F`, `u_x ↦ x`.  Whenever a subscript
//! computes to the identity the generator is read as the empty word, so
//! expressions like `u_x u_y u_{xy}⁻¹` make sense for all `x, y`.  The
//! kernel `J_F` of evaluation is free on the `(|F|−1)²` relation words
//! `Z(x,y) = u_x u_y u_{xy}⁻¹` ([`Envelope::jf_basis`]).
//!
//! A [`RelativeEnvelope`] fixes a normal subgroup `N ⊲ F` and studies
//!
//! * `U_{N,F}` — the kernel of the letterwise projection `U_F → U_{F/N}`
//!   (`u_x ↦ u_{xN}`, cosets of `N` read as the empty word), and
//! * `J_{N,F} = U_{N,F} ∩ J_F`.
//!
//! `U_{N,F}` is free on conjugates of the `ucore` words `u_a u_{ā}⁻¹`
//! (`ā` the chosen coset representative), while `J_{N,F}` is generated,
//! modulo conjugation, by three families of *core elements*:
//!
//! ```text
//! B1(c,d)   = u_c u_d u_{cd}⁻¹          c, d ∈ N \ 1
//! B2(x,d)   = u_x u_d u_{xd}⁻¹          x a non-identity representative, d ∈ N \ 1
//! B3(c,d,y) = u_c u_{dy} u_{cdy}⁻¹      c ∈ N \ 1, d ∈ N, y a non-identity representative
//! ```
//!
//! The engine exposes three exact Schreier-style scans, each of which
//! rewrites a word over a transversal and records the letters it crosses:
//!
//! * [`Envelope::stage_a_letters`] expands a member of `J_F` over the
//!   `Z(g,a)` basis (states are group elements, transversal `u_g`);
//! * [`RelativeEnvelope::stage_b_letters`] expands a member of `J_{N,F}`
//!   over slot letters conjugated by lifted quotient relation words;
//! * [`RelativeEnvelope::theta_letters`] expands a member of `U_{N,F}`
//!   over conjugated `ucore` letters.
//!
//! On top of the scans sit two abelianized coordinate maps: [`RelativeEnvelope::core_coordinates`]
//! (`ψ`, values in `ℤ^B` where `B = B1 ∪ B2 ∪ B3`) and [`RelativeEnvelope::theta`]
//! (`θ`, values in `ℤ^ucore`).  Both drop the conjugators produced by
//! their scans; `ψ` additionally rewrites non-core slot letters into core
//! coordinates through the closed-form column map [`RelativeEnvelope::phi_column`],
//! whose backing word identities are checked in the unit tests.
//!
//! Envelopes are immutable after construction (all tables, including the
//! `φ` columns, are precomputed), so lookups and scans are `&self` and
//! thread-safe.


use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::fingroup::{FiniteGroup, Quotient, Subgroup};
use crate::freeword::{GenId, Word};
use crate::zlattice::SparseVec;

/// Errors from envelope construction and rewriting.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvelopeError {
    /// The designated subgroup is not normal in the base group.
    #[error("subgroup is not normal in the base group")]
    NotNormal,
    /// The word does not lie in the subgroup required by the operation.
    #[error("word is not a member of the required subgroup")]
    NotMember,
    /// The word uses a letter outside the envelope alphabet.
    #[error("unknown generator {0} for this envelope")]
    UnknownGenerator(GenId),
}

/// Which core family an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoreKind {
    B1,
    B2,
    B3,
    UCore,
}

impl std::fmt::Display for CoreKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoreKind::B1 => write!(f, "B1"),
            CoreKind::B2 => write!(f, "B2"),
            CoreKind::B3 => write!(f, "B3"),
            CoreKind::UCore => write!(f, "U"),
        }
    }
}

/// One core generator: its family, defining element indices, and word.
///
/// Indices are `[c, d]` for `B1`, `[x, d]` for `B2`, `[c, d, y]` for `B3`
/// (where `d` may be the identity), and `[a]` for `UCore`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreElement {
    pub kind: CoreKind,
    pub indices: Vec<u32>,
    pub word: Word,
}

impl std::fmt::Display for CoreElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(", self.kind)?;
        for (i, idx) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{idx}")?;
        }
        write!(f, ")")
    }
}

/// The core families of a relative envelope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreSet {
    pub b1: Vec<CoreElement>,
    pub b2: Vec<CoreElement>,
    pub b3: Vec<CoreElement>,
    pub ucore: Vec<CoreElement>,
}

impl CoreSet {
    /// Number of `B`-family elements (`B1`, `B2` and `B3` together).
    pub fn b_count(&self) -> usize {
        self.b1.len() + self.b2.len() + self.b3.len()
    }

    /// The `i`-th `B`-family element in column order (`B1`, `B2`, `B3`).
    pub fn b_element(&self, i: usize) -> &CoreElement {
        let n1 = self.b1.len();
        let n2 = self.b2.len();
        if i < n1 {
            &self.b1[i]
        } else if i < n1 + n2 {
            &self.b2[i - n1]
        } else {
            &self.b3[i - n1 - n2]
        }
    }

    /// Iterates the `B`-family elements in column order.
    pub fn b_iter(&self) -> impl Iterator<Item = &CoreElement> {
        self.b1.iter().chain(self.b2.iter()).chain(self.b3.iter())
    }
}

/// The free envelope of a finite group: alphabet, evaluation, and the
/// relation-kernel machinery that does not depend on a normal subgroup.
#[derive(Debug, Clone)]
pub struct Envelope {
    group: FiniteGroup,
    alphabet: Vec<GenId>,
}

impl Envelope {
    pub fn new(group: FiniteGroup) -> Envelope {
        let alphabet = (1..group.order() as u32).map(GenId::base).collect();
        Envelope { group, alphabet }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// One generator per non-identity element, `u_x ↔ GenId::base(x)`.
    pub fn alphabet(&self) -> &[GenId] {
        &self.alphabet
    }

    /// The generator word `u_x`; the identity yields the empty word.
    pub fn gen_word(&self, x: u32) -> Word {
        debug_assert!((x as usize) < self.group.order());
        if x == 0 {
            Word::empty()
        } else {
            Word::gen(GenId::base(x))
        }
    }

    /// The relation word `Z(g,a) = u_g u_a u_{ga}⁻¹` (identity subscripts
    /// drop out, so degenerate inputs give shorter words).
    pub fn z_word(&self, g: u32, a: u32) -> Word {
        let ga = self.group.mul(g, a);
        self.gen_word(g)
            .mul(&self.gen_word(a))
            .mul(&self.gen_word(ga).inv())
    }

    /// The element behind an alphabet letter, if it is one.
    fn letter_element(&self, g: GenId) -> Option<u32> {
        if g.tag == crate::freeword::TAG_BASE && g.index >= 1 && (g.index as usize) < self.group.order()
        {
            Some(g.index)
        } else {
            None
        }
    }

    /// Evaluates a word in the base group.
    ///
    /// # Errors
    /// [`EnvelopeError::UnknownGenerator`] on letters outside the alphabet.
    pub fn eval(&self, w: &Word) -> Result<u32, EnvelopeError> {
        let mut p = 0u32;
        for &(g, sign) in w.letters() {
            let x = self
                .letter_element(g)
                .ok_or(EnvelopeError::UnknownGenerator(g))?;
            let x = if sign > 0 { x } else { self.group.inv(x) };
            p = self.group.mul(p, x);
        }
        Ok(p)
    }

    /// True iff `w` is over the alphabet and evaluates to the identity.
    pub fn member_jf(&self, w: &Word) -> bool {
        self.eval(w) == Ok(0)
    }

    /// The free basis of the evaluation kernel: the `(|F|−1)²` words
    /// `Z(x,y)` for `x, y ≠ 1`, in `(x, y)` order.
    pub fn jf_basis(&self) -> Vec<Word> {
        self.jf_basis_pairs()
            .into_iter()
            .map(|(x, y)| self.z_word(x, y))
            .collect()
    }

    /// The index pairs behind [`Envelope::jf_basis`], in the same order.
    pub fn jf_basis_pairs(&self) -> Vec<(u32, u32)> {
        let n = self.group.order() as u32;
        let mut out = Vec::new();
        for x in 1..n {
            for y in 1..n {
                out.push((x, y));
            }
        }
        out
    }

    /// Exact expansion of a member of the evaluation kernel over the
    /// `Z(g,a)` basis: returns `(g, a, sign)` triples such that
    /// `w = Π Z(gᵢ,aᵢ)^{signᵢ}` holds letter-for-letter.
    ///
    /// The scan walks the Cayley automaton of the group: the state is the
    /// evaluation of the processed prefix, and every letter crossed away
    /// from the identity state emits the basis letter it traverses.
    ///
    /// # Errors
    /// [`EnvelopeError::NotMember`] if `w` has an unknown letter or does
    /// not evaluate to the identity.
    pub fn stage_a_letters(&self, w: &Word) -> Result<Vec<(u32, u32, i8)>, EnvelopeError> {
        if !self.member_jf(w) {
            return Err(EnvelopeError::NotMember);
        }
        let mut out = Vec::with_capacity(w.len());
        let mut p = 0u32;
        for &(g, sign) in w.letters() {
            let a = self.letter_element(g).ok_or(EnvelopeError::NotMember)?;
            if sign > 0 {
                if p != 0 {
                    out.push((p, a, 1));
                }
                p = self.group.mul(p, a);
            } else {
                let prev = self.group.mul(p, self.group.inv(a));
                if prev != 0 {
                    out.push((prev, a, -1));
                }
                p = prev;
            }
        }
        debug_assert_eq!(p, 0);
        Ok(out)
    }
}

/// A normal subgroup `N ⊲ F` together with everything the relative
/// rewriting engine precomputes: the quotient, the minimal-index section,
/// the core families, the slot enumeration, and the `φ` columns.
#[derive(Debug, Clone)]
pub struct RelativeEnvelope {
    env: Envelope,
    normal: Subgroup,
    quotient: Quotient,
    qenv: Envelope,
    /// `rep_of[x]` = minimal-index representative of the coset `xN`.
    rep_of: Vec<u32>,
    in_n: Vec<bool>,
    cores: CoreSet,
    /// Column of the `B`-element whose word is `Z(g,a)`, by pair `g·n+a`;
    /// `u32::MAX` where the pair carries no `B`-element.
    b_of_pair: Vec<u32>,
    /// `ucore_of[a]` = column of the `ucore` element `u_a u_{ā}⁻¹`.
    ucore_of: Vec<u32>,
    /// Slot pairs `(g, a)` in lexicographic order: all pairs of
    /// non-identity elements except those where both are representatives.
    slots: Vec<(u32, u32)>,
    slot_of: Vec<u32>,
    /// Per-slot column of the quotient relation letter `Z'(gN, aN)`
    /// (`u32::MAX` for kernel slots, where one side lies in `N`).
    qletter_of_slot: Vec<u32>,
    /// `φ` column per slot: core coordinates of the slot letter.
    phi: Vec<SparseVec>,
}

impl RelativeEnvelope {
    /// Builds the relative envelope for `N ⊲ F`.
    ///
    /// # Errors
    /// [`EnvelopeError::NotNormal`] when the subgroup is not normal.
    pub fn new(group: &FiniteGroup, normal: &Subgroup) -> Result<RelativeEnvelope, EnvelopeError> {
        let quotient = group
            .quotient(normal)
            .map_err(|_| EnvelopeError::NotNormal)?;
        let env = Envelope::new(group.clone());
        let qenv = Envelope::new(quotient.group.clone());
        let n = group.order() as u32;
        let rep_of: Vec<u32> = (0..n)
            .map(|x| quotient.reps[quotient.projection[x as usize] as usize])
            .collect();
        let in_n: Vec<bool> = (0..n).map(|x| quotient.projection[x as usize] == 0).collect();

        let n_members: Vec<u32> = normal.members().iter().copied().filter(|&c| c != 0).collect();
        let reps: Vec<u32> = quotient.reps.iter().copied().filter(|&x| x != 0).collect();

        // Core families, in column order B1, B2, B3.
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        let mut b3 = Vec::new();
        let mut b_of_pair = vec![u32::MAX; (n * n) as usize];
        let mut col = 0u32;
        for &c in &n_members {
            for &d in &n_members {
                b1.push(CoreElement {
                    kind: CoreKind::B1,
                    indices: vec![c, d],
                    word: env.z_word(c, d),
                });
                b_of_pair[(c * n + d) as usize] = col;
                col += 1;
            }
        }
        for &x in &reps {
            for &d in &n_members {
                b2.push(CoreElement {
                    kind: CoreKind::B2,
                    indices: vec![x, d],
                    word: env.z_word(x, d),
                });
                b_of_pair[(x * n + d) as usize] = col;
                col += 1;
            }
        }
        for &c in &n_members {
            for &d in normal.members() {
                for &y in &reps {
                    let dy = group.mul(d, y);
                    b3.push(CoreElement {
                        kind: CoreKind::B3,
                        indices: vec![c, d, y],
                        word: env.z_word(c, dy),
                    });
                    b_of_pair[(c * n + dy) as usize] = col;
                    col += 1;
                }
            }
        }
        let mut ucore = Vec::new();
        let mut ucore_of = vec![u32::MAX; n as usize];
        for a in 1..n {
            let r = rep_of[a as usize];
            if a != r {
                ucore_of[a as usize] = ucore.len() as u32;
                ucore.push(CoreElement {
                    kind: CoreKind::UCore,
                    indices: vec![a],
                    word: env.gen_word(a).mul(&env.gen_word(r).inv()),
                });
            }
        }
        let cores = CoreSet { b1, b2, b3, ucore };

        // Slot enumeration: all pairs of non-identity elements except
        // both-representative pairs (those are spanning-tree edges of the
        // second-stage scan and never emit).
        let q = quotient.group.order() as u32;
        let mut slots = Vec::new();
        let mut slot_of = vec![u32::MAX; (n * n) as usize];
        let mut qletter_of_slot = Vec::new();
        for g in 1..n {
            for a in 1..n {
                let g_rep = rep_of[g as usize] == g;
                let a_rep = rep_of[a as usize] == a;
                if g_rep && a_rep {
                    continue;
                }
                slot_of[(g * n + a) as usize] = slots.len() as u32;
                let kernel = in_n[g as usize] || in_n[a as usize];
                qletter_of_slot.push(if kernel {
                    u32::MAX
                } else {
                    let xi = quotient.projection[g as usize];
                    let eta = quotient.projection[a as usize];
                    debug_assert!(xi != 0 && eta != 0);
                    (xi - 1) * (q - 1) + (eta - 1)
                });
                slots.push((g, a));
            }
        }

        let mut renv = RelativeEnvelope {
            env,
            normal: normal.clone(),
            quotient,
            qenv,
            rep_of,
            in_n,
            cores,
            b_of_pair,
            ucore_of,
            slots,
            slot_of,
            qletter_of_slot,
            phi: Vec::new(),
        };
        renv.phi = (0..renv.slots.len()).map(|s| renv.compute_phi(s)).collect();
        Ok(renv)
    }

    pub fn envelope(&self) -> &Envelope {
        &self.env
    }

    pub fn group(&self) -> &FiniteGroup {
        self.env.group()
    }

    pub fn normal(&self) -> &Subgroup {
        &self.normal
    }

    /// The quotient group `F/N` (element `0` is the coset `N`).
    pub fn quotient_group(&self) -> &FiniteGroup {
        &self.quotient.group
    }

    /// The envelope of the quotient group (alphabet of projected words).
    pub fn quotient_envelope(&self) -> &Envelope {
        &self.qenv
    }

    /// Minimal-index representative of the coset `xN`.
    pub fn section_rep(&self, x: u32) -> u32 {
        self.rep_of[x as usize]
    }

    pub fn in_normal(&self, x: u32) -> bool {
        self.in_n[x as usize]
    }

    pub fn is_rep(&self, x: u32) -> bool {
        self.rep_of[x as usize] == x
    }

    /// The core families (`jnf` cores and the `ucore`).
    pub fn cores(&self) -> &CoreSet {
        &self.cores
    }

    pub fn b_count(&self) -> usize {
        self.cores.b_count()
    }

    /// Column of the core element whose word is `Z(g, a)`, when that pair
    /// carries one (`B1`, `B2` and `B3` pairs do; others don't).
    pub fn b_column_of_pair(&self, g: u32, a: u32) -> Option<u32> {
        let n = self.group().order() as u32;
        let col = self.b_of_pair[(g * n + a) as usize];
        if col == u32::MAX {
            None
        } else {
            Some(col)
        }
    }

    pub fn ucore_count(&self) -> usize {
        self.cores.ucore.len()
    }

    /// Alternative second-family words `[u_x, u_d] · u_d · u_{xdx⁻¹}⁻¹`,
    /// one per `B2` index pair, in `B2` column order.  They differ from
    /// the `B2` words by a `B3` unit and are exposed for the derived-set
    /// span comparison.
    pub fn b2_alternative(&self) -> Vec<(u32, u32, Word)> {
        self.cores
            .b2
            .iter()
            .map(|e| {
                let (x, d) = (e.indices[0], e.indices[1]);
                let g = self.group();
                let xdx = g.mul(g.mul(x, d), g.inv(x));
                let ux = self.env.gen_word(x);
                let ud = self.env.gen_word(d);
                let word = ux
                    .comm(&ud)
                    .mul(&ud)
                    .mul(&self.env.gen_word(xdx).inv());
                (x, d, word)
            })
            .collect()
    }

    /// Number of slot letters.
    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// The element pair `(g, a)` of a slot.
    pub fn slot_pair(&self, slot: usize) -> (u32, u32) {
        self.slots[slot]
    }

    /// Whether a slot letter already lies in `J_{N,F}` (one side in `N`).
    pub fn slot_is_kernel(&self, slot: usize) -> bool {
        self.qletter_of_slot[slot] == u32::MAX
    }

    /// The slot letter as a word: `Z(g,a)` for kernel slots, otherwise
    /// `Z(g,a) · λ(Z'(gN,aN))⁻¹` (the lifted quotient letter is divided
    /// out so the result lies in `J_{N,F}`).
    pub fn slot_word(&self, slot: usize) -> Word {
        let (g, a) = self.slots[slot];
        let z = self.env.z_word(g, a);
        let ql = self.qletter_of_slot[slot];
        if ql == u32::MAX {
            z
        } else {
            z.mul(&self.lambda_letter_word(ql).inv())
        }
    }

    /// Number of quotient relation letters `Z'(ξ,η)`, `ξ,η ≠ 1`.
    pub fn qletter_count(&self) -> usize {
        let q = self.quotient.group.order();
        (q - 1) * (q - 1)
    }

    /// The lift `λ(Z'(ξ,η)) = Z(s(ξ), s(η))` of a quotient relation
    /// letter, as a word over the base alphabet.
    pub fn lambda_letter_word(&self, qletter: u32) -> Word {
        let q = self.quotient.group.order() as u32;
        let xi = qletter / (q - 1) + 1;
        let eta = qletter % (q - 1) + 1;
        let sx = self.quotient.reps[xi as usize];
        let sy = self.quotient.reps[eta as usize];
        self.env.z_word(sx, sy)
    }

    /// Lifts a word over quotient relation letters (`GenId::basis`
    /// indices) through `λ`, letterwise.
    pub fn lambda_word(&self, v: &Word) -> Word {
        let mut out = Word::empty();
        for &(g, sign) in v.letters() {
            debug_assert_eq!(g.tag, crate::freeword::TAG_BASIS);
            let lw = self.lambda_letter_word(g.index);
            out = out.mul(&if sign > 0 { lw } else { lw.inv() });
        }
        out
    }

    /// Lifts a word over the quotient alphabet through the section,
    /// letterwise: `u_ξ ↦ u_{s(ξ)}`.
    pub fn sigma_word(&self, omega: &Word) -> Word {
        let mut out = Word::empty();
        for &(g, sign) in omega.letters() {
            let xi = self
                .qenv
                .letter_element(g)
                .expect("quotient-alphabet letter");
            let s = self.quotient.reps[xi as usize];
            out = out.mul(&Word::letter(GenId::base(s), sign));
        }
        out
    }

    /// Letterwise projection to the quotient envelope: `u_x ↦ u_{xN}`,
    /// with letters from `N` dropped.
    ///
    /// # Errors
    /// [`EnvelopeError::UnknownGenerator`] on letters outside the alphabet.
    pub fn pi_word(&self, w: &Word) -> Result<Word, EnvelopeError> {
        let mut letters = Vec::with_capacity(w.len());
        for &(g, sign) in w.letters() {
            let x = self
                .env
                .letter_element(g)
                .ok_or(EnvelopeError::UnknownGenerator(g))?;
            let xi = self.quotient.projection[x as usize];
            if xi != 0 {
                letters.push((GenId::base(xi), sign));
            }
        }
        Ok(Word::from_letters(letters))
    }

    /// True iff `w` lies in `U_{N,F}` (projects to the empty word).
    pub fn member_unf(&self, w: &Word) -> bool {
        match self.pi_word(w) {
            Ok(p) => p.is_empty(),
            Err(_) => false,
        }
    }

    /// True iff `w` lies in `J_{N,F}` (projects to the empty word and
    /// evaluates to the identity).
    pub fn member_jnf(&self, w: &Word) -> bool {
        self.member_unf(w) && self.env.eval(w) == Ok(0)
    }

    /// Exact expansion of a member of `J_{N,F}` over conjugated slot
    /// letters: returns `(v, slot, sign)` triples such that
    /// `w = Π λ(vᵢ) · E_{slotᵢ}^{signᵢ} · λ(vᵢ)⁻¹` holds exactly, where
    /// `E_s` is [`RelativeEnvelope::slot_word`] and `v` is a reduced word
    /// over quotient relation letters ([`GenId::basis`] indices).
    ///
    /// The scan re-expands the stage-one letters of `w` over the
    /// projection to the quotient relation kernel, using lifted quotient
    /// letters as the transversal: both-representative pairs move the
    /// transversal state `v` without emitting; every other pair emits its
    /// slot at the current state.
    ///
    /// # Errors
    /// [`EnvelopeError::NotMember`] if `w ∉ J_{N,F}`.
    pub fn stage_b_letters(&self, w: &Word) -> Result<Vec<(Word, u32, i8)>, EnvelopeError> {
        if !self.member_jnf(w) {
            return Err(EnvelopeError::NotMember);
        }
        let n = self.group().order() as u32;
        let stage_a = self.env.stage_a_letters(w)?;
        let mut out = Vec::with_capacity(stage_a.len());
        let mut v = Word::empty();
        for (g, a, sign) in stage_a {
            let slot = self.slot_of[(g * n + a) as usize];
            if slot == u32::MAX {
                // Both components are representatives: tree move only.
                let xi = self.quotient.projection[g as usize];
                let eta = self.quotient.projection[a as usize];
                let q = self.quotient.group.order() as u32;
                let f = GenId::basis((xi - 1) * (q - 1) + (eta - 1));
                v = v.mul(&Word::letter(f, sign));
                continue;
            }
            let ql = self.qletter_of_slot[slot as usize];
            if ql == u32::MAX {
                // Kernel letter: emit in place, no state change.
                out.push((v.clone(), slot, sign));
            } else if sign > 0 {
                out.push((v.clone(), slot, 1));
                v = v.mul(&Word::letter(GenId::basis(ql), 1));
            } else {
                v = v.mul(&Word::letter(GenId::basis(ql), -1));
                out.push((v.clone(), slot, -1));
            }
        }
        debug_assert!(v.is_empty());
        Ok(out)
    }

    /// Abelianized slot coordinates: the multiset of slot emissions of
    /// [`RelativeEnvelope::stage_b_letters`], conjugators dropped.
    ///
    /// # Errors
    /// [`EnvelopeError::NotMember`] if `w ∉ J_{N,F}`.
    pub fn psi0(&self, w: &Word) -> Result<SparseVec, EnvelopeError> {
        let slots = self.scan_slots(w)?;
        Ok(SparseVec::from_pairs(
            slots.into_iter().map(|(s, sign)| (s, BigInt::from(sign))),
        ))
    }

    /// Lean slot scan (no conjugator tracking): the emissions of
    /// [`RelativeEnvelope::stage_b_letters`] as `(slot, sign)` pairs.
    fn scan_slots(&self, w: &Word) -> Result<Vec<(u32, i8)>, EnvelopeError> {
        if !self.member_jnf(w) {
            return Err(EnvelopeError::NotMember);
        }
        let n = self.group().order() as u32;
        let mut out = Vec::with_capacity(w.len());
        let mut p = 0u32;
        for &(g, sign) in w.letters() {
            let a = self.env.letter_element(g).ok_or(EnvelopeError::NotMember)?;
            let state = if sign > 0 {
                let st = p;
                p = self.group().mul(p, a);
                st
            } else {
                p = self.group().mul(p, self.group().inv(a));
                p
            };
            if state == 0 {
                continue;
            }
            let slot = self.slot_of[(state * n + a) as usize];
            if slot != u32::MAX {
                out.push((slot, sign));
            }
        }
        Ok(out)
    }

    /// The `φ` column of a slot: the core coordinates of the slot letter.
    pub fn phi_column(&self, slot: usize) -> &SparseVec {
        &self.phi[slot]
    }

    /// Core coordinates `ψ(w) ∈ ℤ^B`: the abelianized expansion of a
    /// member of `J_{N,F}` over the core families, conjugation dropped.
    /// Additive over products of members; every core element has the unit
    /// vector on its own column.
    ///
    /// # Errors
    /// [`EnvelopeError::NotMember`] if `w ∉ J_{N,F}`.
    pub fn core_coordinates(&self, w: &Word) -> Result<SparseVec, EnvelopeError> {
        let slots = self.scan_slots(w)?;
        let mut pairs: Vec<(u32, BigInt)> = Vec::new();
        for (slot, sign) in slots {
            for (col, val) in self.phi[slot as usize].entries() {
                pairs.push((*col, if sign > 0 { val.clone() } else { -val }));
            }
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    fn e_b(&self, g: u32, a: u32) -> (u32, BigInt) {
        let n = self.group().order() as u32;
        let col = self.b_of_pair[(g * n + a) as usize];
        debug_assert_ne!(col, u32::MAX, "pair ({g},{a}) carries no core element");
        (col, BigInt::from(1))
    }

    /// Core coordinates of the kernel slot letter `Z(a, b)` with
    /// `b ∈ N\1` and `a` arbitrary; closed form used by `φ`.
    fn h_pairs(&self, a: u32, b: u32, sign: i64, out: &mut Vec<(u32, BigInt)>) {
        if a == 0 {
            return;
        }
        let g = self.group();
        if self.in_n[a as usize] {
            let (col, _) = self.e_b(a, b);
            out.push((col, BigInt::from(sign)));
            return;
        }
        let x = self.rep_of[a as usize];
        let c = g.mul(g.inv(x), a);
        if c == 0 {
            let (col, _) = self.e_b(x, b);
            out.push((col, BigInt::from(sign)));
            return;
        }
        let (col_xc, _) = self.e_b(x, c);
        out.push((col_xc, BigInt::from(-sign)));
        let (col_cb, _) = self.e_b(c, b);
        out.push((col_cb, BigInt::from(sign)));
        let cb = g.mul(c, b);
        if cb != 0 {
            let (col, _) = self.e_b(x, cb);
            out.push((col, BigInt::from(sign)));
        }
    }

    /// Shared tail of the non-kernel `φ` cases: coordinates of the slot
    /// `(x, cp·y)` for representatives `x, y` and `cp ∈ N`.
    fn phi4_pairs(&self, x: u32, cp: u32, y: u32, out: &mut Vec<(u32, BigInt)>) {
        if cp == 0 {
            return;
        }
        let g = self.group();
        let w = g.mul(g.mul(g.inv(y), cp), y);
        debug_assert!(self.in_n[w as usize] && w != 0);
        let (col, _) = self.e_b(y, w);
        out.push((col, BigInt::from(-1)));
        self.h_pairs(g.mul(x, y), w, 1, out);
    }

    fn compute_phi(&self, slot: usize) -> SparseVec {
        let (gg, aa) = self.slots[slot];
        let g = self.group();
        let g_in = self.in_n[gg as usize];
        let a_in = self.in_n[aa as usize];
        let mut pairs: Vec<(u32, BigInt)> = Vec::new();
        match (g_in, a_in) {
            (true, true) => {
                let (col, one) = self.e_b(gg, aa);
                pairs.push((col, one));
            }
            (true, false) => {
                // Slot is the `B3` element with `y = rep(a)`, `d = a·y⁻¹`.
                let (col, one) = self.e_b(gg, aa);
                pairs.push((col, one));
            }
            (false, true) => {
                self.h_pairs(gg, aa, 1, &mut pairs);
            }
            (false, false) => {
                let x = self.rep_of[gg as usize];
                let c = g.mul(g.inv(x), gg);
                let y = self.rep_of[aa as usize];
                let d = g.mul(aa, g.inv(y));
                if c != 0 {
                    let (col, _) = self.e_b(x, c);
                    pairs.push((col, BigInt::from(-1)));
                    let (col3, one) = self.e_b(c, g.mul(d, y));
                    pairs.push((col3, one));
                    self.phi4_pairs(x, g.mul(c, d), y, &mut pairs);
                } else {
                    debug_assert_ne!(d, 0, "both-representative pairs are not slots");
                    self.phi4_pairs(x, d, y, &mut pairs);
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    /// Exact expansion of a member of `U_{N,F}` over conjugated `ucore`
    /// letters: returns `(ω, ucore index, sign)` triples such that
    /// `w = Π σ(ωᵢ) · U(aᵢ)^{signᵢ} · σ(ωᵢ)⁻¹` holds exactly, with `ω` a
    /// reduced word over the quotient alphabet and `U(a) = u_a u_{ā}⁻¹`.
    ///
    /// # Errors
    /// [`EnvelopeError::NotMember`] if `w ∉ U_{N,F}`.
    pub fn theta_letters(&self, w: &Word) -> Result<Vec<(Word, u32, i8)>, EnvelopeError> {
        if !self.member_unf(w) {
            return Err(EnvelopeError::NotMember);
        }
        let mut out = Vec::with_capacity(w.len());
        let mut omega = Word::empty();
        for &(g, sign) in w.letters() {
            let a = self.env.letter_element(g).ok_or(EnvelopeError::NotMember)?;
            let xi = self.quotient.projection[a as usize];
            let is_rep = self.rep_of[a as usize] == a;
            if sign > 0 {
                if is_rep {
                    omega = omega.mul(&Word::letter(GenId::base(xi), 1));
                } else {
                    out.push((omega.clone(), self.ucore_of[a as usize], 1));
                    if xi != 0 {
                        omega = omega.mul(&Word::letter(GenId::base(xi), 1));
                    }
                }
            } else if is_rep {
                omega = omega.mul(&Word::letter(GenId::base(xi), -1));
            } else {
                if xi != 0 {
                    omega = omega.mul(&Word::letter(GenId::base(xi), -1));
                }
                out.push((omega.clone(), self.ucore_of[a as usize], -1));
            }
        }
        debug_assert!(omega.is_empty());
        Ok(out)
    }

    /// Abelianized `ucore` coordinates `θ(w) ∈ ℤ^ucore` of a member of
    /// `U_{N,F}`, conjugation dropped.  Invariant under conjugation by
    /// the whole envelope and additive over products of members.
    ///
    /// # Errors
    /// [`EnvelopeError::NotMember`] if `w ∉ U_{N,F}`.
    pub fn theta(&self, w: &Word) -> Result<SparseVec, EnvelopeError> {
        if !self.member_unf(w) {
            return Err(EnvelopeError::NotMember);
        }
        let mut pairs: Vec<(u32, BigInt)> = Vec::new();
        for &(g, sign) in w.letters() {
            let a = self.env.letter_element(g).ok_or(EnvelopeError::NotMember)?;
            if self.rep_of[a as usize] != a {
                pairs.push((self.ucore_of[a as usize], BigInt::from(sign)));
            }
        }
        Ok(SparseVec::from_pairs(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stallings::{nielsen_independent, SubgroupGraph, SubgroupIndex};
    use crate::testutil::{a4, cyclic, d4, s3};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn order_2_normal(group: &FiniteGroup) -> Subgroup {
        for x in 1..group.order() as u32 {
            if group.element_order(x) == 2 {
                let sub = group.normal_closure(&[x]);
                if sub.order() == 2 {
                    return sub;
                }
            }
        }
        panic!("no normal subgroup of order 2");
    }

    fn order_3_normal(group: &FiniteGroup) -> Subgroup {
        for x in 1..group.order() as u32 {
            if group.element_order(x) == 3 {
                let sub = group.normal_closure(&[x]);
                if sub.order() == 3 {
                    return sub;
                }
            }
        }
        panic!("no normal subgroup of order 3");
    }

    fn c2_in_c4() -> RelativeEnvelope {
        let g = cyclic(4);
        let n = order_2_normal(&g);
        RelativeEnvelope::new(&g, &n).unwrap()
    }

    fn c3_in_s3() -> RelativeEnvelope {
        let g = s3();
        let n = order_3_normal(&g);
        RelativeEnvelope::new(&g, &n).unwrap()
    }

    fn v4_in_a4() -> RelativeEnvelope {
        let g = a4();
        let mut n = g.trivial_subgroup();
        for x in 1..12u32 {
            if g.element_order(x) == 2 {
                n = g.normal_closure(&[x]);
                break;
            }
        }
        assert_eq!(n.order(), 4);
        RelativeEnvelope::new(&g, &n).unwrap()
    }

    fn full_pair(group: FiniteGroup) -> RelativeEnvelope {
        let n = group.full_subgroup();
        RelativeEnvelope::new(&group, &n).unwrap()
    }

    fn random_word(env: &Envelope, rng: &mut StdRng, max_len: usize) -> Word {
        let n = env.group().order() as u32;
        let len = rng.gen_range(0..=max_len);
        Word::from_letters((0..len).map(|_| {
            (
                GenId::base(rng.gen_range(1..n)),
                if rng.gen_bool(0.5) { 1i8 } else { -1 },
            )
        }))
    }

    /// A uniformly scrambled member of `J_F`: random word, fixed up to
    /// evaluate to the identity.
    fn random_jf_member(env: &Envelope, rng: &mut StdRng, max_len: usize) -> Word {
        let w = random_word(env, rng, max_len);
        let e = env.eval(&w).unwrap();
        w.mul(&env.gen_word(e).inv())
    }

    fn random_unf_member(renv: &RelativeEnvelope, rng: &mut StdRng, max_len: usize) -> Word {
        let w = random_word(renv.envelope(), rng, max_len);
        let p = renv.pi_word(&w).unwrap();
        let fixed = w.mul(&renv.sigma_word(&p).inv());
        debug_assert!(renv.member_unf(&fixed));
        fixed
    }

    fn random_jnf_member(renv: &RelativeEnvelope, rng: &mut StdRng, max_len: usize) -> Word {
        let v = random_unf_member(renv, rng, max_len);
        let m = renv.envelope().eval(&v).unwrap();
        let fixed = v.mul(&renv.envelope().gen_word(m).inv());
        debug_assert!(renv.member_jnf(&fixed));
        fixed
    }

    #[test]
    fn jf_basis_counts_and_membership() {
        for (group, expect) in [
            (cyclic(1), 0usize),
            (cyclic(2), 1),
            (cyclic(3), 4),
            (s3(), 25),
        ] {
            let env = Envelope::new(group);
            let basis = env.jf_basis();
            assert_eq!(basis.len(), expect);
            let distinct: std::collections::BTreeSet<Word> = basis.iter().cloned().collect();
            assert_eq!(distinct.len(), expect, "basis words must be distinct");
            for w in &basis {
                assert!(env.member_jf(w));
            }
        }
        let env = Envelope::new(cyclic(2));
        let expected = Word::gen(GenId::base(1)).pow(2);
        assert_eq!(env.jf_basis(), vec![expected]);
    }

    #[test]
    fn jf_basis_folds_to_the_full_cayley_automaton() {
        for group in [cyclic(3), cyclic(4), s3()] {
            let order = group.order();
            let env = Envelope::new(group);
            let basis = env.jf_basis();
            assert!(nielsen_independent(&basis));
            let graph = SubgroupGraph::build(&basis, env.alphabet());
            assert_eq!(graph.state_count(), order);
            assert_eq!(graph.index(), SubgroupIndex::Finite(order));
            assert_eq!(graph.rank(), basis.len());
        }
    }

    #[test]
    fn stage_a_expansion_reconstructs_the_word_exactly() {
        let mut rng = StdRng::seed_from_u64(0x57A6_EA01);
        for group in [s3(), d4(), cyclic(6)] {
            let env = Envelope::new(group);
            for _ in 0..200 {
                let w = random_jf_member(&env, &mut rng, 10);
                let letters = env.stage_a_letters(&w).unwrap();
                let mut rebuilt = Word::empty();
                for (g, a, sign) in letters {
                    let z = env.z_word(g, a);
                    rebuilt = rebuilt.mul(&if sign > 0 { z } else { z.inv() });
                }
                assert_eq!(rebuilt, w);
            }
        }
    }

    #[test]
    fn stage_a_rejects_non_members() {
        let env = Envelope::new(s3());
        let w = Word::gen(GenId::base(1));
        assert_eq!(env.stage_a_letters(&w), Err(EnvelopeError::NotMember));
        let alien = Word::gen(GenId::aux(0));
        assert_eq!(env.stage_a_letters(&alien), Err(EnvelopeError::NotMember));
    }

    #[test]
    fn core_counts_on_small_pairs() {
        // Order-two inside order-four cyclic: 1 + 1 + 2 cores, 2 ucore.
        let renv = c2_in_c4();
        assert_eq!(renv.cores().b1.len(), 1);
        assert_eq!(renv.cores().b2.len(), 1);
        assert_eq!(renv.cores().b3.len(), 2);
        assert_eq!(renv.ucore_count(), 2);
        assert_eq!(renv.slot_count(), 8);

        // Trivial normal subgroup: everything empty.
        let g = s3();
        let triv = RelativeEnvelope::new(&g, &g.trivial_subgroup()).unwrap();
        assert_eq!(triv.b_count(), 0);
        assert_eq!(triv.ucore_count(), 0);
        assert_eq!(triv.slot_count(), 0);

        // Full subgroup of the two-element group: one core.
        let renv = full_pair(cyclic(2));
        assert_eq!(renv.cores().b1.len(), 1);
        assert!(renv.cores().b2.is_empty());
        assert!(renv.cores().b3.is_empty());
        assert_eq!(renv.cores().b1[0].word, Word::gen(GenId::base(1)).pow(2));
        assert_eq!(renv.ucore_count(), 1);
    }

    #[test]
    fn ucore_count_matches_coset_formula() {
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4(), full_pair(d4())] {
            let n = renv.group().order();
            let k = renv.quotient_group().order();
            assert_eq!(renv.ucore_count(), (n - 1) - (k - 1));
        }
    }

    #[test]
    fn cores_are_members_with_unit_coordinates() {
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4(), full_pair(cyclic(4))] {
            for (i, e) in renv.cores().b_iter().enumerate() {
                assert!(renv.member_jnf(&e.word), "core {e:?} not a member");
                let coords = renv.core_coordinates(&e.word).unwrap();
                assert_eq!(
                    coords,
                    SparseVec::from_pairs([(i as u32, BigInt::from(1))]),
                    "core {e:?} must be the unit vector on its own column"
                );
            }
            for (i, e) in renv.cores().ucore.iter().enumerate() {
                assert!(renv.member_unf(&e.word));
                let coords = renv.theta(&e.word).unwrap();
                assert_eq!(coords, SparseVec::from_pairs([(i as u32, BigInt::from(1))]));
            }
        }
    }

    #[test]
    fn membership_examples() {
        let renv = c2_in_c4();
        assert!(renv.member_jnf(&Word::empty()));
        let b1 = &renv.cores().b1[0].word;
        assert!(renv.member_jnf(b1));
        // A generator whose element is outside the normal subgroup.
        let x = (1..4u32).find(|&x| !renv.in_normal(x)).unwrap();
        assert!(!renv.member_jnf(&renv.envelope().gen_word(x)));
        // Inside the subgroup but with nonzero evaluation.
        let c = (1..4u32).find(|&x| renv.in_normal(x)).unwrap();
        assert!(!renv.member_jnf(&renv.envelope().gen_word(c)));
        assert!(renv.member_unf(&renv.envelope().gen_word(c)));
    }

    #[test]
    fn stage_b_expansion_reconstructs_the_word_exactly() {
        let mut rng = StdRng::seed_from_u64(0x57A6_EB02);
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            for _ in 0..150 {
                let w = random_jnf_member(&renv, &mut rng, 10);
                let letters = renv.stage_b_letters(&w).unwrap();
                let mut rebuilt = Word::empty();
                for (v, slot, sign) in letters {
                    let lam = renv.lambda_word(&v);
                    let e = renv.slot_word(slot as usize);
                    let e = if sign > 0 { e } else { e.inv() };
                    rebuilt = rebuilt.mul(&lam).mul(&e).mul(&lam.inv());
                }
                assert_eq!(rebuilt, w);
            }
        }
    }

    #[test]
    fn theta_expansion_reconstructs_the_word_exactly() {
        let mut rng = StdRng::seed_from_u64(0x57A6_EC03);
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            for _ in 0..150 {
                let w = random_unf_member(&renv, &mut rng, 10);
                let letters = renv.theta_letters(&w).unwrap();
                let mut rebuilt = Word::empty();
                for (omega, idx, sign) in letters {
                    let sig = renv.sigma_word(&omega);
                    let u = renv.cores().ucore[idx as usize].word.clone();
                    let u = if sign > 0 { u } else { u.inv() };
                    rebuilt = rebuilt.mul(&sig).mul(&u).mul(&sig.inv());
                }
                assert_eq!(rebuilt, w);
            }
        }
    }

    #[test]
    fn slot_words_are_members_with_phi_coordinates() {
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            for s in 0..renv.slot_count() {
                let e = renv.slot_word(s);
                assert!(renv.member_jnf(&e), "slot word {s} not in the kernel");
                let coords = renv.core_coordinates(&e).unwrap();
                assert_eq!(&coords, renv.phi_column(s), "slot {s} disagrees with φ");
            }
        }
    }

    #[test]
    fn psi_is_additive_and_invariant_under_kernel_conjugation() {
        let mut rng = StdRng::seed_from_u64(0x57A6_ED04);
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            for _ in 0..60 {
                let w1 = random_jnf_member(&renv, &mut rng, 8);
                let w2 = random_jnf_member(&renv, &mut rng, 8);
                let sum = {
                    let mut s = renv.core_coordinates(&w1).unwrap();
                    s.add_scaled(&renv.core_coordinates(&w2).unwrap(), &BigInt::from(1));
                    s
                };
                assert_eq!(renv.core_coordinates(&w1.mul(&w2)).unwrap(), sum);

                // Conjugation by a member of the relation kernel.
                let j = random_jf_member(renv.envelope(), &mut rng, 8);
                let conj = w1.conj(&j);
                assert_eq!(
                    renv.core_coordinates(&conj).unwrap(),
                    renv.core_coordinates(&w1).unwrap(),
                    "kernel conjugation must be invisible"
                );
            }
        }
    }

    #[test]
    fn psi_of_representative_conjugated_cores_is_unchanged() {
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            let reps: Vec<u32> = (1..renv.group().order() as u32)
                .filter(|&z| renv.is_rep(z))
                .collect();
            for (i, e) in renv.cores().b_iter().enumerate() {
                for &z in &reps {
                    let w = e.word.conj(&renv.envelope().gen_word(z));
                    let coords = renv.core_coordinates(&w).unwrap();
                    assert_eq!(
                        coords,
                        SparseVec::from_pairs([(i as u32, BigInt::from(1))]),
                        "rep-conjugated core {e:?} by {z}"
                    );
                }
            }
        }
    }

    #[test]
    fn theta_is_invariant_under_arbitrary_conjugation_and_kills_commutators() {
        let mut rng = StdRng::seed_from_u64(0x57A6_EE05);
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            for _ in 0..80 {
                let w = random_unf_member(&renv, &mut rng, 8);
                let t = random_word(renv.envelope(), &mut rng, 6);
                assert_eq!(
                    renv.theta(&w.conj(&t)).unwrap(),
                    renv.theta(&w).unwrap(),
                    "θ must not see conjugation"
                );
                // Commutators of the subgroup with the full envelope die.
                let c = w.comm(&t).mul(&t.comm(&w));
                let _ = c;
                let comm = t.mul(&w).mul(&t.inv()).mul(&w.inv());
                assert!(renv.member_unf(&comm));
                assert!(renv.theta(&comm).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn theta_factors_through_core_coordinates() {
        let mut rng = StdRng::seed_from_u64(0x57A6_EF06);
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            // Rows of the factorization matrix: θ of each core word.
            let m_rows: Vec<SparseVec> = renv
                .cores()
                .b_iter()
                .map(|e| renv.theta(&e.word).unwrap())
                .collect();
            for _ in 0..60 {
                let w = random_jnf_member(&renv, &mut rng, 10);
                let psi = renv.core_coordinates(&w).unwrap();
                let mut via_m = SparseVec::zero();
                for (col, val) in psi.entries() {
                    via_m.add_scaled(&m_rows[*col as usize], val);
                }
                assert_eq!(renv.theta(&w).unwrap(), via_m, "θ must factor as ψ·M");
            }
        }
    }

    /// The three word identities behind the `φ` rewriting, checked as
    /// exact equations in the free group over every valid index tuple.
    #[test]
    fn phi_backing_word_identities_hold_exactly() {
        for renv in [c2_in_c4(), c3_in_s3()] {
            let g = renv.group().clone();
            let env = renv.envelope();
            let n_members: Vec<u32> = renv
                .normal()
                .members()
                .iter()
                .copied()
                .filter(|&c| c != 0)
                .collect();
            let reps: Vec<u32> = (1..g.order() as u32).filter(|&z| renv.is_rep(z)).collect();

            // Identity 1: Z(xc', d) = B2(x,c')⁻¹ · (u_x B1(c',d) u_x⁻¹) · B2(x,c'd).
            for &x in &reps {
                for &cp in &n_members {
                    for &d in &n_members {
                        let lhs = env.z_word(g.mul(x, cp), d);
                        let rhs = env
                            .z_word(x, cp)
                            .inv()
                            .mul(&env.z_word(cp, d).conj(&env.gen_word(x)))
                            .mul(&env.z_word(x, g.mul(cp, d)));
                        assert_eq!(lhs, rhs, "identity 1 at x={x} c'={cp} d={d}");
                    }
                }
            }

            // Identity 2: u_x B3(c,d,y) u_x⁻¹ = B2(x,c) · Z(xc, dy) · Z(x, cdy)⁻¹.
            for &x in &reps {
                for &c in &n_members {
                    for d in renv.normal().members().iter().copied() {
                        for &y in &reps {
                            let dy = g.mul(d, y);
                            let lhs = env.z_word(c, dy).conj(&env.gen_word(x));
                            let rhs = env
                                .z_word(x, c)
                                .mul(&env.z_word(g.mul(x, c), dy))
                                .mul(&env.z_word(x, g.mul(c, dy)).inv());
                            assert_eq!(lhs, rhs, "identity 2 at x={x} c={c} d={d} y={y}");
                        }
                    }
                }
            }

            // Identity 3: u_x B2(y,y') u_x⁻¹
            //           = λ(f)·Z(xy,y')·λ(f)⁻¹ · (Z(x,cy)·λ(f)⁻¹)⁻¹
            //   with c = y y' y⁻¹ and f the quotient letter of (xN, yN).
            for &x in &reps {
                for &y in &reps {
                    for &yp in &n_members {
                        let lam = env.z_word(x, y);
                        let c = g.mul(g.mul(y, yp), g.inv(y));
                        let cy = g.mul(c, y);
                        let lhs = env.z_word(y, yp).conj(&env.gen_word(x));
                        let e1 = env.z_word(g.mul(x, y), yp);
                        let e2 = env.z_word(x, cy).mul(&lam.inv());
                        let rhs = lam.mul(&e1).mul(&lam.inv()).mul(&e2.inv());
                        assert_eq!(lhs, rhs, "identity 3 at x={x} y={y} y'={yp}");
                    }
                }
            }
        }
    }

    /// Known multisets of conjugated cores must be recovered exactly.
    /// Conjugators are drawn from the classes the engine drops: members
    /// of the relation kernel (including lifted quotient relation words),
    /// with optionally one representative letter applied innermost.
    #[test]
    fn core_coordinate_round_trip_with_known_multisets() {
        let mut rng = StdRng::seed_from_u64(0x57A6_F007);
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            let b_count = renv.b_count();
            let reps: Vec<u32> = (1..renv.group().order() as u32)
                .filter(|&z| renv.is_rep(z))
                .collect();
            for _ in 0..120 {
                let mut expected = vec![0i64; b_count];
                let mut w = Word::empty();
                for _ in 0..rng.gen_range(1..=5) {
                    let i = rng.gen_range(0..b_count);
                    let sign: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
                    expected[i] += sign;
                    let core = renv.cores().b_element(i).word.clone();
                    // Innermost: optionally a single representative letter.
                    let mut t = Word::empty();
                    if !reps.is_empty() && rng.gen_bool(0.5) {
                        let z = reps[rng.gen_range(0..reps.len())];
                        t = renv.envelope().gen_word(z);
                    }
                    // Outer: a random relation-kernel member.
                    let j = random_jf_member(renv.envelope(), &mut rng, 6);
                    let conj = j.mul(&t);
                    let factor = core.conj(&conj).pow(sign);
                    w = w.mul(&factor);
                }
                let coords = renv.core_coordinates(&w).unwrap();
                let expected_vec = SparseVec::from_pairs(
                    expected
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| (i as u32, BigInt::from(v))),
                );
                assert_eq!(coords, expected_vec);
            }
        }
    }

    #[test]
    fn b2_alternative_words_differ_from_b2_by_a_b3_unit() {
        for renv in [c2_in_c4(), c3_in_s3(), v4_in_a4()] {
            let alts = renv.b2_alternative();
            assert_eq!(alts.len(), renv.cores().b2.len());
            for (x, d, word) in alts {
                assert!(renv.member_jnf(&word));
                let coords = renv.core_coordinates(&word).unwrap();
                // ψ(B2'(x,d)) = e_{B2(x,d)} − e_{B3(xdx⁻¹, 1, x)}.
                let g = renv.group();
                let xdx = g.mul(g.mul(x, d), g.inv(x));
                let n = g.order() as u32;
                let b2_col = renv.b_of_pair[(x * n + d) as usize];
                let b3_col = renv.b_of_pair[(xdx * n + x) as usize];
                let expected = SparseVec::from_pairs([
                    (b2_col, BigInt::from(1)),
                    (b3_col, BigInt::from(-1)),
                ]);
                assert_eq!(coords, expected, "alternative word at x={x} d={d}");
            }
        }
    }

    #[test]
    fn relabeling_the_group_permutes_coordinates_consistently() {
        // A relabeling that keeps each coset's minimal element fixed (so
        // the chosen section is preserved) must permute core columns; the
        // coordinates of corresponding words must then match exactly.
        let g = s3();
        let n = order_3_normal(&g);
        let renv = RelativeEnvelope::new(&g, &n).unwrap();
        // Reverse the non-representative elements inside every coset.
        let order = g.order() as u32;
        let mut perm: Vec<u32> = (0..order).collect();
        let reps: Vec<u32> = (0..order).filter(|&x| renv.is_rep(x)).collect();
        for &r in &reps {
            let tail: Vec<u32> = (0..order)
                .filter(|&x| renv.section_rep(x) == r && x != r)
                .collect();
            for (i, &x) in tail.iter().enumerate() {
                perm[x as usize] = tail[tail.len() - 1 - i];
            }
        }
        assert_ne!(perm, (0..order).collect::<Vec<u32>>());
        let relab = g.relabeled(&perm).unwrap();
        let n2 = n.relabeled(&perm);
        let renv2 = RelativeEnvelope::new(&relab, &n2).unwrap();
        assert_eq!(renv.b_count(), renv2.b_count());

        let mut rng = StdRng::seed_from_u64(0x57A6_F108);
        let map_word = |w: &Word| -> Word {
            Word::from_letters(w.letters().iter().map(|&(gen, sign)| {
                (GenId::base(perm[gen.index as usize]), sign)
            }))
        };
        for _ in 0..60 {
            let w = random_jnf_member(&renv, &mut rng, 10);
            let coords = renv.core_coordinates(&w).unwrap();
            let coords2 = renv2.core_coordinates(&map_word(&w)).unwrap();
            // Compare through the column correspondence induced by the
            // relabeling of core indices.
            let mut translated: Vec<(u32, BigInt)> = Vec::new();
            for (col, val) in coords.entries() {
                let e = renv.cores().b_element(*col as usize);
                let mapped: Vec<u32> = e.indices.iter().map(|&i| perm[i as usize]).collect();
                let pos = renv2
                    .cores()
                    .b_iter()
                    .position(|e2| e2.kind == e.kind && e2.indices == mapped)
                    .expect("mapped core exists");
                translated.push((pos as u32, val.clone()));
            }
            assert_eq!(SparseVec::from_pairs(translated), coords2);
        }
    }
}

//! Finitely generated subgroups of free groups as folded basepointed
//! automata: membership, free bases, index, and Schreier rewriting.
//!
//! A [`SubgroupGraph`] is built from a list of generating words by wedging
//! one loop per word at a basepoint and folding (identifying states that
//! can be reached from a common state by the same letter) until the
//! transition relation is deterministic.  The reduced words labelling
//! basepoint loops are then exactly the elements of the generated
//! subgroup, which turns word-level questions into graph walks:
//!
//! * membership is a single trace through the automaton;
//! * a breadth-first spanning tree yields a free basis, one element per
//!   non-tree edge (so the rank is `#edges - #states + 1`);
//! * the subgroup has finite index precisely when the automaton is
//!   complete, and the index is then the number of states;
//! * rewriting a member over the basis ([`SubgroupGraph::schreier_express`])
//!   is the same trace, emitting one basis letter per non-tree edge.
//!
//! Graphs are immutable after construction; the spanning tree, the basis
//! words, and the edge-to-basis assignment are all precomputed so that
//! queries need no interior mutability and are safe to share across
//! threads.  State numbering is canonical (breadth-first discovery order
//! with edges explored in label order), so two inputs generating the same
//! subgroup produce structurally identical graphs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::freeword::{GenId, Word};

/// Errors from subgroup-graph queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StallingsError {
    /// The word does not lie in the subgroup carried by the graph.
    #[error("word is not a member of the subgroup")]
    NotMember,
}

/// Index of the subgroup in the ambient free group on the graph's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupIndex {
    /// Finite index; the graph is a complete automaton on this many states.
    Finite(usize),
    /// Infinite index (some state is missing an outgoing edge).
    Infinite,
}

impl std::fmt::Display for SubgroupIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubgroupIndex::Finite(k) => write!(f, "{k}"),
            SubgroupIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// A folded, core, basepointed automaton recognising a subgroup of a free
/// group.  The basepoint is state `0`.
#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    alphabet: Vec<GenId>,
    origin: Vec<Word>,
    /// `pos[s][g] = t` means there is an edge `s --g--> t`.
    pos: Vec<BTreeMap<GenId, u32>>,
    /// `neg[s][g] = t` means there is an edge `t --g--> s` (reading `g⁻¹`
    /// from `s` lands in `t`).
    neg: Vec<BTreeMap<GenId, u32>>,
    /// Word labelling the tree path from the basepoint to each state.
    path_word: Vec<Word>,
    /// Positive-edge key -> basis element number, for non-tree edges.
    edge_basis: BTreeMap<(u32, GenId), u32>,
    /// Free basis of the subgroup, one word per non-tree edge.
    basis: Vec<Word>,
}

/// Union-find with path halving.
fn uf_find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let grand = parent[parent[x as usize] as usize];
        parent[x as usize] = grand;
        x = grand;
    }
    x
}

impl SubgroupGraph {
    /// Folds the wedge of loops spelt by `words` into a deterministic core
    /// automaton.  Words must be freely reduced (which [`Word`] guarantees)
    /// and use only letters from `alphabet`.
    pub fn build(words: &[Word], alphabet: &[GenId]) -> SubgroupGraph {
        let alpha: BTreeSet<GenId> = alphabet.iter().copied().collect();
        for w in words {
            for &(g, _) in w.letters() {
                assert!(alpha.contains(&g), "letter {g} not in the alphabet");
            }
        }

        // Wedge of loops: a fresh chain of states per word, closed at the
        // basepoint.  Edges are stored on the union-find roots, keyed by
        // (generator, direction); direction `true` is the inverse reading.
        let mut parent: Vec<u32> = vec![0];
        let mut out: Vec<BTreeMap<(GenId, bool), u32>> = vec![BTreeMap::new()];
        let mut pending: VecDeque<(u32, u32)> = VecDeque::new();

        let attach = |parent: &mut Vec<u32>,
                          out: &mut Vec<BTreeMap<(GenId, bool), u32>>,
                          pending: &mut VecDeque<(u32, u32)>,
                          from: u32,
                          key: (GenId, bool),
                          to: u32| {
            let r = uf_find(parent, from);
            match out[r as usize].entry(key) {
                std::collections::btree_map::Entry::Occupied(e) => {
                    pending.push_back((*e.get(), to));
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(to);
                }
            }
        };

        for w in words {
            let mut cur = 0u32;
            let n = w.letters().len();
            for (i, &(g, sign)) in w.letters().iter().enumerate() {
                let next = if i + 1 == n {
                    0
                } else {
                    parent.push(parent.len() as u32);
                    out.push(BTreeMap::new());
                    (parent.len() - 1) as u32
                };
                // An edge u --g--> v is recorded from both endpoints.
                let (u, v) = if sign > 0 { (cur, next) } else { (next, cur) };
                attach(&mut parent, &mut out, &mut pending, u, (g, false), v);
                attach(&mut parent, &mut out, &mut pending, v, (g, true), u);
                cur = next;
            }
        }

        // Fold: merge states until no label leaves a state twice.
        while let Some((a, b)) = pending.pop_front() {
            let mut ra = uf_find(&mut parent, a);
            let mut rb = uf_find(&mut parent, b);
            if ra == rb {
                continue;
            }
            // Move the smaller edge map into the larger one.
            if out[ra as usize].len() < out[rb as usize].len() {
                std::mem::swap(&mut ra, &mut rb);
            }
            parent[rb as usize] = ra;
            let moved = std::mem::take(&mut out[rb as usize]);
            for (key, tgt) in moved {
                match out[ra as usize].entry(key) {
                    std::collections::btree_map::Entry::Occupied(e) => {
                        pending.push_back((*e.get(), tgt));
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(tgt);
                    }
                }
            }
        }

        // Resolve stale targets so that adjacency references roots only.
        let n_raw = parent.len();
        let mut alive: Vec<bool> = vec![false; n_raw];
        for s in 0..n_raw as u32 {
            if uf_find(&mut parent, s) == s {
                alive[s as usize] = true;
            }
        }
        let mut adj: Vec<BTreeMap<(GenId, bool), u32>> = vec![BTreeMap::new(); n_raw];
        for s in 0..n_raw {
            if !alive[s] {
                continue;
            }
            let entries = std::mem::take(&mut out[s]);
            for (key, tgt) in entries {
                let t = uf_find(&mut parent, tgt);
                adj[s].insert(key, t);
            }
        }
        let base = uf_find(&mut parent, 0);

        // Trim hair: a non-basepoint state with a single incident edge end
        // cannot lie on any reduced path, so it never contributes a loop.
        let mut queue: VecDeque<u32> = (0..n_raw as u32)
            .filter(|&s| alive[s as usize] && s != base && adj[s as usize].len() == 1)
            .collect();
        while let Some(s) = queue.pop_front() {
            if !alive[s as usize] || s == base || adj[s as usize].len() != 1 {
                continue;
            }
            let (&(g, dir), &t) = adj[s as usize].iter().next().unwrap();
            alive[s as usize] = false;
            adj[s as usize].clear();
            adj[t as usize].remove(&(g, !dir));
            if t != base && adj[t as usize].len() == 1 {
                queue.push_back(t);
            }
        }

        // Canonical renumbering: breadth-first from the basepoint, edges in
        // label order (positive direction before inverse for each letter).
        // Two graphs of the same subgroup therefore compare equal.
        let mut number: Vec<Option<u32>> = vec![None; n_raw];
        let mut order: Vec<u32> = Vec::new();
        number[base as usize] = Some(0);
        order.push(base);
        let mut head = 0usize;
        // Spanning tree and path words, computed along the same traversal.
        let mut tree: BTreeSet<(u32, GenId)> = BTreeSet::new();
        let mut path_raw: Vec<(u32, Word)> = vec![(base, Word::empty())];
        while head < order.len() {
            let s = order[head];
            head += 1;
            let s_word = path_raw[head - 1].1.clone();
            for (&(g, dir), &t) in adj[s as usize].iter() {
                if number[t as usize].is_some() {
                    continue;
                }
                number[t as usize] = Some(order.len() as u32);
                order.push(t);
                let letter = Word::letter(g, if dir { -1 } else { 1 });
                path_raw.push((t, s_word.mul(&letter)));
                // Discovery via (g, false) is the positive edge s --g--> t;
                // via (g, true) it is the positive edge t --g--> s.
                if dir {
                    tree.insert((t, g));
                } else {
                    tree.insert((s, g));
                }
            }
        }

        let n_states = order.len();
        let renum = |raw: u32| number[raw as usize].expect("reachable state");
        let mut pos: Vec<BTreeMap<GenId, u32>> = vec![BTreeMap::new(); n_states];
        let mut neg: Vec<BTreeMap<GenId, u32>> = vec![BTreeMap::new(); n_states];
        for &raw in &order {
            let s = renum(raw);
            for (&(g, dir), &t) in adj[raw as usize].iter() {
                if dir {
                    neg[s as usize].insert(g, renum(t));
                } else {
                    pos[s as usize].insert(g, renum(t));
                }
            }
        }
        let tree: BTreeSet<(u32, GenId)> = tree.iter().map(|&(s, g)| (renum(s), g)).collect();
        let mut path_word: Vec<Word> = vec![Word::empty(); n_states];
        for (raw, w) in path_raw {
            path_word[renum(raw) as usize] = w;
        }

        // One basis element per non-tree positive edge, in (state, letter)
        // order: path to the source, the edge letter, path back from the
        // target.
        let mut basis: Vec<Word> = Vec::new();
        let mut edge_basis: BTreeMap<(u32, GenId), u32> = BTreeMap::new();
        for s in 0..n_states as u32 {
            for (&g, &t) in pos[s as usize].iter() {
                if tree.contains(&(s, g)) {
                    continue;
                }
                let w = path_word[s as usize]
                    .mul(&Word::gen(g))
                    .mul(&path_word[t as usize].inv());
                edge_basis.insert((s, g), basis.len() as u32);
                basis.push(w);
            }
        }

        SubgroupGraph {
            alphabet: alphabet.to_vec(),
            origin: words.to_vec(),
            pos,
            neg,
            path_word,
            edge_basis,
            basis,
        }
    }

    /// Number of states; the basepoint is state `0`.
    pub fn state_count(&self) -> usize {
        self.pos.len()
    }

    /// Number of (positive) edges.
    pub fn edge_count(&self) -> usize {
        self.pos.iter().map(|m| m.len()).sum()
    }

    /// Rank of the subgroup: `#edges - #states + 1`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.state_count()
    }

    /// The ambient alphabet the graph was built over.
    pub fn alphabet(&self) -> &[GenId] {
        &self.alphabet
    }

    /// The generating words the graph was built from.
    pub fn origin(&self) -> &[Word] {
        &self.origin
    }

    /// Follows one letter from `state`; `None` if the edge is absent.
    pub fn step(&self, state: u32, g: GenId, sign: i8) -> Option<u32> {
        if sign > 0 {
            self.pos[state as usize].get(&g).copied()
        } else {
            self.neg[state as usize].get(&g).copied()
        }
    }

    /// Traces `w` from the basepoint; `Some(final state)` if every letter
    /// has an edge.
    fn trace(&self, w: &Word) -> Option<u32> {
        let mut cur = 0u32;
        for &(g, sign) in w.letters() {
            cur = self.step(cur, g, sign)?;
        }
        Some(cur)
    }

    /// True iff `w` lies in the subgroup (labels a basepoint loop).
    pub fn membership(&self, w: &Word) -> bool {
        self.trace(w) == Some(0)
    }

    /// Free basis of the subgroup, one word per non-tree edge, in a fixed
    /// deterministic order.
    pub fn free_basis(&self) -> &[Word] {
        &self.basis
    }

    /// True iff every state carries an edge in both directions for every
    /// alphabet letter.
    pub fn is_complete(&self) -> bool {
        (0..self.state_count() as u32).all(|s| {
            self.alphabet
                .iter()
                .all(|&g| self.step(s, g, 1).is_some() && self.step(s, g, -1).is_some())
        })
    }

    /// Index in the free group on the alphabet: the state count when the
    /// automaton is complete, infinite otherwise.
    pub fn index(&self) -> SubgroupIndex {
        if self.is_complete() {
            SubgroupIndex::Finite(self.state_count())
        } else {
            SubgroupIndex::Infinite
        }
    }

    /// Largest distance (in tree edges) from the basepoint to any state.
    pub fn diameter_bound(&self) -> usize {
        self.path_word.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Rewrites a member over the free basis.  The output uses the letters
    /// [`GenId::aux`]`(i)` for the `i`-th basis element, and substituting
    /// the basis words back (see [`SubgroupGraph::basis_assignment`])
    /// reproduces `w` exactly.
    pub fn schreier_express(&self, w: &Word) -> Result<Word, StallingsError> {
        let mut cur = 0u32;
        let mut letters: Vec<(GenId, i8)> = Vec::new();
        for &(g, sign) in w.letters() {
            let next = self.step(cur, g, sign).ok_or(StallingsError::NotMember)?;
            // The positive edge just crossed is keyed by its source state.
            let key = if sign > 0 { (cur, g) } else { (next, g) };
            if let Some(&i) = self.edge_basis.get(&key) {
                letters.push((GenId::aux(i), sign));
            }
            cur = next;
        }
        if cur != 0 {
            return Err(StallingsError::NotMember);
        }
        Ok(Word::from_letters(letters))
    }

    /// The substitution sending each `aux(i)` letter produced by
    /// [`SubgroupGraph::schreier_express`] to the `i`-th basis word.
    pub fn basis_assignment(&self) -> BTreeMap<GenId, Word> {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, w)| (GenId::aux(i as u32), w.clone()))
            .collect()
    }
}

/// True iff `words` form a free basis of the subgroup they generate,
/// detected by comparing the folded graph's rank with the word count.
/// The empty word can never be part of a basis.
pub fn nielsen_independent(words: &[Word]) -> bool {
    if words.iter().any(Word::is_empty) {
        return false;
    }
    let alphabet: BTreeSet<GenId> = words
        .iter()
        .flat_map(|w| w.letters().iter().map(|&(g, _)| g))
        .collect();
    let alphabet: Vec<GenId> = alphabet.into_iter().collect();
    let graph = SubgroupGraph::build(words, &alphabet);
    graph.rank() == words.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn a() -> GenId {
        GenId::base(0)
    }

    fn b() -> GenId {
        GenId::base(1)
    }

    /// Tiny test-only notation: `a`/`b` are the two base generators, a
    /// trailing `'` inverts, tokens are whitespace-separated.
    fn word(text: &str) -> Word {
        Word::from_letters(text.split_whitespace().map(|tok| {
            let (body, sign) = match tok.strip_suffix('\'') {
                Some(body) => (body, -1),
                None => (tok, 1),
            };
            let g = match body {
                "a" => a(),
                "b" => b(),
                other => panic!("unknown test generator `{other}`"),
            };
            (g, sign)
        }))
    }

    /// ⟨a², b, aba⁻¹⟩ is the kernel of F₂ → Z/2 counting `a`-exponent.
    fn even_subgroup() -> SubgroupGraph {
        let words = vec![
            Word::gen(a()).pow(2),
            Word::gen(b()),
            Word::gen(a()).mul(&Word::gen(b())).mul(&Word::letter(a(), -1)),
        ];
        SubgroupGraph::build(&words, &[a(), b()])
    }

    #[test]
    fn empty_generating_set_gives_single_state_and_infinite_index() {
        let g = SubgroupGraph::build(&[], &[a()]);
        assert_eq!(g.state_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert!(g.free_basis().is_empty());
        assert_eq!(g.index(), SubgroupIndex::Infinite);
        assert!(g.membership(&Word::empty()));
        assert!(!g.membership(&Word::gen(a())));
    }

    #[test]
    fn even_exponent_subgroup_has_two_states_index_two_rank_three() {
        let g = even_subgroup();
        assert_eq!(g.state_count(), 2);
        assert_eq!(g.index(), SubgroupIndex::Finite(2));
        assert_eq!(g.free_basis().len(), 3);
        assert_eq!(g.rank(), 3);
        assert!(g.membership(&Word::gen(a()).pow(2)));
        assert!(g.membership(&Word::gen(b())));
        assert!(g.membership(&Word::gen(b()).conj(&Word::gen(a()))));
        assert!(!g.membership(&Word::gen(a())));
        assert!(!g.membership(&Word::gen(a()).mul(&Word::gen(b()))));
    }

    #[test]
    fn single_commutator_generates_rank_one_subgroup_of_infinite_index() {
        let w = Word::gen(a()).comm(&Word::gen(b()));
        let g = SubgroupGraph::build(&[w.clone()], &[a(), b()]);
        assert_eq!(g.rank(), 1);
        assert_eq!(g.index(), SubgroupIndex::Infinite);
        // Some state is missing an outgoing edge.
        let missing = (0..g.state_count() as u32).any(|s| {
            g.alphabet()
                .iter()
                .any(|&x| g.step(s, x, 1).is_none() || g.step(s, x, -1).is_none())
        });
        assert!(missing);
        assert!(g.membership(&w));
        assert!(g.membership(&w.pow(-3)));
        assert!(!g.membership(&Word::gen(a())));
    }

    #[test]
    fn ambient_basis_is_independent_and_proper_powers_are_not() {
        assert!(nielsen_independent(&[Word::gen(a()), Word::gen(b())]));
        assert!(!nielsen_independent(&[
            Word::gen(a()).pow(2),
            Word::gen(a()).pow(3),
        ]));
        assert!(!nielsen_independent(&[Word::empty()]));
        assert!(!nielsen_independent(&[Word::gen(b()), Word::gen(b())]));
    }

    #[test]
    fn schreier_express_on_fixed_examples() {
        let powers = SubgroupGraph::build(&[Word::gen(a()).pow(2)], &[a()]);
        assert_eq!(
            powers.schreier_express(&Word::empty()).unwrap(),
            Word::empty()
        );
        let expressed = powers.schreier_express(&Word::gen(a()).pow(4)).unwrap();
        assert_eq!(expressed, Word::letter(GenId::aux(0), 1).pow(2));
        assert_eq!(
            powers.schreier_express(&Word::gen(a())),
            Err(StallingsError::NotMember)
        );

        let g = even_subgroup();
        let w = Word::gen(a())
            .pow(2)
            .mul(&Word::gen(b()))
            .mul(&Word::gen(a()).pow(2));
        let over_basis = g.schreier_express(&w).unwrap();
        assert_eq!(over_basis.len(), 3);
        let back = over_basis.apply_hom(&g.basis_assignment()).unwrap();
        assert_eq!(back, w);
    }

    /// The four relation-shaped words `u_g u_h (u_{gh})⁻¹` for the cyclic
    /// group of order three: a free basis of the full evaluation kernel,
    /// whose graph is the complete automaton on three states.
    #[test]
    fn cyclic_three_relation_words_fold_to_complete_three_state_automaton() {
        // Generators u_1 = a (element g), u_2 = b (element g²).
        let words = vec![
            // g·g = g²  →  a a b⁻¹
            word("a a b'"),
            // g·g² = 1  →  a b
            word("a b"),
            // g²·g = 1  →  b a
            word("b a"),
            // g²·g² = g  →  b b a⁻¹
            word("b b a'"),
        ];
        assert!(nielsen_independent(&words));
        let g = SubgroupGraph::build(&words, &[a(), b()]);
        assert_eq!(g.state_count(), 3);
        assert!(g.is_complete());
        assert_eq!(g.index(), SubgroupIndex::Finite(3));
        // Nielsen–Schreier: rank = 1 + index·(alphabet rank − 1).
        assert_eq!(g.rank(), 4);
        for w in &words {
            assert!(g.membership(w));
        }
        // A word evaluating to g in the cyclic group is not in the kernel.
        assert!(!g.membership(&Word::gen(a())));
    }

    #[test]
    fn free_basis_is_independent_and_rebuilds_the_identical_graph() {
        let graphs = vec![
            even_subgroup(),
            SubgroupGraph::build(
                &[word("a b a b'"), word("b b"), word("a a a")],
                &[a(), b()],
            ),
        ];
        for g in graphs {
            let basis = g.free_basis().to_vec();
            for w in &basis {
                assert!(g.membership(w));
            }
            assert!(nielsen_independent(&basis));
            let rebuilt = SubgroupGraph::build(&basis, g.alphabet());
            // Canonical numbering makes equality structural.
            assert_eq!(rebuilt.pos, g.pos);
            assert_eq!(rebuilt.neg, g.neg);
            assert_eq!(rebuilt.index(), g.index());
            assert_eq!(rebuilt.free_basis(), g.free_basis());
        }
    }

    #[test]
    fn schreier_round_trip_holds_for_a_thousand_random_members() {
        let mut rng = StdRng::seed_from_u64(0x5741_1135);
        let g3 = SubgroupGraph::build(
            &[word("a a b'"), word("a b"), word("b a"), word("b b a'")],
            &[a(), b()],
        );
        let graphs = vec![even_subgroup(), g3];
        let mut checked = 0usize;
        while checked < 1000 {
            let g = &graphs[rng.gen_range(0..graphs.len())];
            let basis = g.free_basis();
            let mut member = Word::empty();
            for _ in 0..rng.gen_range(1..=6) {
                let i = rng.gen_range(0..basis.len());
                let e = if rng.gen_bool(0.5) { 1 } else { -1 };
                member = member.mul(&basis[i].pow(e));
            }
            assert!(g.membership(&member));
            let over = g.schreier_express(&member).unwrap();
            let back = over.apply_hom(&g.basis_assignment()).unwrap();
            assert_eq!(back, member);
            checked += 1;
        }
    }

    /// Membership agrees with closed brute-force enumeration of the
    /// subgroup ball: starting from the basis, multiply by basis letters
    /// and keep reduced words up to a length bound.  When the enumeration
    /// closes (no new words at the boundary escape the bound), membership
    /// of any probe within the probe bound is decided exactly.
    #[test]
    fn membership_agrees_with_bounded_enumeration_on_random_sets() {
        let mut rng = StdRng::seed_from_u64(0xF01D_CAFE);
        let gens = [a(), b()];
        let mut probes_done = 0usize;
        for _round in 0..24 {
            let n_words = rng.gen_range(1..=3);
            let words: Vec<Word> = (0..n_words)
                .map(|_| {
                    let len = rng.gen_range(1..=5);
                    Word::from_letters((0..len).map(|_| {
                        (
                            gens[rng.gen_range(0..2)],
                            if rng.gen_bool(0.5) { 1 } else { -1 },
                        )
                    }))
                })
                .collect();
            let words: Vec<Word> = words.into_iter().filter(|w| !w.is_empty()).collect();
            if words.is_empty() {
                continue;
            }
            let g = SubgroupGraph::build(&words, &gens);
            let probe_max = 5usize;
            // Schreier prefixes of a member of length L stay within
            // L + diameter, so this bound makes the ball self-contained.
            let bound = probe_max + 2 * g.diameter_bound() + 2;
            let mut ball: BTreeSet<Word> = BTreeSet::new();
            let mut queue: VecDeque<Word> = VecDeque::new();
            ball.insert(Word::empty());
            queue.push_back(Word::empty());
            let mut closed = true;
            'bfs: while let Some(w) = queue.pop_front() {
                for gen in g.free_basis() {
                    for sign in [1i64, -1] {
                        let next = w.mul(&gen.pow(sign));
                        if next.len() > bound || ball.contains(&next) {
                            continue;
                        }
                        if ball.len() >= 60_000 {
                            closed = false;
                            break 'bfs;
                        }
                        ball.insert(next.clone());
                        queue.push_back(next);
                    }
                }
            }
            // Origin words must appear in the ball (they are members and
            // short enough).
            if closed {
                for w in &words {
                    assert!(ball.contains(w), "origin word missing from ball");
                }
            }
            // Probe random short words plus everything in the ball.
            for w in ball.iter().filter(|w| w.len() <= probe_max) {
                assert!(g.membership(w), "ball member rejected: {w}");
                probes_done += 1;
            }
            for _ in 0..60 {
                let len = rng.gen_range(0..=probe_max);
                let w = Word::from_letters((0..len).map(|_| {
                    (
                        gens[rng.gen_range(0..2)],
                        if rng.gen_bool(0.5) { 1 } else { -1 },
                    )
                }));
                if closed {
                    assert_eq!(
                        g.membership(&w),
                        ball.contains(&w),
                        "membership mismatch on {w}"
                    );
                } else if ball.contains(&w) {
                    assert!(g.membership(&w));
                }
                probes_done += 1;
            }
        }
        assert!(probes_done >= 1000, "only {probes_done} probes ran");
    }

    #[test]
    fn finite_index_graphs_are_complete_automata() {
        // Kernel of F₂ → Z/3 by total exponent: generated by a³, b a⁻¹,
        // and conjugates; index 3.
        let words = vec![word("a a a"), word("b a'"), word("a b a a")];
        let g = SubgroupGraph::build(&words, &[a(), b()]);
        if let SubgroupIndex::Finite(k) = g.index() {
            assert_eq!(k, g.state_count());
            assert!(g.is_complete());
        } else {
            panic!("expected finite index");
        }
    }
}

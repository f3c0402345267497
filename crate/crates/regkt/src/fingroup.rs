//! Concrete finite groups with a fixed total element order.
//!
//! A [`FiniteGroup`] stores a full multiplication table over element indices
//! `0..n`, with index `0` always the identity. Groups are built by closing a
//! generating set (permutations, or any ordered value type via
//! [`FiniteGroup::from_mul_closure`]); discovery is breadth-first with a
//! lexicographic tie-break inside each BFS level, so the element order — and
//! everything downstream that depends on it, such as coset representatives —
//! is deterministic.
//!
//! Subgroups are value objects ([`Subgroup`]): a sorted member list validated
//! to be closed. The module provides the predicates the rest of the library
//! needs (normality, fullness `N = [N,F]`, perfection), quotients with
//! minimal-index coset representatives, direct products, verified
//! homomorphisms, and a relabelling helper used to test that computed
//! invariants do not depend on the element order.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the order of a constructed group.
pub const DEFAULT_GROUP_CAP: usize = 5000;

/// Errors from group construction and subgroup operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    /// Generated closure exceeded the size cap.
    #[error("group closure exceeded the cap of {cap} elements")]
    CapExceeded {
        /// The cap that was in force.
        cap: usize,
    },
    /// A subgroup argument is not normal where normality is required.
    #[error("subgroup is not normal in the ambient group")]
    NotNormal,
    /// A permutation input is not a bijection on the stated domain.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    /// A multiplication table fails the group axioms.
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    /// A claimed homomorphism fails `phi(xy) = phi(x)phi(y)` somewhere.
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    /// A group file could not be parsed.
    #[error("group file parse error: {0}")]
    Parse(String),
}

/// A finite group on element indices `0..n` with identity `0`.
#[derive(Clone, Serialize, Deserialize)]
pub struct FiniteGroup {
    name: String,
    n: usize,
    /// Row-major flat table: `table[a*n + b] = a·b`.
    table: Vec<u32>,
    inv: Vec<u32>,
}

/// A subgroup given by its sorted member indices (always contains `0`).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Subgroup {
    members: Vec<u32>,
}

/// A verified group homomorphism given by its full value table.
#[derive(Clone, Debug)]
pub struct GroupHom {
    images: Vec<u32>,
}

/// Result of forming a quotient group `F/N`.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// The quotient as a standalone group; element `i` is the coset of `reps[i]`.
    pub group: FiniteGroup,
    /// `projection[x]` = quotient index of the coset `xN`.
    pub projection: Vec<u32>,
    /// Minimal-index representative of each coset; `reps[0] = 0`.
    pub reps: Vec<u32>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({} of order {})", self.name, self.n)
    }
}

impl FiniteGroup {
    /// Order of the group.
    #[must_use]
    pub fn order(&self) -> usize {
        self.n
    }

    /// Group label.
    #[must_use]
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Product of two elements.
    #[must_use]
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    /// Inverse of an element.
    #[must_use]
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// Conjugate `g · a · g⁻¹`.
    #[must_use]
    pub fn conj(&self, a: u32, g: u32) -> u32 {
        self.mul(self.mul(g, a), self.inv(g))
    }

    /// Commutator `[a, b] = a b a⁻¹ b⁻¹`.
    #[must_use]
    pub fn comm(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    /// Multiplicative order of an element.
    #[must_use]
    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Exponent of the group (lcm of element orders).
    #[must_use]
    pub fn exponent(&self) -> u64 {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        (0..self.n as u32).fold(1u64, |acc, a| {
            let o = self.element_order(a) as u64;
            acc / gcd(acc, o) * o
        })
    }

    /// Whether the group is abelian.
    #[must_use]
    pub fn is_abelian(&self) -> bool {
        (0..self.n as u32).all(|a| (0..self.n as u32).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Closes generators under multiplication by BFS to build a group.
    ///
    /// Elements of the carrier type `T` are discovered level by level from the
    /// identity; within a level the new elements are sorted by `T`'s order, so
    /// the final indexing is deterministic. Returns the group together with
    /// the carrier value of each index.
    ///
    /// # Errors
    /// [`GroupError::CapExceeded`] when the closure grows past `cap`.
    pub fn from_mul_closure<T, M>(
        name: &str,
        identity: T,
        gens: &[T],
        mut mul: M,
        cap: usize,
    ) -> Result<(FiniteGroup, Vec<T>), GroupError>
    where
        T: Clone + Ord,
        M: FnMut(&T, &T) -> T,
    {
        let mut elements: Vec<T> = vec![identity];
        let mut index: std::collections::BTreeMap<T, u32> = std::collections::BTreeMap::new();
        index.insert(elements[0].clone(), 0);
        let mut frontier: Vec<u32> = vec![0];
        while !frontier.is_empty() {
            let mut fresh: Vec<T> = Vec::new();
            for &i in &frontier {
                for g in gens {
                    let prod = mul(&elements[i as usize], g);
                    if !index.contains_key(&prod) && !fresh.contains(&prod) {
                        fresh.push(prod);
                    }
                }
            }
            fresh.sort();
            frontier.clear();
            for t in fresh {
                if elements.len() >= cap {
                    return Err(GroupError::CapExceeded { cap });
                }
                let id = elements.len() as u32;
                index.insert(t.clone(), id);
                elements.push(t);
                frontier.push(id);
            }
        }
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let prod = mul(&elements[a], &elements[b]);
                let &id = index
                    .get(&prod)
                    .expect("closure is closed under multiplication");
                table[a * n + b] = id;
            }
        }
        let group = FiniteGroup::from_table_unchecked(name, table)?;
        Ok((group, elements))
    }

    /// Builds the group generated by permutations of `{0..degree-1}`
    /// (each given as an image vector).
    ///
    /// # Errors
    /// [`GroupError::InvalidPermutation`] for non-bijections;
    /// [`GroupError::CapExceeded`] past `cap`.
    pub fn from_permutations(
        name: &str,
        degree: usize,
        gens: &[Vec<u32>],
        cap: usize,
    ) -> Result<FiniteGroup, GroupError> {
        for g in gens {
            if g.len() != degree {
                return Err(GroupError::InvalidPermutation(format!(
                    "expected degree {degree}, got {}",
                    g.len()
                )));
            }
            let mut seen = vec![false; degree];
            for &img in g {
                if img as usize >= degree || seen[img as usize] {
                    return Err(GroupError::InvalidPermutation(
                        "image vector is not a bijection".into(),
                    ));
                }
                seen[img as usize] = true;
            }
        }
        let identity: Vec<u32> = (0..degree as u32).collect();
        // p followed by q: (p·q)(i) = q(p(i)).
        let compose = |p: &Vec<u32>, q: &Vec<u32>| -> Vec<u32> {
            p.iter().map(|&i| q[i as usize]).collect()
        };
        let (group, _) =
            FiniteGroup::from_mul_closure(name, identity, &gens.to_vec(), compose, cap)?;
        Ok(group)
    }

    /// Wraps a raw table, checking the full group axioms.
    ///
    /// Index 0 must be a two-sided identity; every element needs a two-sided
    /// inverse; rows and columns must be permutations. Associativity is
    /// checked exhaustively for `n ≤ 128` and on 100 000 seeded random
    /// triples above that.
    ///
    /// # Errors
    /// [`GroupError::InvalidTable`] describing the first violated axiom.
    pub fn from_table(name: &str, table_rows: Vec<Vec<u32>>) -> Result<FiniteGroup, GroupError> {
        let n = table_rows.len();
        for (i, row) in table_rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidTable(format!(
                    "row {i} has length {} but the table has {n} rows",
                    row.len()
                )));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &table_rows {
            flat.extend_from_slice(row);
        }
        if flat.iter().any(|&x| x as usize >= n) {
            return Err(GroupError::InvalidTable("entry out of range".into()));
        }
        let g = FiniteGroup::from_table_unchecked(name, flat)?;
        g.check_axioms()?;
        Ok(g)
    }

    fn from_table_unchecked(name: &str, table: Vec<u32>) -> Result<FiniteGroup, GroupError> {
        let n = if table.is_empty() {
            return Err(GroupError::InvalidTable("empty table".into()));
        } else {
            (table.len() as f64).sqrt() as usize
        };
        debug_assert_eq!(n * n, table.len());
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == 0 && table[b * n + a] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        if inv.iter().any(|&x| x == u32::MAX) {
            return Err(GroupError::InvalidTable("an element has no inverse".into()));
        }
        Ok(FiniteGroup {
            name: name.to_string(),
            n,
            table,
            inv,
        })
    }

    fn check_axioms(&self) -> Result<(), GroupError> {
        let n = self.n;
        for a in 0..n as u32 {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(GroupError::InvalidTable(
                    "index 0 is not a two-sided identity".into(),
                ));
            }
        }
        for a in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for b in 0..n {
                let r = self.table[a * n + b] as usize;
                let c = self.table[b * n + a] as usize;
                if seen_row[r] || seen_col[c] {
                    return Err(GroupError::InvalidTable(format!(
                        "row or column {a} is not a permutation"
                    )));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        let check = |a: u32, b: u32, c: u32| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 128 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    for c in 0..n as u32 {
                        if !check(a, b, c) {
                            return Err(GroupError::InvalidTable(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED_A550);
            for _ in 0..100_000 {
                let (a, b, c) = (
                    rng.gen_range(0..n) as u32,
                    rng.gen_range(0..n) as u32,
                    rng.gen_range(0..n) as u32,
                );
                if !check(a, b, c) {
                    return Err(GroupError::InvalidTable(format!(
                        "associativity fails at ({a},{b},{c})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The trivial subgroup `{1}`.
    #[must_use]
    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { members: vec![0] }
    }

    /// The whole group as a subgroup.
    #[must_use]
    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup {
            members: (0..self.n as u32).collect(),
        }
    }

    /// Subgroup generated by the given elements (closure under mul/inv).
    #[must_use]
    pub fn subgroup(&self, gens: &[u32]) -> Subgroup {
        let mut in_sub = vec![false; self.n];
        in_sub[0] = true;
        let mut queue: Vec<u32> = vec![0];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !in_sub[y as usize] {
                        in_sub[y as usize] = true;
                        queue.push(y);
                    }
                }
            }
        }
        Subgroup {
            members: (0..self.n as u32).filter(|&x| in_sub[x as usize]).collect(),
        }
    }

    /// Smallest normal subgroup containing the given elements.
    #[must_use]
    pub fn normal_closure(&self, gens: &[u32]) -> Subgroup {
        let mut closure_gens: Vec<u32> = Vec::new();
        for &g in gens {
            for t in 0..self.n as u32 {
                let c = self.conj(g, t);
                if !closure_gens.contains(&c) {
                    closure_gens.push(c);
                }
            }
        }
        self.subgroup(&closure_gens)
    }

    /// The center `{z : zx = xz for all x}`.
    #[must_use]
    pub fn center(&self) -> Subgroup {
        Subgroup {
            members: (0..self.n as u32)
                .filter(|&z| (0..self.n as u32).all(|x| self.mul(z, x) == self.mul(x, z)))
                .collect(),
        }
    }

    /// Whether `sub` is normal.
    #[must_use]
    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        sub.members.iter().all(|&x| {
            (0..self.n as u32).all(|g| sub.contains(self.conj(x, g)))
        })
    }

    /// The mutual commutator `[N, F]`, generated by all `[n, f]`.
    ///
    /// # Errors
    /// [`GroupError::NotNormal`] when `n_sub` is not normal.
    pub fn commutator_subgroup(&self, n_sub: &Subgroup) -> Result<Subgroup, GroupError> {
        if !self.is_normal(n_sub) {
            return Err(GroupError::NotNormal);
        }
        let mut gens = Vec::new();
        for &x in &n_sub.members {
            for f in 0..self.n as u32 {
                let c = self.comm(x, f);
                if c != 0 && !gens.contains(&c) {
                    gens.push(c);
                }
            }
        }
        Ok(self.subgroup(&gens))
    }

    /// Whether `N = [N, F]`.
    ///
    /// # Errors
    /// [`GroupError::NotNormal`] when `n_sub` is not normal.
    pub fn is_full(&self, n_sub: &Subgroup) -> Result<bool, GroupError> {
        Ok(self.commutator_subgroup(n_sub)? == *n_sub)
    }

    /// Whether the group equals its own derived subgroup.
    #[must_use]
    pub fn is_perfect(&self) -> bool {
        self.is_full(&self.full_subgroup())
            .expect("the full subgroup is normal")
    }

    /// Quotient by a normal subgroup; coset representatives are the minimal
    /// element index in each coset, and quotient elements are ordered by
    /// representative. The projection is re-verified to be a homomorphism.
    ///
    /// # Errors
    /// [`GroupError::NotNormal`] when `n_sub` is not normal.
    pub fn quotient(&self, n_sub: &Subgroup) -> Result<Quotient, GroupError> {
        if !self.is_normal(n_sub) {
            return Err(GroupError::NotNormal);
        }
        let n = self.n;
        let mut coset_of = vec![u32::MAX; n];
        let mut reps: Vec<u32> = Vec::new();
        for x in 0..n as u32 {
            if coset_of[x as usize] != u32::MAX {
                continue;
            }
            // x is the least element of an undiscovered coset xN.
            let id = reps.len() as u32;
            reps.push(x);
            for &m in &n_sub.members {
                coset_of[self.mul(x, m) as usize] = id;
            }
        }
        let k = reps.len();
        let mut table = vec![0u32; k * k];
        for (i, &ri) in reps.iter().enumerate() {
            for (j, &rj) in reps.iter().enumerate() {
                table[i * k + j] = coset_of[self.mul(ri, rj) as usize];
            }
        }
        let group = FiniteGroup::from_table_unchecked(&format!("{}/{}", self.name, "N"), table)?;
        group.check_axioms()?;
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if coset_of[self.mul(a, b) as usize]
                    != group.mul(coset_of[a as usize], coset_of[b as usize])
                {
                    return Err(GroupError::InvalidTable(
                        "quotient projection is not a homomorphism".into(),
                    ));
                }
            }
        }
        Ok(Quotient {
            group,
            projection: coset_of,
            reps,
        })
    }

    /// Restricts a subgroup to a standalone group; element `i` of the result
    /// is member `i` of the subgroup (so the embedding map is the member
    /// list itself, in order).
    #[must_use]
    pub fn subgroup_as_group(&self, sub: &Subgroup, name: &str) -> (FiniteGroup, Vec<u32>) {
        let members = sub.members.clone();
        let pos: HashMap<u32, u32> = members
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i as u32))
            .collect();
        let k = members.len();
        let mut table = vec![0u32; k * k];
        for i in 0..k {
            for j in 0..k {
                table[i * k + j] = pos[&self.mul(members[i], members[j])];
            }
        }
        let g = FiniteGroup::from_table_unchecked(name, table)
            .expect("a closed subgroup restricts to a group");
        (g, members)
    }

    /// Direct product `A × B`; element `(a, b)` has index `a·|B| + b`.
    /// Returns the product with the two coordinate embeddings.
    #[must_use]
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> (FiniteGroup, Vec<u32>, Vec<u32>) {
        let (na, nb) = (a.n, b.n);
        let n = na * nb;
        let mut table = vec![0u32; n * n];
        for xa in 0..na {
            for xb in 0..nb {
                for ya in 0..na {
                    for yb in 0..nb {
                        let x = xa * nb + xb;
                        let y = ya * nb + yb;
                        table[x * n + y] = a.mul(xa as u32, ya as u32) * nb as u32
                            + b.mul(xb as u32, yb as u32);
                    }
                }
            }
        }
        let g = FiniteGroup::from_table_unchecked(&format!("{}x{}", a.name, b.name), table)
            .expect("product of groups is a group");
        let embed_a = (0..na as u32).map(|x| x * nb as u32).collect();
        let embed_b = (0..nb as u32).collect();
        (g, embed_a, embed_b)
    }

    /// Re-indexes the group by `perm` (new index of old element `i` is
    /// `perm[i]`; `perm[0]` must be `0`). Used to confirm that computed
    /// invariants do not depend on the element order.
    ///
    /// # Errors
    /// [`GroupError::InvalidPermutation`] when `perm` is not an
    /// identity-fixing bijection.
    pub fn relabeled(&self, perm: &[u32]) -> Result<FiniteGroup, GroupError> {
        let n = self.n;
        if perm.len() != n || perm[0] != 0 {
            return Err(GroupError::InvalidPermutation(
                "relabelling must fix the identity and cover all elements".into(),
            ));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p as usize >= n || seen[p as usize] {
                return Err(GroupError::InvalidPermutation(
                    "relabelling is not a bijection".into(),
                ));
            }
            seen[p as usize] = true;
        }
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[perm[a] as usize * n + perm[b] as usize] = perm[self.table[a * n + b] as usize];
            }
        }
        FiniteGroup::from_table_unchecked(&format!("{}#relabeled", self.name), table)
    }

    /// Parses the versioned text group format.
    ///
    /// An optional leading `regkt-format 1` line is accepted. Then either
    /// `perm <degree>` followed by one generator per line in cycle notation
    /// (1-based points, e.g. `(1 2 3)(4 5)`), or `table <n>` followed by `n`
    /// lines of `n` space-separated 0-based indices. Blank lines and lines
    /// starting with `#` are ignored.
    ///
    /// # Errors
    /// [`GroupError::Parse`] on malformed input, plus any construction error.
    pub fn parse(name: &str, text: &str, cap: usize) -> Result<FiniteGroup, GroupError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        if let Some(&first) = lines.peek() {
            if first.starts_with("regkt-format") {
                if first != "regkt-format 1" {
                    return Err(GroupError::Parse(format!("unsupported format line `{first}`")));
                }
                lines.next();
            }
        }
        let header = lines
            .next()
            .ok_or_else(|| GroupError::Parse("empty group file".into()))?;
        let mut parts = header.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some("perm"), Some(deg_s), None) => {
                let degree: usize = deg_s
                    .parse()
                    .map_err(|_| GroupError::Parse(format!("bad degree `{deg_s}`")))?;
                let mut gens = Vec::new();
                for line in lines {
                    gens.push(parse_cycles(line, degree)?);
                }
                FiniteGroup::from_permutations(name, degree, &gens, cap)
            }
            (Some("table"), Some(n_s), None) => {
                let n: usize = n_s
                    .parse()
                    .map_err(|_| GroupError::Parse(format!("bad size `{n_s}`")))?;
                let mut rows = Vec::with_capacity(n);
                for line in lines.by_ref().take(n) {
                    let row: Result<Vec<u32>, _> =
                        line.split_whitespace().map(str::parse::<u32>).collect();
                    rows.push(row.map_err(|_| GroupError::Parse("bad table entry".into()))?);
                }
                if rows.len() != n {
                    return Err(GroupError::Parse(format!(
                        "expected {n} table rows, found {}",
                        rows.len()
                    )));
                }
                FiniteGroup::from_table(name, rows)
            }
            _ => Err(GroupError::Parse(format!("bad header `{header}`"))),
        }
    }
}

/// Parses one line of cycle notation over 1-based points into an image vector.
fn parse_cycles(line: &str, degree: usize) -> Result<Vec<u32>, GroupError> {
    let mut image: Vec<u32> = (0..degree as u32).collect();
    let mut rest = line.trim();
    if rest == "()" {
        return Ok(image);
    }
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| GroupError::Parse(format!("expected `(` in `{line}`")))?;
        let close = rest[open..]
            .find(')')
            .ok_or_else(|| GroupError::Parse(format!("unbalanced `(` in `{line}`")))?
            + open;
        let body = &rest[open + 1..close];
        let points: Result<Vec<usize>, _> = body
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse::<usize>)
            .collect();
        let points = points.map_err(|_| GroupError::Parse(format!("bad point in `{body}`")))?;
        if points.iter().any(|&p| p == 0 || p > degree) {
            return Err(GroupError::Parse(format!(
                "point out of range 1..={degree} in `{body}`"
            )));
        }
        // Apply this cycle after the accumulated image.
        let mut cyc: Vec<u32> = (0..degree as u32).collect();
        for w in 0..points.len() {
            let from = points[w] - 1;
            let to = points[(w + 1) % points.len()] - 1;
            cyc[from] = to as u32;
        }
        for slot in image.iter_mut() {
            *slot = cyc[*slot as usize];
        }
        rest = rest[close + 1..].trim();
    }
    Ok(image)
}

impl Subgroup {
    /// Sorted member indices.
    #[must_use]
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    /// Number of members.
    #[must_use]
    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Membership test.
    #[must_use]
    pub fn contains(&self, x: u32) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Whether this is the trivial subgroup.
    #[must_use]
    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Builds a subgroup directly from a member list, checking closure.
    ///
    /// # Errors
    /// [`GroupError::InvalidTable`] when the set is not a subgroup.
    pub fn from_members(group: &FiniteGroup, mut members: Vec<u32>) -> Result<Subgroup, GroupError> {
        members.sort_unstable();
        members.dedup();
        if members.first() != Some(&0) {
            return Err(GroupError::InvalidTable("subgroup must contain 0".into()));
        }
        for &a in &members {
            for &b in &members {
                let p = group.mul(a, b);
                if members.binary_search(&p).is_err() {
                    return Err(GroupError::InvalidTable(
                        "member set is not closed under multiplication".into(),
                    ));
                }
            }
        }
        Ok(Subgroup { members })
    }

    /// Image of the subgroup under an index relabelling.
    #[must_use]
    pub fn relabeled(&self, perm: &[u32]) -> Subgroup {
        let mut members: Vec<u32> = self.members.iter().map(|&m| perm[m as usize]).collect();
        members.sort_unstable();
        Subgroup { members }
    }
}

impl GroupHom {
    /// Builds a homomorphism from a full value table, verifying
    /// `phi(xy) = phi(x)phi(y)` on all pairs.
    ///
    /// # Errors
    /// [`GroupError::NotHomomorphism`] on the first violated pair.
    pub fn new(
        source: &FiniteGroup,
        target: &FiniteGroup,
        images: Vec<u32>,
    ) -> Result<GroupHom, GroupError> {
        if images.len() != source.order() {
            return Err(GroupError::NotHomomorphism(
                "image table has the wrong length".into(),
            ));
        }
        if images.iter().any(|&y| y as usize >= target.order()) {
            return Err(GroupError::NotHomomorphism("image out of range".into()));
        }
        for a in 0..source.order() as u32 {
            for b in 0..source.order() as u32 {
                let lhs = images[source.mul(a, b) as usize];
                let rhs = target.mul(images[a as usize], images[b as usize]);
                if lhs != rhs {
                    return Err(GroupError::NotHomomorphism(format!(
                        "phi({a}·{b}) != phi({a})·phi({b})"
                    )));
                }
            }
        }
        Ok(GroupHom { images })
    }

    /// Image of a single element.
    #[must_use]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    /// The full image table.
    #[must_use]
    pub fn images(&self) -> &[u32] {
        &self.images
    }
}

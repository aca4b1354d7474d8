//! Permutations, permutation groups (Schreier–Sims) and orbit computations.
//!
//! Composition is right-to-left: `a.compose(&b)` is `i -> a(b(i))`, so `b`
//! acts first.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        for c in self.cycles() {
            let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Parameter(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Permutation of `0..n` built from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (k, &a) in c.iter().enumerate() {
                images[a] = c[(k + 1) % c.len()];
            }
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Permutation) -> Permutation {
        Permutation {
            images: first.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Non-trivial cycles, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || self.images[s] == s {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut x = self.images[s];
            while x != s {
                seen[x] = true;
                c.push(x);
                x = self.images[x];
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> usize {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.cycles()
            .iter()
            .map(|c| c.len())
            .fold(1, |acc, l| acc / gcd(acc, l) * l)
    }
}

/// Base and strong generating set built by the Schreier–Sims algorithm.
#[derive(Clone, Debug)]
struct StabChain {
    n: usize,
    base: Vec<usize>,
    gens: Vec<Permutation>,
    /// `trans[l][x] = u` with `u(base[l]) = x`
    trans: Vec<Vec<Option<Permutation>>>,
}

impl StabChain {
    fn new(n: usize) -> Self {
        StabChain {
            n,
            base: Vec::new(),
            gens: Vec::new(),
            trans: Vec::new(),
        }
    }

    fn level_gens(&self, l: usize) -> Vec<Permutation> {
        self.gens
            .iter()
            .filter(|g| self.base[..l].iter().all(|&b| g.apply(b) == b))
            .cloned()
            .collect()
    }

    fn rebuild_orbits(&mut self) {
        for l in 0..self.base.len() {
            let gens = self.level_gens(l);
            let mut t: Vec<Option<Permutation>> = vec![None; self.n];
            t[self.base[l]] = Some(Permutation::identity(self.n));
            let mut queue = vec![self.base[l]];
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head];
                head += 1;
                let ux = t[x].clone().expect("orbit element has a transversal");
                for s in &gens {
                    let y = s.apply(x);
                    if t[y].is_none() {
                        t[y] = Some(s.compose(&ux));
                        queue.push(y);
                    }
                }
            }
            self.trans[l] = t;
        }
    }

    fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for l in from..self.base.len() {
            let x = h.apply(self.base[l]);
            match &self.trans[l][x] {
                None => return (h, l),
                Some(u) => h = u.inverse().compose(&h),
            }
        }
        (h, self.base.len())
    }

    fn add_residue(&mut self, h: Permutation, level: usize) {
        if level == self.base.len() {
            let moved = (0..self.n)
                .find(|&i| h.apply(i) != i)
                .expect("non-identity residue");
            self.base.push(moved);
            self.trans.push(Vec::new());
        }
        self.gens.push(h);
        self.rebuild_orbits();
    }

    fn build(n: usize, generators: &[Permutation]) -> Self {
        let mut chain = StabChain::new(n);
        for g in generators {
            let (h, j) = chain.strip(g, 0);
            if !(j == chain.base.len() && h.is_identity()) {
                chain.add_residue(h, j);
            }
        }
        loop {
            let mut changed = false;
            'levels: for l in (0..chain.base.len()).rev() {
                let gens = chain.level_gens(l);
                let orbit: Vec<usize> = (0..n).filter(|&x| chain.trans[l][x].is_some()).collect();
                for &x in &orbit {
                    let ux = chain.trans[l][x].clone().expect("orbit point");
                    for s in &gens {
                        let y = s.apply(x);
                        let uy = chain.trans[l][y].clone().expect("orbit closed");
                        let sg = uy.inverse().compose(&s.compose(&ux));
                        let (h, j) = chain.strip(&sg, l + 1);
                        if !(j == chain.base.len() && h.is_identity()) {
                            chain.add_residue(h, j);
                            changed = true;
                            break 'levels;
                        }
                    }
                }
            }
            if !changed {
                return chain;
            }
        }
    }

    fn order(&self) -> u128 {
        self.trans
            .iter()
            .map(|t| t.iter().filter(|u| u.is_some()).count() as u128)
            .product()
    }

    fn contains(&self, g: &Permutation) -> bool {
        let (h, j) = self.strip(g, 0);
        j == self.base.len() && h.is_identity()
    }
}

/// The group generated by a list of permutations of `0..n`.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub generators: Vec<Permutation>,
    degree: usize,
    chain: StabChain,
    enum_bound: usize,
    element_cache: OnceLock<Option<Vec<Permutation>>>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>, enum_bound: usize) -> Result<Self> {
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(Error::Parameter("generator degree mismatch".into()));
        }
        let chain = StabChain::build(degree, &generators);
        Ok(PermGroup {
            generators,
            degree,
            chain,
            enum_bound,
            element_cache: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.chain.contains(g)
    }

    /// All elements, when the order does not exceed the enumeration bound.
    pub fn elements(&self) -> Option<&[Permutation]> {
        self.element_cache
            .get_or_init(|| {
                if self.order() > self.enum_bound as u128 {
                    return None;
                }
                let mut out = vec![Permutation::identity(self.degree)];
                for t in self.chain.trans.iter().rev() {
                    let reps: Vec<&Permutation> = t.iter().flatten().collect();
                    out = reps
                        .iter()
                        .flat_map(|u| out.iter().map(move |g| u.compose(g)))
                        .collect();
                }
                out.sort();
                Some(out)
            })
            .as_deref()
    }

    pub fn orbit(&self, point: usize) -> Vec<usize> {
        orbit_with_transversal(&self.generators, self.degree, point).0
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).len() == self.degree
    }
}

/// Orbit of `point` and transversal `u_x` with `u_x(point) = x`, in BFS order.
pub fn orbit_with_transversal(
    gens: &[Permutation],
    n: usize,
    point: usize,
) -> (Vec<usize>, Vec<Option<Permutation>>) {
    let mut t: Vec<Option<Permutation>> = vec![None; n];
    t[point] = Some(Permutation::identity(n));
    let mut orbit = vec![point];
    let mut head = 0;
    while head < orbit.len() {
        let x = orbit[head];
        head += 1;
        let ux = t[x].clone().expect("visited");
        for s in gens {
            let y = s.apply(x);
            if t[y].is_none() {
                t[y] = Some(s.compose(&ux));
                orbit.push(y);
            }
        }
    }
    (orbit, t)
}

/// Schreier generators `u_{s(x)}^{-1} s u_x` of the stabilizer of `point`.
pub fn stabilizer_generators(gens: &[Permutation], n: usize, point: usize) -> Vec<Permutation> {
    let (orbit, t) = orbit_with_transversal(gens, n, point);
    let mut out: Vec<Permutation> = Vec::new();
    for &x in &orbit {
        let ux = t[x].as_ref().expect("orbit point");
        for s in gens {
            let uy = t[s.apply(x)].as_ref().expect("orbit closed");
            let g = uy.inverse().compose(&s.compose(ux));
            if !g.is_identity() && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// Orbits of the group generated by `gens`, each sorted, ordered by smallest element.
pub fn orbits(gens: &[Permutation], n: usize) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let (mut orb, _) = orbit_with_transversal(gens, n, s);
        for &x in &orb {
            label[x] = out.len();
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out
}

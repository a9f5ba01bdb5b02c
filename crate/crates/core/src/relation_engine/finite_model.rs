//! Finite measured equivalence relations with explicit subset functions.
//! These are the exact substrate for conditional expectations and maximal
//! inequality audits.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Accumulator, Capabilities, Member, Scalar, SubsetFunctionSeq};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone)]
pub struct FiniteModel {
    weights: Vec<BigRational>,
    class_of: Vec<usize>,
    /// `sets[n][b]` = sorted `𝓕ₙ(b)`.
    sets: Vec<Vec<Vec<usize>>>,
}

impl FiniteModel {
    pub fn new(
        weights: Vec<BigRational>,
        class_of: Vec<usize>,
        sets: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let size = weights.len();
        if size == 0 {
            return Err(invalid("finite model needs at least one point"));
        }
        if class_of.len() != size {
            return Err(invalid("class table length differs from point count"));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(invalid("point weights must be positive"));
        }
        if sets.is_empty() {
            return Err(invalid("finite model needs at least one level"));
        }
        let mut sorted = Vec::with_capacity(sets.len());
        for (n, level) in sets.into_iter().enumerate() {
            if level.len() != size {
                return Err(invalid(format!("level {n} does not cover every point")));
            }
            let mut lvl = Vec::with_capacity(size);
            for (b, set) in level.into_iter().enumerate() {
                let set: BTreeSet<usize> = set.into_iter().collect();
                if set.is_empty() {
                    return Err(invalid(format!("F_{n}({b}) is empty")));
                }
                if let Some(&bad) = set.iter().find(|&&x| x >= size || class_of[x] != class_of[b]) {
                    return Err(invalid(format!(
                        "F_{n}({b}) contains {bad}, outside the class of {b}"
                    )));
                }
                lvl.push(set.into_iter().collect());
            }
            sorted.push(lvl);
        }
        Ok(FiniteModel {
            weights,
            class_of,
            sets: sorted,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Highest defined index `T`.
    pub fn max_level(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn weight(&self, b: usize) -> &BigRational {
        &self.weights[b]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn class_of(&self, b: usize) -> usize {
        self.class_of[b]
    }

    pub fn set(&self, n: usize, b: usize) -> &[usize] {
        &self.sets[n][b]
    }

    /// Classes in order of first appearance.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = Vec::new();
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for (b, &c) in self.class_of.iter().enumerate() {
            members
                .entry(c)
                .or_insert_with(|| {
                    order.push(c);
                    Vec::new()
                })
                .push(b);
        }
        order.into_iter().map(|c| members.remove(&c).unwrap()).collect()
    }

    /// `(point, mass)` pairs for audits.
    pub fn universe(&self) -> Vec<(usize, Scalar)> {
        self.weights
            .iter()
            .enumerate()
            .map(|(b, w)| (b, Scalar::Exact(w.clone())))
            .collect()
    }

    /// `|{b′ : b ∈ 𝓕ₙ(b′)}|` for every `b`.
    pub fn coverage_counts(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; self.len()];
        for set in &self.sets[n] {
            for &b in set {
                counts[b] += 1;
            }
        }
        counts
    }

    /// Random model whose subset functions form a nested chain of partitions:
    /// singletons at level 0, each class whole at level `levels`.
    pub fn random_nested<R: Rng + ?Sized>(rng: &mut R, points: usize, levels: usize) -> Self {
        assert!(points >= 1 && levels >= 1);
        let n_classes = rng.random_range(1..=points.min(3));
        let mut class_of: Vec<usize> = (0..points).map(|b| b % n_classes).collect();
        class_of.shuffle(rng);
        let weights: Vec<BigRational> = (0..points)
            .map(|_| {
                BigRational::new(
                    rng.random_range(1..=16i64).into(),
                    rng.random_range(1..=8i64).into(),
                )
            })
            .collect();

        // block id per point, refined top-down from whole classes
        let mut partitions: Vec<Vec<usize>> = vec![class_of.clone()];
        for _ in 1..levels {
            let coarse = partitions.last().unwrap();
            let mut fine = vec![0usize; points];
            let mut next_id = 0;
            let mut by_block: HashMap<usize, Vec<usize>> = HashMap::new();
            for (b, &blk) in coarse.iter().enumerate() {
                by_block.entry(blk).or_default().push(b);
            }
            let mut keys: Vec<usize> = by_block.keys().copied().collect();
            keys.sort_unstable();
            for k in keys {
                let mut members = by_block.remove(&k).unwrap();
                members.shuffle(rng);
                let parts = rng.random_range(1..=members.len().min(3));
                for (i, b) in members.into_iter().enumerate() {
                    fine[b] = next_id + i % parts;
                }
                next_id += parts;
            }
            partitions.push(fine);
        }
        partitions.push((0..points).collect());
        partitions.reverse();

        let sets = partitions
            .iter()
            .map(|blocks| {
                (0..points)
                    .map(|b| (0..points).filter(|&c| blocks[c] == blocks[b]).collect())
                    .collect()
            })
            .collect();
        FiniteModel::new(weights, class_of, sets).expect("generated model is valid")
    }

    /// Cyclic surrogate of expanding integer intervals: one class `ℤ/size`,
    /// `𝓕ₙ(k) = {k, …, k+n}` for `n < size`, uniform weights.
    pub fn interval_surrogate(size: usize) -> Self {
        assert!(size >= 2);
        let sets = (0..size)
            .map(|n| (0..size).map(|k| (k..=k + n).map(|j| j % size).collect()).collect())
            .collect();
        FiniteModel::new(vec![BigRational::one(); size], vec![0; size], sets)
            .expect("surrogate is valid")
    }

    /// Materializes a finite subset-function sequence over an explicit point list.
    /// The masses must make each member weight equal `mass(b′)/mass(b)`; a
    /// mismatch is reported as a cocycle audit failure.
    pub fn materialize<F>(
        seq: &F,
        universe: &[(F::Point, BigRational)],
        levels: usize,
    ) -> Result<(Self, Vec<F::Point>)>
    where
        F: SubsetFunctionSeq,
        F::Point: Hash,
    {
        let index: HashMap<&F::Point, usize> =
            universe.iter().enumerate().map(|(i, (p, _))| (p, i)).collect();
        let weights: Vec<BigRational> = universe.iter().map(|(_, w)| w.clone()).collect();
        let mut sets = Vec::with_capacity(levels + 1);
        for n in 0..=levels {
            let mut level = Vec::with_capacity(universe.len());
            for (b, (p, w)) in universe.iter().enumerate() {
                let mut set = Vec::new();
                for m in seq.members(p, n)? {
                    let j = *index.get(&m.point).ok_or_else(|| {
                        invalid(format!("member {:?} of F_{n}({b}) outside universe", m.point))
                    })?;
                    let expected = &weights[j] / w;
                    if m.weight.as_exact() != Some(&expected) {
                        return Err(Error::CocycleAudit(format!(
                            "weight of {j} in F_{n}({b}) is {} but mass ratio is {expected}",
                            m.weight
                        )));
                    }
                    set.push(j);
                }
                level.push(set);
            }
            sets.push(level);
        }
        // classes: connected components of the top level sets
        let mut parent: Vec<usize> = (0..universe.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for level in &sets {
            for (b, set) in level.iter().enumerate() {
                for &c in set {
                    let (rb, rc) = (find(&mut parent, b), find(&mut parent, c));
                    if rb != rc {
                        parent[rb.max(rc)] = rb.min(rc);
                    }
                }
            }
        }
        let class_of: Vec<usize> = (0..universe.len()).map(|b| find(&mut parent, b)).collect();
        let points = universe.iter().map(|(p, _)| p.clone()).collect();
        Ok((FiniteModel::new(weights, class_of, sets)?, points))
    }
}

impl SubsetFunctionSeq for FiniteModel {
    type Point = usize;

    fn members(&self, b: &usize, n: usize) -> Result<Vec<Member<usize>>> {
        if *b >= self.len() {
            return Err(invalid(format!("point {b} outside model")));
        }
        let level = self.sets.get(n).ok_or_else(|| {
            Error::Capability(format!(
                "finite model defines F_n only for n <= {}",
                self.max_level()
            ))
        })?;
        let wb = &self.weights[*b];
        Ok(level[*b]
            .iter()
            .map(|&c| Member {
                point: c,
                weight: Scalar::Exact(&self.weights[c] / wb),
            })
            .collect())
    }

    fn cocycle_d(&self, to: &usize, from: &usize) -> Result<Scalar> {
        if self.class_of[*to] != self.class_of[*from] {
            return Err(invalid(format!("{to} and {from} are not related")));
        }
        Ok(Scalar::Exact(&self.weights[*to] / &self.weights[*from]))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            exact_weights: true,
            enumerable_classes: true,
            anchored: (0..self.sets.len())
                .all(|n| (0..self.len()).all(|b| self.sets[n][b].binary_search(&b).is_ok())),
            max_index: Some(self.max_level()),
        }
    }

    fn describe_point(&self, b: &usize) -> String {
        b.to_string()
    }
}

/// `E_{ν_v}[u/v | 𝓡]`: on each class, `Σ u w / Σ v w`.
pub fn oracle_conditional_expectation(
    model: &FiniteModel,
    u: &[Scalar],
    v: &[Scalar],
) -> Result<Vec<Scalar>> {
    if u.len() != model.len() || v.len() != model.len() {
        return Err(invalid("function tables must cover every point"));
    }
    if let Some(b) = v.iter().position(|x| !x.is_positive()) {
        return Err(invalid(format!("v must be positive; v({b}) = {}", v[b])));
    }
    let mut out = vec![Scalar::zero(); model.len()];
    for class in model.classes() {
        let mut num = Accumulator::new();
        let mut den = Accumulator::new();
        for &b in &class {
            let w = Scalar::Exact(model.weight(b).clone());
            num.add_product(&u[b], &w);
            den.add_product(&v[b], &w);
        }
        let value = num.value().checked_div(&den.value()).expect("v positive");
        for &b in &class {
            out[b] = value.clone();
        }
    }
    Ok(out)
}

/// Exact `Σ_b w(b) f(b)`.
pub fn integrate(model: &FiniteModel, f: &[Scalar]) -> Scalar {
    let mut acc = Accumulator::new();
    for (b, w) in model.weights().iter().enumerate() {
        acc.add_product(&f[b], &Scalar::Exact(w.clone()));
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation_engine::{ratio_series, weighted_sum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table(vals: &[Scalar]) -> impl Fn(&usize) -> Result<Scalar> {
        let vals = vals.to_vec();
        move |b: &usize| Ok(vals[*b].clone())
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rejects_set_outside_class() {
        let sets = vec![vec![vec![0], vec![0, 1]]];
        assert!(FiniteModel::new(vec![q(1, 1), q(1, 1)], vec![0, 1], sets).is_err());
    }

    #[test]
    fn unit_functions_count_members() {
        let m = FiniteModel::interval_surrogate(6);
        let one = |_: &usize| Ok(Scalar::one());
        for n in 0..6 {
            // D ≡ 1 under uniform weights, so the sum is |F_n(b)|
            assert_eq!(weighted_sum(&m, &one, &2, n).unwrap(), Scalar::int(n as i64 + 1));
        }
        assert!(matches!(weighted_sum(&m, &one, &0, 6), Err(Error::Capability(_))));
    }

    #[test]
    fn oracle_single_class_u_equals_v() {
        let m = FiniteModel::interval_surrogate(4);
        let u = vec![Scalar::ratio(3, 2); 4];
        let out = oracle_conditional_expectation(&m, &u, &u).unwrap();
        assert!(out.iter().all(|x| *x == Scalar::one()));
    }

    #[test]
    fn oracle_two_class_hand_example() {
        // classes {0,1} and {2}; weights 1, 3, 2
        let sets = vec![
            vec![vec![0], vec![1], vec![2]],
            vec![vec![0, 1], vec![0, 1], vec![2]],
        ];
        let m = FiniteModel::new(vec![q(1, 1), q(3, 1), q(2, 1)], vec![0, 0, 1], sets).unwrap();
        let u = vec![Scalar::int(2), Scalar::int(5), Scalar::int(7)];
        let v = vec![Scalar::int(1), Scalar::int(2), Scalar::int(4)];
        let out = oracle_conditional_expectation(&m, &u, &v).unwrap();
        // (2·1 + 5·3) / (1·1 + 2·3) = 17/7 ; 7/4
        assert_eq!(out[0], Scalar::ratio(17, 7));
        assert_eq!(out[1], Scalar::ratio(17, 7));
        assert_eq!(out[2], Scalar::ratio(7, 4));
        let series = ratio_series(&m, &table(&u), &table(&v), &1, 1).unwrap();
        assert_eq!(series.records[1].ratio, Scalar::ratio(17, 7));
        assert!(oracle_conditional_expectation(&m, &u, &[Scalar::zero(), v[1].clone(), v[2].clone()]).is_err());
    }

    #[test]
    fn random_models_are_nested_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = FiniteModel::random_nested(&mut rng, 12, 4);
            assert!(m.capabilities().anchored);
            for n in 0..=m.max_level() {
                for b in 0..m.len() {
                    for &c in m.set(n, b) {
                        assert_eq!(m.set(n, c), m.set(n, b));
                        if n < m.max_level() {
                            assert!(m.set(n + 1, b).contains(&c));
                        }
                    }
                }
            }
            for class in m.classes() {
                for &b in &class {
                    assert_eq!(m.set(m.max_level(), b), &class[..]);
                }
            }
        }
    }

    #[test]
    fn saturated_ratio_matches_oracle_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let m = FiniteModel::random_nested(&mut rng, 10, 3);
            let u: Vec<Scalar> = (0..m.len())
                .map(|_| Scalar::ratio(rng.random_range(-5..=9), rng.random_range(1..=4)))
                .collect();
            let v: Vec<Scalar> = (0..m.len())
                .map(|_| Scalar::ratio(rng.random_range(1..=9), rng.random_range(1..=4)))
                .collect();
            let oracle = oracle_conditional_expectation(&m, &u, &v).unwrap();
            for b in 0..m.len() {
                let s = ratio_series(&m, &table(&u), &table(&v), &b, m.max_level()).unwrap();
                let last = s.last().unwrap();
                assert!(last.ratio.is_exact());
                assert_eq!(last.ratio, oracle[b]);
            }
        }
    }
}

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A surjection of atoms onto blocks `0..block_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    block_count: usize,
}

impl Partition {
    /// Every block index below the maximum must be used.
    pub fn new(block_of: Vec<usize>) -> Result<Self> {
        let block_count = block_of.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; block_count];
        block_of.iter().for_each(|&b| used[b] = true);
        if let Some(empty) = used.iter().position(|u| !u) {
            return Err(Error::validation(format!("block {empty} is empty")));
        }
        Ok(Partition { block_of, block_count })
    }

    pub fn identity(n: usize) -> Self {
        Partition { block_of: (0..n).collect(), block_count: n }
    }

    /// One block holding everything.
    pub fn trivial(n: usize) -> Self {
        Partition { block_of: vec![0; n], block_count: usize::from(n > 0) }
    }

    /// `k` contiguous runs of (nearly) equal length.
    pub fn contiguous(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::validation(format!("cannot split {n} atoms into {k} blocks")));
        }
        Ok(Partition { block_of: (0..n).map(|x| x * k / n).collect(), block_count: k })
    }

    /// Uniformly random surjection onto `k` blocks.
    pub fn random<R: Rng>(n: usize, k: usize, rng: &mut R) -> Self {
        assert!(k >= 1 && k <= n, "need 1 <= k <= n");
        let mut atoms: Vec<usize> = (0..n).collect();
        atoms.shuffle(rng);
        let mut block_of = vec![0; n];
        for (i, &x) in atoms.iter().enumerate() {
            block_of[x] = if i < k { i } else { rng.gen_range(0..k) };
        }
        Partition { block_of, block_count: k }
    }

    /// A random partition with `k` blocks that this one refines.
    pub fn random_coarsening<R: Rng>(&self, k: usize, rng: &mut R) -> Self {
        let merge = Partition::random(self.block_count, k, rng);
        Partition { block_of: self.block_of.iter().map(|&b| merge.block_of[b]).collect(), block_count: k }
    }

    pub fn atom_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    #[inline]
    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// True when every block of `self` lies inside one block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.atom_count() != coarser.atom_count() {
            return false;
        }
        let mut image = vec![usize::MAX; self.block_count];
        self.block_of.iter().zip(&coarser.block_of).all(|(&f, &c)| {
            if image[f] == usize::MAX {
                image[f] = c;
            }
            image[f] == c
        })
    }

    pub(crate) fn check_atoms(&self, n: usize) -> Result<()> {
        if self.atom_count() != n {
            return Err(Error::Mismatch { expected: n, found: self.atom_count() });
        }
        Ok(())
    }

    pub(crate) fn block_sums<T: Scalar>(&self, weights: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.block_count];
        for (x, w) in weights.iter().enumerate() {
            out[self.block_of[x]].add_assign_ref(w);
        }
        out
    }
}

/// Partitions of one atom set, each refining the previous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementSequence {
    partitions: Vec<Partition>,
}

impl RefinementSequence {
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        for (i, w) in partitions.windows(2).enumerate() {
            if !w[1].refines(&w[0]) {
                return Err(Error::validation(format!("partition {} does not refine partition {i}", i + 1)));
            }
        }
        Ok(RefinementSequence { partitions })
    }

    /// Contiguous dyadic partitions with `2^1, ..., 2^levels` blocks over `n`
    /// atoms; `n` must be divisible by `2^levels`.
    pub fn dyadic(n: usize, levels: u32) -> Result<Self> {
        if levels == 0 || n % (1usize << levels) != 0 {
            return Err(Error::validation(format!("{n} atoms do not split into 2^{levels} equal blocks")));
        }
        let parts = (1..=levels).map(|m| Partition::contiguous(n, 1 << m)).collect::<Result<Vec<_>>>()?;
        RefinementSequence::new(parts)
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }
}

//! Generic deterministic adaptive subdivision driver.
//!
//! Regions live in a slab indexed by creation order; the refinement queue is
//! ordered by (error, id). Each iteration pops a fixed-size batch, evaluates
//! the children (optionally on worker threads) and reinserts them in batch
//! order. The final value is re-accumulated over surviving regions in id
//! order, so the output is independent of the worker count.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::rules::RuleOut;
use super::QuadError;
use crate::fmath;

const BATCH: usize = 24;

#[derive(Clone)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn unit_cube(d: usize) -> Self {
        Region {
            lo: alloc::vec![0.0; d],
            hi: alloc::vec![1.0; d],
        }
    }

    fn split(&self, dim: usize) -> (Region, Region) {
        let mid = 0.5 * (self.lo[dim] + self.hi[dim]);
        let mut a = self.clone();
        let mut b = self.clone();
        a.hi[dim] = mid;
        b.lo[dim] = mid;
        (a, b)
    }
}

struct Leaf {
    values: Vec<f64>,
    err: f64,
    region: Region,
    split_dim: usize,
}

struct QueueItem {
    err: f64,
    id: u32,
}

impl PartialEq for QueueItem {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.id == other.id
    }
}
impl Eq for QueueItem {}

impl Ord for QueueItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: larger error first, then smaller (older) id
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct AdaptOutcome {
    pub values: Vec<f64>,
    pub err: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Runs the adaptive loop. `eval` applies the embedded rule to one region.
pub fn adapt<E>(
    d: usize,
    n_out: usize,
    root: Region,
    eval: &E,
    tol: f64,
    max_evals: u64,
    workers: usize,
) -> Result<AdaptOutcome, QuadError>
where
    E: Fn(&Region) -> RuleOut + Sync,
{
    let mut slab: Vec<Option<Leaf>> = Vec::new();
    let mut heap: BinaryHeap<QueueItem> = BinaryHeap::new();
    let mut evals: u64 = 0;
    let mut running: Vec<f64> = alloc::vec![0.0; n_out];
    let mut err_total = 0.0f64;

    let admit = |out: RuleOut,
                     region: Region,
                     slab: &mut Vec<Option<Leaf>>,
                     heap: &mut BinaryHeap<QueueItem>,
                     running: &mut [f64],
                     err_total: &mut f64,
                     evals: &mut u64|
     -> Result<(), QuadError> {
        if let Some(point) = out.bad_point {
            return Err(QuadError::NonFiniteSample { point });
        }
        *evals += out.evals;
        for (r, v) in running.iter_mut().zip(&out.values) {
            *r += v;
        }
        *err_total += out.err;
        let id = slab.len() as u32;
        heap.push(QueueItem { err: out.err, id });
        slab.push(Some(Leaf {
            values: out.values,
            err: out.err,
            region,
            split_dim: out.split_dim,
        }));
        Ok(())
    };

    let first = eval(&root);
    admit(first, root, &mut slab, &mut heap, &mut running, &mut err_total, &mut evals)?;

    let mut converged = false;
    loop {
        let norm = running.iter().fold(0.0f64, |m, v| m.max(fmath::abs(*v)));
        if err_total <= tol * norm.max(1.0) {
            converged = true;
            break;
        }
        if evals >= max_evals || heap.is_empty() {
            break;
        }

        // pop a batch of the worst regions
        let mut parents: Vec<Leaf> = Vec::with_capacity(BATCH);
        while parents.len() < BATCH {
            match heap.pop() {
                Some(item) => {
                    let leaf = slab[item.id as usize].take().expect("live leaf");
                    parents.push(leaf);
                }
                None => break,
            }
        }

        // split and evaluate children in a fixed order
        let tasks: Vec<Region> = parents
            .iter()
            .flat_map(|p| {
                let (a, b) = p.region.split(p.split_dim.min(d - 1));
                [a, b]
            })
            .collect();

        let outs: Vec<RuleOut> = run_batch(&tasks, eval, workers);

        for p in &parents {
            for (r, v) in running.iter_mut().zip(&p.values) {
                *r -= v;
            }
            err_total -= p.err;
        }
        for (out, region) in outs.into_iter().zip(tasks.into_iter()) {
            admit(out, region, &mut slab, &mut heap, &mut running, &mut err_total, &mut evals)?;
        }
    }

    // deterministic final reduction in region-id order
    let mut values = alloc::vec![0.0; n_out];
    let mut err = 0.0f64;
    for leaf in slab.iter().flatten() {
        for (r, v) in values.iter_mut().zip(&leaf.values) {
            *r += v;
        }
        err += leaf.err;
    }
    // an adaptive estimate is never reported as exactly zero
    let norm = values.iter().fold(0.0f64, |m, v| m.max(fmath::abs(*v)));
    if err <= 0.0 {
        err = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    }
    Ok(AdaptOutcome {
        values,
        err,
        evaluations: evals,
        converged,
    })
}

#[cfg(feature = "parallel")]
fn run_batch<E>(tasks: &[Region], eval: &E, workers: usize) -> Vec<RuleOut>
where
    E: Fn(&Region) -> RuleOut + Sync,
{
    use rayon::prelude::*;
    if workers > 1 {
        tasks.par_iter().map(eval).collect()
    } else {
        tasks.iter().map(eval).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_batch<E>(tasks: &[Region], eval: &E, _workers: usize) -> Vec<RuleOut>
where
    E: Fn(&Region) -> RuleOut + Sync,
{
    tasks.iter().map(eval).collect()
}

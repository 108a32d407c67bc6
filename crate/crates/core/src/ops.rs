// SPDX-License-Identifier: Apache-2.0

//! Per-thread operation counters.
//!
//! Every protocol-level modular exponentiation, exponent inversion and XOR
//! masking bumps a thread-local counter. [`measure`] reports how many of each
//! a closure performed, which is how the simulator attributes cost to phases.
//! Internal bookkeeping (parameter validation, group membership checks) uses
//! raw arithmetic and is not counted.

use std::cell::Cell;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub exponentiations: u64,
    pub inversions: u64,
    pub xors: u64,
}

impl OpCounts {
    pub fn is_zero(&self) -> bool {
        *self == OpCounts::default()
    }
}

impl Add for OpCounts {
    type Output = OpCounts;

    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            exponentiations: self.exponentiations + rhs.exponentiations,
            inversions: self.inversions + rhs.inversions,
            xors: self.xors + rhs.xors,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        *self = *self + rhs;
    }
}

impl Sub for OpCounts {
    type Output = OpCounts;

    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            exponentiations: self.exponentiations - rhs.exponentiations,
            inversions: self.inversions - rhs.inversions,
            xors: self.xors - rhs.xors,
        }
    }
}

thread_local! {
    static COUNTS: Cell<OpCounts> = Cell::new(OpCounts::default());
}

fn bump(f: impl FnOnce(&mut OpCounts)) {
    COUNTS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

pub(crate) fn record_exp() {
    bump(|c| c.exponentiations += 1);
}

pub(crate) fn record_inv() {
    bump(|c| c.inversions += 1);
}

pub(crate) fn record_xor() {
    bump(|c| c.xors += 1);
}

/// Running totals for the current thread.
pub fn snapshot() -> OpCounts {
    COUNTS.with(|c| c.get())
}

/// Runs `f` and returns its result with the operations it performed.
/// Nested calls are fine: counters are monotonic and only diffed.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
    let before = snapshot();
    let out = f();
    (out, snapshot() - before)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_measurements_diff_correctly() {
        let ((_, inner), outer) = measure(|| {
            record_exp();
            measure(|| {
                record_exp();
                record_xor();
            })
        });
        assert_eq!(inner, OpCounts { exponentiations: 1, inversions: 0, xors: 1 });
        assert_eq!(outer, OpCounts { exponentiations: 2, inversions: 0, xors: 1 });
    }

    #[test]
    fn empty_closure_counts_nothing() {
        let (_, c) = measure(|| ());
        assert!(c.is_zero());
    }
}

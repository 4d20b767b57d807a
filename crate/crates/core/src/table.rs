//! Fully materialized finite p-groups.
//!
//! Elements are encoded as integers `sum a_k p^{n-1-k}`, so numeric order on
//! codes is lexicographic order on normal forms. Right multiplication by each
//! generator is tabulated once; general products then cost at most
//! `n (p - 1)` table lookups.

use std::sync::OnceLock;

use crate::error::GroupError;
use crate::pcp::{ExponentVector, PcPresentation};

/// Default cap on the number of elements a group may have to be materialized.
pub const DEFAULT_BUDGET: u64 = 19_683;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "PGROUP_MAX_ORDER";

pub fn budget() -> u64 {
    static BUDGET: OnceLock<u64> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET)
    })
}

/// A consistent presentation together with its right-regular multiplication
/// tables.
#[derive(Clone, Debug)]
pub struct Group {
    pres: PcPresentation,
    p: u32,
    n: usize,
    order: usize,
    place: Vec<u32>,
    digits: Vec<u16>,
    right: Vec<u32>,
    right_inv: Vec<u32>,
}

impl Group {
    pub fn new(pres: &PcPresentation) -> Result<Self, GroupError> {
        Self::with_budget(pres, budget())
    }

    pub fn with_budget(pres: &PcPresentation, budget: u64) -> Result<Self, GroupError> {
        let p = pres.p();
        let n = pres.ngens();
        let too_big = || GroupError::BudgetExceeded {
            p,
            log_order: n,
            budget,
        };
        let order = u64::from(p).checked_pow(n as u32).ok_or_else(too_big)?;
        if order > budget || order > u64::from(u32::MAX) {
            return Err(too_big());
        }
        let order = order as usize;
        let mut place = vec![1u32; n];
        for k in (0..n.saturating_sub(1)).rev() {
            place[k] = place[k + 1] * p;
        }
        let mut digits = vec![0u16; order * n];
        for x in 0..order {
            let mut c = x as u32;
            for k in (0..n).rev() {
                digits[x * n + k] = (c % p) as u16;
                c /= p;
            }
        }
        let rels = pres.relations();
        let code_of = |v: &ExponentVector| -> u32 {
            v.as_slice().iter().zip(&place).map(|(&a, &w)| a * w).sum()
        };
        let power_codes: Vec<u32> = (0..n).map(|i| code_of(rels.power_rhs(i))).collect();
        let mut right = vec![0u32; order * n];
        for i in (0..n).rev() {
            for x in 0..order {
                let dx = &digits[x * n..(x + 1) * n];
                let last = (0..n).rev().find(|&k| dx[k] != 0);
                let r = match last {
                    None => place[i],
                    Some(k) if k < i => x as u32 + place[i],
                    Some(k) if k == i => {
                        if u32::from(dx[i]) + 1 < p {
                            x as u32 + place[i]
                        } else {
                            x as u32 - (p - 1) * place[i] + power_codes[i]
                        }
                    }
                    Some(k) => {
                        // x = y g_k and g_k g_i = g_i (g_k w_ki)
                        let y = x as u32 - place[k];
                        let mut r = right[i * order + y as usize];
                        for &(m, e) in rels.conjugate_word(k, i) {
                            for _ in 0..e {
                                r = right[m * order + r as usize];
                            }
                        }
                        r
                    }
                };
                right[i * order + x] = r;
            }
        }
        let mut right_inv = vec![0u32; order * n];
        for i in 0..n {
            for x in 0..order {
                let y = right[i * order + x] as usize;
                right_inv[i * order + y] = x as u32;
            }
        }
        Ok(Group {
            pres: pres.clone(),
            p,
            n,
            order,
            place,
            digits,
            right,
            right_inv,
        })
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ngens(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn generator(&self, k: usize) -> u32 {
        self.place[k]
    }

    pub fn place(&self, k: usize) -> u32 {
        self.place[k]
    }

    #[inline]
    pub fn digits(&self, x: u32) -> &[u16] {
        let x = x as usize;
        &self.digits[x * self.n..(x + 1) * self.n]
    }

    #[inline]
    pub fn digit(&self, x: u32, k: usize) -> u32 {
        u32::from(self.digits[x as usize * self.n + k])
    }

    pub fn code(&self, v: &ExponentVector) -> u32 {
        v.as_slice().iter().zip(&self.place).map(|(&a, &w)| a * w).sum()
    }

    pub fn vector(&self, x: u32) -> ExponentVector {
        ExponentVector::from_vec(self.digits(x).iter().map(|&d| u32::from(d)).collect())
    }

    #[inline]
    pub fn mul_gen(&self, x: u32, k: usize) -> u32 {
        self.right[k * self.order + x as usize]
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let mut r = x;
        let n = self.n;
        let dy = &self.digits[y as usize * n..(y as usize + 1) * n];
        for (k, &e) in dy.iter().enumerate() {
            for _ in 0..e {
                r = self.right[k * self.order + r as usize];
            }
        }
        r
    }

    #[inline]
    pub fn inv(&self, x: u32) -> u32 {
        let mut r = 0u32;
        let n = self.n;
        let dx = &self.digits[x as usize * n..(x as usize + 1) * n];
        for k in (0..n).rev() {
            for _ in 0..dx[k] {
                r = self.right_inv[k * self.order + r as usize];
            }
        }
        r
    }

    pub fn pow(&self, x: u32, mut k: u64) -> u32 {
        let mut result = 0u32;
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(result, base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(base, base);
            }
        }
        result
    }

    /// `[x, y] = x^-1 y^-1 x y`
    pub fn comm(&self, x: u32, y: u32) -> u32 {
        let yx = self.mul(y, x);
        self.mul(self.inv(yx), self.mul(x, y))
    }

    /// `g^-1 x g`
    pub fn conj(&self, x: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn order_of(&self, x: u32) -> u64 {
        let mut ord = 1u64;
        let mut y = x;
        let p = u64::from(self.p);
        while y != 0 {
            y = self.pow(y, p);
            ord *= p;
        }
        ord
    }

    /// Zeroes every coordinate from generator `m` on: the image in
    /// `G / <g_m, ..., g_{n-1}>` when that subgroup is normal.
    #[inline]
    pub fn truncate(&self, x: u32, m: usize) -> u32 {
        if m >= self.n {
            return x;
        }
        let w = self.place[m] * self.p;
        x - x % w
    }

    /// `p^k`-th power map on all elements.
    pub fn power_map(&self) -> Vec<u32> {
        (0..self.order as u32).map(|x| self.pow(x, u64::from(self.p))).collect()
    }
}

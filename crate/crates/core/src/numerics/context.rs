use crate::error::{Error, Result};

pub const DEFAULT_GUARD_BITS: u32 = 64;

/// Requested accuracy and the extra working precision spent to reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    pub target_bits: u32,
    pub guard_bits: u32,
}

impl PrecisionContext {
    pub fn new(target_bits: u32) -> Result<Self> {
        Self::with_guard(target_bits, DEFAULT_GUARD_BITS)
    }

    pub fn with_guard(target_bits: u32, guard_bits: u32) -> Result<Self> {
        if target_bits < 32 {
            return Err(Error::Domain(format!(
                "target precision must be at least 32 bits, got {target_bits}"
            )));
        }
        if guard_bits < 32 {
            return Err(Error::Domain(format!(
                "guard precision must be at least 32 bits, got {guard_bits}"
            )));
        }
        if target_bits > 1 << 16 {
            return Err(Error::Domain(format!("target precision {target_bits} is too large")));
        }
        Ok(PrecisionContext {
            target_bits,
            guard_bits,
        })
    }

    pub fn working(&self) -> u32 {
        self.target_bits + self.guard_bits
    }

    /// Same target with more guard bits, used by adaptive retries.
    pub fn boosted(&self, extra: u32) -> Self {
        PrecisionContext {
            target_bits: self.target_bits,
            guard_bits: self.guard_bits + extra,
        }
    }

    /// A context with doubled target precision.
    pub fn doubled(&self) -> Self {
        PrecisionContext {
            target_bits: self.target_bits * 2,
            guard_bits: self.guard_bits,
        }
    }
}

/// Evaluate at working precision `ctx.working()`, then with doubling guard
/// bits until `ok` accepts the result or the guard reaches four times the
/// working precision; the last attempt is returned either way.
pub fn refine<T>(
    ctx: &PrecisionContext,
    f: impl Fn(u32) -> Result<T>,
    ok: impl Fn(&T) -> bool,
) -> Result<T> {
    let wp = ctx.working();
    let mut guard = 0;
    loop {
        let v = f(wp + guard)?;
        if ok(&v) || guard >= 4 * wp {
            return Ok(v);
        }
        guard = (guard * 2).max(64);
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            target_bits: 128,
            guard_bits: DEFAULT_GUARD_BITS,
        }
    }
}

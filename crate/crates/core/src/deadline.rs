use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Optional wall-clock limit checked cooperatively by the search loops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub const NONE: Deadline = Deadline(None);

    pub fn after(limit: Duration) -> Self {
        Deadline(Some(Instant::now() + limit))
    }

    pub fn at(instant: Instant) -> Self {
        Deadline(Some(instant))
    }

    pub fn is_set(&self) -> bool {
        self.0.is_some()
    }

    pub fn check(&self) -> Result<()> {
        match self.0 {
            Some(t) if Instant::now() >= t => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

/// Amortizes deadline checks over many cheap steps.
#[derive(Debug)]
pub(crate) struct Ticker {
    deadline: Deadline,
    count: u32,
}

impl Ticker {
    pub(crate) fn new(deadline: Deadline) -> Self {
        Ticker { deadline, count: 0 }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.count = self.count.wrapping_add(1);
        if self.count & 0x3ff == 0 {
            self.deadline.check()
        } else {
            Ok(())
        }
    }
}

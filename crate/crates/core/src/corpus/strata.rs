use serde::{Deserialize, Serialize};

use super::{CorpusError, SeedProgram};

pub const BANDS: usize = 4;

/// Equal-frequency LOC quartile bands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataAssignment {
    /// LOC of the first program of bands 1, 2 and 3 in (loc, id) order.
    pub boundaries: [usize; 3],
    /// Program ids per band, sorted by id.
    pub members: [Vec<String>; BANDS],
}

impl StrataAssignment {
    pub fn band_of(&self, id: &str) -> Option<u8> {
        self.members
            .iter()
            .position(|m| m.iter().any(|x| x == id))
            .map(|b| b as u8)
    }
}

/// Number of slots band `b` gets out of `n`.
fn band_size(n: usize, b: usize) -> usize {
    (b + 1) * n / BANDS - b * n / BANDS
}

/// Assign every program to one of four equal-frequency bands. Programs are
/// ordered by (loc, id); a run of equal LOC that straddles band edges is
/// dealt out round-robin across the bands it spans, in id order.
pub fn stratify(programs: &mut [SeedProgram]) -> Result<StrataAssignment, CorpusError> {
    let n = programs.len();
    if n < BANDS {
        return Err(CorpusError::TooFewPrograms(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (programs[a].loc, &programs[a].id).cmp(&(programs[b].loc, &programs[b].id))
    });

    // Band of each sorted slot.
    let slot_band: Vec<usize> = (0..BANDS)
        .flat_map(|b| std::iter::repeat_n(b, band_size(n, b)))
        .collect();
    let mut band = vec![0usize; n];
    let mut start = 0;
    while start < n {
        let loc = programs[order[start]].loc;
        let end = (start..n)
            .find(|&i| programs[order[i]].loc != loc)
            .unwrap_or(n);
        let mut capacity = [0usize; BANDS];
        for &b in &slot_band[start..end] {
            capacity[b] += 1;
        }
        let spanned: Vec<usize> = (0..BANDS).filter(|&b| capacity[b] > 0).collect();
        let mut turn = 0;
        for &idx in &order[start..end] {
            while capacity[spanned[turn % spanned.len()]] == 0 {
                turn += 1;
            }
            let b = spanned[turn % spanned.len()];
            capacity[b] -= 1;
            band[idx] = b;
            turn += 1;
        }
        start = end;
    }

    let mut members: [Vec<String>; BANDS] = Default::default();
    for (i, p) in programs.iter_mut().enumerate() {
        p.stratum = Some(band[i] as u8);
        members[band[i]].push(p.id.clone());
    }
    for m in &mut members {
        m.sort();
    }
    let mut boundaries = [0; 3];
    let mut offset = 0;
    for (b, slot) in boundaries.iter_mut().enumerate() {
        offset += band_size(n, b);
        *slot = programs[order[offset]].loc;
    }
    Ok(StrataAssignment {
        boundaries,
        members,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionQuota {
    pub per_band_target: usize,
    pub attempts_per_band: [usize; BANDS],
    pub passed_per_band: [usize; BANDS],
}

impl SelectionQuota {
    pub fn new(per_band_target: usize) -> Self {
        Self {
            per_band_target,
            attempts_per_band: [0; BANDS],
            passed_per_band: [0; BANDS],
        }
    }

    pub fn total_target(&self) -> usize {
        BANDS * self.per_band_target
    }

    pub fn band_full(&self, band: usize) -> bool {
        self.passed_per_band[band] >= self.per_band_target
    }

    pub fn met(&self) -> bool {
        (0..BANDS).all(|b| self.band_full(b))
    }
}

/// Walks candidates round-robin over bands that still need passing
/// programs, in id order within each band.
#[derive(Debug, Clone)]
pub struct Selector {
    queues: [Vec<SeedProgram>; BANDS],
    cursor: [usize; BANDS],
    next_band: usize,
    pub quota: SelectionQuota,
}

impl Selector {
    pub fn new(
        programs: &[SeedProgram],
        assignment: &StrataAssignment,
        quota: SelectionQuota,
    ) -> Self {
        let mut queues: [Vec<SeedProgram>; BANDS] = Default::default();
        for (b, ids) in assignment.members.iter().enumerate() {
            queues[b] = ids
                .iter()
                .filter_map(|id| programs.iter().find(|p| &p.id == id).cloned())
                .collect();
        }
        Self {
            queues,
            cursor: [0; BANDS],
            next_band: 0,
            quota,
        }
    }

    fn open(&self, band: usize) -> bool {
        !self.quota.band_full(band) && self.cursor[band] < self.queues[band].len()
    }

    /// Next candidate, or `None` once no unfilled band has candidates left.
    pub fn next_candidate(&mut self) -> Option<(usize, SeedProgram)> {
        for step in 0..BANDS {
            let band = (self.next_band + step) % BANDS;
            if self.open(band) {
                let program = self.queues[band][self.cursor[band]].clone();
                self.cursor[band] += 1;
                self.quota.attempts_per_band[band] += 1;
                self.next_band = (band + 1) % BANDS;
                return Some((band, program));
            }
        }
        None
    }

    /// One candidate from every open band, in band order. Equivalent to
    /// `BANDS` steps of [`next_candidate`](Self::next_candidate) when results
    /// are recorded after the round.
    pub fn next_round(&mut self) -> Vec<(usize, SeedProgram)> {
        let mut round = Vec::new();
        for band in 0..BANDS {
            if self.open(band) {
                let program = self.queues[band][self.cursor[band]].clone();
                self.cursor[band] += 1;
                self.quota.attempts_per_band[band] += 1;
                round.push((band, program));
            }
        }
        round
    }

    /// For every open band, as many next candidates as it still needs. A
    /// batch can never overfill a band, so recording a batch and asking for
    /// the next one selects the same programs as one-at-a-time iteration.
    pub fn next_batch(&mut self) -> Vec<(usize, SeedProgram)> {
        let mut batch = Vec::new();
        for band in 0..BANDS {
            let need = self
                .quota
                .per_band_target
                .saturating_sub(self.quota.passed_per_band[band]);
            let end = (self.cursor[band] + need).min(self.queues[band].len());
            for i in self.cursor[band]..end {
                batch.push((band, self.queues[band][i].clone()));
                self.quota.attempts_per_band[band] += 1;
            }
            self.cursor[band] = end;
        }
        batch
    }

    pub fn record(&mut self, band: usize, passed: bool) {
        if passed {
            self.quota.passed_per_band[band] += 1;
        }
    }

    /// Bands that ran out of candidates before reaching the target.
    pub fn short_bands(&self) -> Vec<usize> {
        (0..BANDS)
            .filter(|&b| !self.quota.band_full(b) && self.cursor[b] >= self.queues[b].len())
            .collect()
    }
}

//! Near-linear repetition detection.
//!
//! Maximal periodic factors (length at least twice the period) are found by
//! divide and conquer: repetitions crossing the midpoint of a segment are
//! recovered from longest-common-extension queries answered by Z-arrays, in
//! O(n log n) overall. The critical exponent of a word with a square is
//! attained by such a factor; squarefree binary words have length at most 3
//! and are handled directly.

use crate::exponent::Rational;
use crate::word::{CubeWitness, RepetitionWitness};

/// A maximal periodic factor: `w[start..start+len)` has period `period`,
/// `len >= 2*period`, and the periodicity extends neither left nor right.
#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    len: usize,
    period: usize,
}

struct Search<'a> {
    w: &'a [u8],
    rev: Vec<u8>,
    buf: Vec<u8>,
    zf: Vec<usize>,
    zb: Vec<usize>,
    zv: Vec<usize>,
    runs: Vec<Run>,
}

pub(crate) fn max_exponent(w: &[u8]) -> (RepetitionWitness, Rational) {
    debug_assert!(!w.is_empty());
    let runs = collect_runs(w);
    if runs.is_empty() {
        // No square: over {0,1} this forces |w| <= 3. The only squarefree
        // length-3 binary words are 010 and 101, with exponent 3/2.
        debug_assert!(w.len() <= 3);
        return if w.len() == 3 {
            (RepetitionWitness { position: 0, length: 3, period: 2 }, Rational::new(3, 2))
        } else {
            (RepetitionWitness { position: 0, length: 1, period: 1 }, Rational::new(1, 1))
        };
    }
    let mut best: Option<(Run, Rational)> = None;
    for r in runs {
        let ratio = Rational::new(r.len as i64, r.period as i64);
        let better = match &best {
            None => true,
            Some((b, bratio)) => {
                ratio > *bratio
                    || (ratio == *bratio && (r.period, r.start) < (b.period, b.start))
            }
        };
        if better {
            best = Some((r, ratio));
        }
    }
    let (r, ratio) = best.unwrap();
    (RepetitionWitness { position: r.start, length: r.len, period: r.period }, ratio)
}

pub(crate) fn find_cube(w: &[u8]) -> Option<CubeWitness> {
    let mut best: Option<(usize, usize)> = None;
    for r in collect_runs(w) {
        if r.len >= 3 * r.period {
            let cand = (r.period, r.start);
            if best.map_or(true, |b| cand < b) {
                best = Some(cand);
            }
        }
    }
    best.map(|(period, position)| CubeWitness { position, period })
}

fn collect_runs(w: &[u8]) -> Vec<Run> {
    let n = w.len();
    let mut s = Search {
        w,
        rev: w.iter().rev().copied().collect(),
        buf: Vec::new(),
        zf: Vec::new(),
        zb: Vec::new(),
        zv: Vec::new(),
        runs: Vec::new(),
    };
    s.recurse(0, n);
    s.runs
}

impl Search<'_> {
    fn recurse(&mut self, lo: usize, hi: usize) {
        let n = hi - lo;
        if n < 2 {
            return;
        }
        let mid = n / 2;
        self.recurse(lo, lo + mid);
        self.recurse(lo + mid, hi);
        self.crossing(lo, hi, mid);
    }

    /// Repetitions containing both positions `lo+mid-1` and `lo+mid`.
    fn crossing(&mut self, lo: usize, hi: usize, mid: usize) {
        const SEP: u8 = 2;
        let total = self.w.len();
        let n = hi - lo;
        let vlen = n - mid;
        let seg = &self.w[lo..hi];
        let v = &self.w[lo + mid..hi];
        // reversed segment and reversed left half are slices of the
        // precomputed reversed word
        let rev_seg = &self.rev[total - hi..total - lo];
        let rev_u = &self.rev[total - lo - mid..total - lo];

        // zf[vlen+1+i] = LCP(seg[i..], v): forward extension across the boundary
        self.buf.clear();
        self.buf.extend_from_slice(v);
        self.buf.push(SEP);
        self.buf.extend_from_slice(seg);
        z_array(&self.buf, &mut self.zf);

        // zb[mid+1+j] = LCP(rev_seg[j..], rev_u): backward extension
        self.buf.clear();
        self.buf.extend_from_slice(rev_u);
        self.buf.push(SEP);
        self.buf.extend_from_slice(rev_seg);
        z_array(&self.buf, &mut self.zb);

        // zv[p] = LCP(v, v[p..]): forward extension inside the right half
        z_array(v, &mut self.zv);

        // periodicities whose period block ends at the boundary:
        // anchored on seg[mid-p..mid)
        for p in 1..=mid {
            let e_right = self.zf[vlen + 1 + (mid - p)];
            let e_left = if p == mid { 0 } else { self.zb[n + 1 + p] };
            if e_left + e_right >= p {
                self.runs.push(Run {
                    start: lo + mid - p - e_left,
                    len: p + e_left + e_right,
                    period: p,
                });
            }
        }
        // periodicities whose period block starts at the boundary:
        // anchored on seg[mid..mid+p)
        for p in 1..=vlen {
            let e_right = if p < vlen { self.zv[p] } else { 0 };
            let e_left = self.zb[mid + 1 + (vlen - p)];
            if e_left + e_right >= p {
                self.runs.push(Run {
                    start: lo + mid - e_left,
                    len: p + e_left + e_right,
                    period: p,
                });
            }
        }
    }
}

/// Z-array into `out`: `out[i]` = length of the longest common prefix of `s`
/// and `s[i..]`, with `out[0] = |s|`.
fn z_array(s: &[u8], out: &mut Vec<usize>) {
    let n = s.len();
    out.clear();
    out.resize(n, 0);
    if n == 0 {
        return;
    }
    out[0] = n;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        let mut k = if i < r { out[i - l].min(r - i) } else { 0 };
        while i + k < n && s[k] == s[i + k] {
            k += 1;
        }
        out[i] = k;
        if i + k > r {
            l = i;
            r = i + k;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bytes(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn z_array_basic() {
        let mut out = Vec::new();
        z_array(&bytes("0101010"), &mut out);
        assert_eq!(out, vec![7, 0, 5, 0, 3, 0, 1]);
    }

    #[test]
    fn cube_witnesses() {
        assert_eq!(
            find_cube(&bytes("101010")),
            Some(CubeWitness { position: 0, period: 2 })
        );
        assert_eq!(find_cube(&bytes("0110")), None);
        let c = find_cube(&bytes("011011100011")).unwrap();
        assert_eq!((c.position, c.period), (4, 1));
    }

    #[test]
    fn exponent_of_small_words() {
        let (wit, ce) = max_exponent(&bytes("00"));
        assert_eq!(ce, Rational::new(2, 1));
        assert_eq!((wit.position, wit.length, wit.period), (0, 2, 1));
        let (wit, ce) = max_exponent(&bytes("01"));
        assert_eq!(ce, Rational::new(1, 1));
        assert_eq!((wit.position, wit.length, wit.period), (0, 1, 1));
        let (_, ce) = max_exponent(&bytes("010"));
        assert_eq!(ce, Rational::new(3, 2));
    }
}

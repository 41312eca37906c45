//! Scoring a change map against ground truth: confusion counts, the four
//! rates, and Cohen's kappa.

use crate::error::{Error, Result};
use crate::segment::ChangeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// The four rates. `degenerate` is set when a rate pair had a zero
/// denominator (no positives or no negatives in truth).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub tpr: f64,
    pub fpr: f64,
    pub tnr: f64,
    pub fnr: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub counts: ConfusionCounts,
    pub rates: Rates,
    pub kappa: f64,
    pub degenerate: bool,
}

/// Pixel-by-pixel confusion counts. Positive class is "changed".
pub fn confusion(map: &ChangeMap, truth: &ChangeMap) -> Result<ConfusionCounts> {
    if map.width() != truth.width() || map.height() != truth.height() {
        return Err(Error::DimensionMismatch(
            map.width(),
            map.height(),
            truth.width(),
            truth.height(),
        ));
    }
    let mut c = ConfusionCounts {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&m, &t) in map.flags().iter().zip(truth.flags()) {
        match (m, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// tpr = tp/(tp+fn), fnr = fn/(tp+fn), fpr = fp/(fp+tn), tnr = tn/(fp+tn).
/// A zero denominator yields 0 for both members of that pair and sets the
/// degenerate flag; batch runs over all-unchanged tiles must not abort.
pub fn rates(c: &ConfusionCounts) -> Rates {
    let pos = c.tp + c.fn_;
    let neg = c.fp + c.tn;
    let mut degenerate = false;
    let (tpr, fnr) = if pos > 0 {
        (c.tp as f64 / pos as f64, c.fn_ as f64 / pos as f64)
    } else {
        degenerate = true;
        (0.0, 0.0)
    };
    let (fpr, tnr) = if neg > 0 {
        (c.fp as f64 / neg as f64, c.tn as f64 / neg as f64)
    } else {
        degenerate = true;
        (0.0, 0.0)
    };
    Rates {
        tpr,
        fpr,
        tnr,
        fnr,
        degenerate,
    }
}

/// Cohen's kappa over the 2x2 table. Returns 0 when chance agreement is
/// 1 (both margins collapse to one class).
pub fn kappa(c: &ConfusionCounts) -> Result<f64> {
    let n = c.total();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let n = n as f64;
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let po = (tp + tn) / n;
    let pe = ((tp + fp) * (tp + fn_) + (fn_ + tn) * (fp + tn)) / (n * n);
    if pe >= 1.0 {
        return Ok(0.0);
    }
    Ok((po - pe) / (1.0 - pe))
}

/// Bundle confusion, rates, and kappa for one (map, truth) pair.
pub fn report(map: &ChangeMap, truth: &ChangeMap) -> Result<EvalReport> {
    let counts = confusion(map, truth)?;
    let rates = rates(&counts);
    let n = counts.total();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let nf = n as f64;
    let pe = ((counts.tp + counts.fp) as f64 * (counts.tp + counts.fn_) as f64
        + (counts.fn_ + counts.tn) as f64 * (counts.fp + counts.tn) as f64)
        / (nf * nf);
    let kappa = kappa(&counts)?;
    Ok(EvalReport {
        counts,
        rates,
        kappa,
        degenerate: rates.degenerate || pe >= 1.0,
    })
}

pub const CSV_HEADER: &str = "method,test_id,tp,fp,tn,fn,tpr,fpr,tnr,fnr,kappa,degenerate";

impl EvalReport {
    /// One CSV row; rates and kappa carry four decimals.
    pub fn csv_row(&self, method: &str, test_id: &str) -> String {
        format!(
            "{},{},{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
            method,
            test_id,
            self.counts.tp,
            self.counts.fp,
            self.counts.tn,
            self.counts.fn_,
            self.rates.tpr,
            self.rates.fpr,
            self.rates.tnr,
            self.rates.fnr,
            self.kappa,
            self.degenerate
        )
    }

    /// Key/value alternative for machine consumption.
    pub fn key_value(&self) -> String {
        format!(
            "tp={}\nfp={}\ntn={}\nfn={}\ntpr={:.4}\nfpr={:.4}\ntnr={:.4}\nfnr={:.4}\nkappa={:.4}\ndegenerate={}\n",
            self.counts.tp,
            self.counts.fp,
            self.counts.tn,
            self.counts.fn_,
            self.rates.tpr,
            self.rates.fpr,
            self.rates.tnr,
            self.rates.fnr,
            self.kappa,
            self.degenerate
        )
    }
}

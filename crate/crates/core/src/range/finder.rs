use super::constructive::constructive_find;
use super::{check_frame_size, CertificateType, HermitianTuple, NotFound, Outcome};
use crate::error::Result;
use crate::search::{multistart, SearchOptions};

/// General entry point: [`constructive_find`] and, if that comes back
/// without a proof of emptiness, a plain multistart on the whole problem.
pub fn find(a: &HermitianTuple, k: usize, p: usize, opts: &SearchOptions) -> Result<Outcome> {
    check_frame_size(k, p, a.dim())?;
    let first = constructive_find(a, k, p, opts)?;
    let nf = match first {
        Outcome::Found { .. } => return Ok(first),
        Outcome::NotFound(nf) if nf.is_certified_empty() => return Ok(Outcome::NotFound(nf)),
        Outcome::NotFound(nf) => nf,
    };
    let report = multistart(a, k, p, opts)?;
    if report.accepted {
        return Ok(Outcome::Found { witness: report.best, certificate: CertificateType::SearchOnly });
    }
    let mut notes = nf.notes;
    notes.extend(report.notes);
    Ok(Outcome::NotFound(NotFound { certificate: CertificateType::SearchOnly, depth: nf.depth, notes }))
}

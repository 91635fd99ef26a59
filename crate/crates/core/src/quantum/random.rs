use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{QuantumError, QuantumScheme, RegisterLayout, C64};

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        for entry in q.column_mut(k).iter_mut() {
            *entry *= phase;
        }
    }
    q
}

/// A scheme with `t` probes and independent random layers, embedding `m` queries
/// at the layout's first query states.
pub fn random_scheme<R: Rng + ?Sized>(
    layout: RegisterLayout,
    probes: usize,
    m: usize,
    rng: &mut R,
) -> Result<QuantumScheme, QuantumError> {
    let d = layout.dimension();
    let layers = (0..=probes).map(|_| random_unitary(d, rng)).collect();
    let embedding = layout.default_embedding(m)?;
    QuantumScheme::new(layout, layers, embedding)
}
